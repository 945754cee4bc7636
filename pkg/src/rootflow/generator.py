"""Synthesis of polynomial x-systems from solvable coefficient systems.

Given declared coefficient dynamics ``dy/dt = f(y)`` over one of the pair
families, the velocity-identity numerators are polynomials in ``(x1, x2)``
that must contain the factor ``x1 - x2`` (and powers of ``x1`` for the
double-zero families) for the root dynamics to be polynomial.  Each family
has an equivalent one-variable divisibility condition obtained on the
diagonal ``x1 = x2 = x``:

* GENERIC2 / Y12:     ``x f1(-2x, x^2) + f2(-2x, x^2) = 0``
* DOUBLE_ZERO3 / Y12: ``2x f1(-3x, 3x^2) + f2(-3x, 3x^2) = 0``
* DOUBLE_ZERO3 / Y13: ``[x^2 f1(-3x, -x^3) - f3(-3x, -x^3)] / x = 0``
* DOUBLE_ZERO3 / Y23: ``[x f2(3x^2, -x^3) + 2 f3(3x^2, -x^3)] / x = 0``

When a condition holds, :func:`synthesize_xsystem` performs the exact
divisions and returns the polynomial right-hand sides; a nonzero remainder
reports a violated condition.  Parameters are carried as numeric literals:
conditions are checked on instantiated coefficients, where a violated
identity cannot cancel to the zero polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .correspondence import Config, Pair
from .poly import MultiPoly, exact_div

_XVARS = ("x1", "x2")
_DIAG = ("x",)

PAIR_COEFFS = {Pair.Y12: ("y1", "y2"), Pair.Y13: ("y1", "y3"), Pair.Y23: ("y2", "y3")}


class SynthesisError(ValueError):
    """Exact division left a remainder: the declared system violates its
    divisibility condition (or the parameters break the required relations)."""

    def __init__(self, message: str, remainder: MultiPoly | None = None):
        super().__init__(message)
        self.remainder = remainder


@dataclass(frozen=True)
class YSystemSpec:
    """A declared coefficient system: which configuration, which coefficient
    pair evolves, and the two right-hand-side polynomials (numeric
    parameters already substituted)."""

    config: Config
    pair: Pair
    f: Mapping[str, MultiPoly]
    params: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        names = PAIR_COEFFS[self.pair]
        if self.config is Config.GENERIC2 and self.pair is not Pair.Y12:
            raise ValueError("GENERIC2 requires the Y12 pair")
        f = dict(self.f)
        if set(f) != set(names):
            raise ValueError(f"pair {self.pair.value} needs f for {names}, got {sorted(f)}")
        for name, p in f.items():
            if p.variables != names:
                raise ValueError(f"f[{name}] must be a polynomial in {names}, got {p.variables}")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "params", dict(self.params))


@dataclass(frozen=True)
class XSystem:
    """Synthesized polynomial right-hand sides for the root dynamics."""

    p1: MultiPoly
    p2: MultiPoly
    source: YSystemSpec | None = None

    def __post_init__(self):
        if self.p1.variables != self.p2.variables:
            raise ValueError("components must share variables")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.p1.variables

    def rhs(self, x1: complex, x2: complex) -> tuple[complex, complex]:
        v1, v2 = self.variables
        pt = {v1: x1, v2: x2}
        return self.p1.evaluate(pt), self.p2.evaluate(pt)


@dataclass(frozen=True)
class ConditionReport:
    condition: int
    satisfied: bool
    residual: MultiPoly
    divisibility_failure: complex | None = None

    def describe(self) -> str:
        lines = [f"condition {self.condition}: {'satisfied' if self.satisfied else 'violated'}",
                 f"residual: {self.residual.pretty()}"]
        if self.divisibility_failure is not None:
            lines.append(f"not divisible by x: constant term {self.divisibility_failure}")
        return "\n".join(lines)


def _condition_number(config: Config, pair: Pair) -> int:
    if config is Config.GENERIC2:
        return 1
    return {Pair.Y12: 2, Pair.Y13: 3, Pair.Y23: 4}[pair]


def _diagonal_bindings(config: Config, pair: Pair) -> dict[str, MultiPoly]:
    x = MultiPoly.var(_DIAG, "x")
    if config is Config.GENERIC2:
        return {"y1": -2.0 * x, "y2": x * x}
    values = {"y1": -3.0 * x, "y2": 3.0 * x * x, "y3": -(x ** 3)}
    return {name: values[name] for name in PAIR_COEFFS[pair]}


def check_condition(spec: YSystemSpec) -> ConditionReport:
    """Evaluate the family's divisibility condition on the diagonal."""
    number = _condition_number(spec.config, spec.pair)
    bind = _diagonal_bindings(spec.config, spec.pair)
    x = MultiPoly.var(_DIAG, "x")
    a, b = PAIR_COEFFS[spec.pair]
    fa = spec.f[a].substitute(bind)
    fb = spec.f[b].substitute(bind)
    if number == 1:
        residual = x * fa + fb
    elif number == 2:
        residual = 2.0 * x * fa + fb
    elif number == 3:
        numerator = x * x * fa - fb
        residual, failure = _divide_by_x(numerator)
        if failure is not None:
            return ConditionReport(number, False, residual, failure)
    else:
        numerator = x * fa + 2.0 * fb
        residual, failure = _divide_by_x(numerator)
        if failure is not None:
            return ConditionReport(number, False, residual, failure)
    return ConditionReport(number, residual.is_zero(), residual)


def _divide_by_x(p: MultiPoly) -> tuple[MultiPoly, complex | None]:
    q, r = exact_div(p, MultiPoly.var(_DIAG, "x"))
    if r.is_zero():
        return q, None
    return q, r.coefficient((0,))


def _exact_quotient(p: MultiPoly, d: MultiPoly, what: str) -> MultiPoly:
    q, r = exact_div(p, d)
    if not r.is_zero():
        raise SynthesisError(f"{what} is not divisible by {d.pretty()}: remainder {r.pretty()}", r)
    return q


def _root_bindings(config: Config, pair: Pair) -> dict[str, MultiPoly]:
    x1 = MultiPoly.var(_XVARS, "x1")
    x2 = MultiPoly.var(_XVARS, "x2")
    if config is Config.GENERIC2:
        return {"y1": -(x1 + x2), "y2": x1 * x2}
    values = {"y1": -(2.0 * x1 + x2), "y2": x1 * (x1 + 2.0 * x2), "y3": -(x1 * x1) * x2}
    return {name: values[name] for name in PAIR_COEFFS[pair]}


def synthesize_xsystem(spec: YSystemSpec) -> XSystem:
    """Build the polynomial x-system by exact division of the velocity
    numerators; raises :class:`SynthesisError` when a division leaves a
    remainder (violated condition)."""
    bind = _root_bindings(spec.config, spec.pair)
    x1 = MultiPoly.var(_XVARS, "x1")
    x2 = MultiPoly.var(_XVARS, "x2")
    gap = x1 - x2
    a, b = PAIR_COEFFS[spec.pair]
    fa = spec.f[a].substitute(bind)
    fb = spec.f[b].substitute(bind)

    if spec.config is Config.GENERIC2:
        p1 = -1.0 * _exact_quotient(x1 * fa + fb, gap, "x1*f1 + f2")
        p2 = _exact_quotient(x2 * fa + fb, gap, "x2*f1 + f2")
        return XSystem(p1, p2, spec)

    if spec.pair is Pair.Y12:
        p1 = -0.5 * _exact_quotient(2.0 * x1 * fa + fb, gap, "2*x1*f1 + f2")
        p2 = _exact_quotient((x1 + x2) * fa + fb, gap, "(x1+x2)*f1 + f2")
        return XSystem(p1, p2, spec)

    if spec.pair is Pair.Y13:
        n1 = _exact_quotient(x1 * x1 * fa - fb, x1, "x1^2*f1 - f3")
        p1 = -0.5 * _exact_quotient(n1, gap, "(x1^2*f1 - f3)/x1")
        n2 = _exact_quotient(x1 * x2 * fa - fb, x1, "x1*x2*f1 - f3")
        p2 = _exact_quotient(n2, gap, "(x1*x2*f1 - f3)/x1")
        return XSystem(p1, p2, spec)

    # Pair.Y23
    n1 = _exact_quotient(x1 * fa + 2.0 * fb, x1, "x1*f2 + 2*f3")
    p1 = 0.5 * _exact_quotient(n1, gap, "(x1*f2 + 2*f3)/x1")
    n2 = _exact_quotient(x1 * x2 * fa + (x1 + x2) * fb, x1 * x1, "x1*x2*f2 + (x1+x2)*f3")
    p2 = -1.0 * _exact_quotient(n2, gap, "(x1*x2*f2 + (x1+x2)*f3)/x1^2")
    return XSystem(p1, p2, spec)


# ---------------------------------------------------------------------------
# the four built-in systems


def _anharmonic_f(names: tuple[str, str], alpha0: complex, alpha1: complex,
                  beta0: complex, beta1: complex) -> dict[str, MultiPoly]:
    a, b = names
    f_a = MultiPoly(names, {(0, 0): alpha0, (0, 1): alpha1})
    f_b = MultiPoly(names, {(1, 0): beta0, (3, 0): beta1})
    return {a: f_a, b: f_b}


def _logistic_f(names: tuple[str, str], self_index: int,
                alpha1: complex, alpha2: complex,
                beta1: complex, beta2: complex) -> dict[str, MultiPoly]:
    # leader couples linearly to itself and quadratically through the
    # self-coupled coordinate (names[self_index])
    a, b = names
    e_self = (0, 1) if self_index == 1 else (1, 0)
    f_a = MultiPoly(names, {(1, 0): alpha1, tuple(map(sum, zip((1, 0), e_self))): alpha2})
    f_b = MultiPoly(names, {(0, 1): beta1, tuple(map(sum, zip((0, 1), e_self))): beta2})
    return {a: f_a, b: f_b}


def example_params(n: int, a: complex, b: complex) -> dict[str, complex]:
    """Inverse parameter maps from the (a, b) of the x-systems to the
    coefficients of the underlying y-systems."""
    a, b = complex(a), complex(b)
    if n == 1:
        beta0, beta1 = -a, b
        return {"alpha0": 2.0 * beta0, "alpha1": 8.0 * beta1, "beta0": beta0, "beta1": beta1}
    if n == 2:
        beta0, beta1 = -2.0 * a, -2.0 * b
        return {"alpha0": 1.5 * beta0, "alpha1": 4.5 * beta1, "beta0": beta0, "beta1": beta1}
    if n == 3:
        return {"alpha1": a, "alpha2": b, "beta1": 3.0 * a, "beta2": 3.0 * b}
    if n == 4:
        return {"alpha1": 2.0 * a, "alpha2": 2.0 * b, "beta1": 3.0 * a, "beta2": 3.0 * b}
    raise ValueError(f"example must be 1..4, got {n}")


def builtin_example(n: int, a: complex, b: complex) -> tuple[YSystemSpec, XSystem]:
    """The four built-in solvable systems, synthesized live from their
    y-systems (so the divisibility conditions are exercised every time)."""
    p = example_params(n, a, b)
    if n == 1:
        spec = YSystemSpec(Config.GENERIC2, Pair.Y12,
                           _anharmonic_f(("y1", "y2"), p["alpha0"], p["alpha1"],
                                         p["beta0"], p["beta1"]),
                           params=p)
    elif n == 2:
        spec = YSystemSpec(Config.DOUBLE_ZERO3, Pair.Y12,
                           _anharmonic_f(("y1", "y2"), p["alpha0"], p["alpha1"],
                                         p["beta0"], p["beta1"]),
                           params=p)
    elif n == 3:
        spec = YSystemSpec(Config.DOUBLE_ZERO3, Pair.Y13,
                           _logistic_f(("y1", "y3"), 1, p["alpha1"], p["alpha2"],
                                       p["beta1"], p["beta2"]),
                           params=p)
    else:
        spec = YSystemSpec(Config.DOUBLE_ZERO3, Pair.Y23,
                           _logistic_f(("y2", "y3"), 0, p["alpha1"], p["alpha2"],
                                       p["beta1"], p["beta2"]),
                           params=p)
    return spec, synthesize_xsystem(spec)


def example_xsystem_reference(n: int, a: complex, b: complex) -> XSystem:
    """The published closed forms of the four x-systems, built directly
    (used to pin synthesis exactness in tests and the CLI)."""
    from .parsing import parse_poly
    a, b = complex(a), complex(b)
    A = MultiPoly.const(_XVARS, a)
    B = MultiPoly.const(_XVARS, b)
    P = lambda s: parse_poly(s, _XVARS)
    if n == 1:
        return XSystem(A + B * P("x1^2 - 4*x1*x2 - x2^2"),
                       A + B * P("x2^2 - 4*x1*x2 - x1^2"))
    if n == 2:
        return XSystem(A + B * P("x1^2 + 7*x1*x2 + x2^2"),
                       A + B * P("7*x1^2 + 4*x1*x2 - 2*x2^2"))
    if n == 3:
        return XSystem(A * P("x1") - B * P("x1^3*x2"),
                       A * P("x2") - B * P("x1^2*x2^2"))
    if n == 4:
        return XSystem(A * P("x1") + B * P("x1^3 + 2*x1^2*x2"),
                       A * P("x2") + B * P("x1^2*x2 + 2*x1*x2^2"))
    raise ValueError(f"example must be 1..4, got {n}")
