"""Sparse multivariate polynomials over complex coefficients.

The whole synthesis machinery rests on exact cancellation: the velocity
numerators must be *exactly* divisible by ``x1 - x2`` (and powers of ``x1``)
whenever the solvability conditions hold.  All worked parameter families
cancel exactly in binary floating point, so normalization only has to sweep
up rounding dust: any coefficient whose modulus falls below ``1e-14`` times
the largest coefficient modulus seen in the operands is pruned.

Monomials are ordered graded-lexicographically with respect to the declared
variable order, which makes :func:`exact_div` deterministic.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

ZERO_RTOL = 1e-14

Exponents = tuple[int, ...]


def _check_finite(c: complex) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"non-finite coefficient {c!r} is not admitted")
    return c


def _grlex_key(exps: Exponents) -> tuple:
    return (sum(exps), exps)


class MultiPoly:
    """A polynomial stored as a map from exponent vectors to coefficients.

    Instances are immutable by convention: no method mutates ``self`` and the
    term map must not be touched from outside.  The zero polynomial has an
    empty term map.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponents, complex] | None = None,
                 *, scale: float = 0.0):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        raw: dict[Exponents, complex] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent vector {exps} does not match variables {variables}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _check_finite(c)
            if exps in raw:
                raw[exps] += c
            else:
                raw[exps] = c
        scale = max(scale, max((abs(c) for c in raw.values()), default=0.0))
        threshold = ZERO_RTOL * scale
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", {e: c for e, c in raw.items() if abs(c) > threshold})

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables)

    @classmethod
    def const(cls, variables: Sequence[str], value: complex) -> "MultiPoly":
        n = len(tuple(variables))
        return cls(variables, {(0,) * n: value})

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"{name!r} is not among {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1.0})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Iterable[int], coeff: complex = 1.0) -> "MultiPoly":
        return cls(variables, {tuple(exps): coeff})

    # -- predicates and views ---------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Degree of the polynomial; the zero polynomial reports -1."""
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, exps: Iterable[int]) -> complex:
        return self.terms.get(tuple(exps), 0.0 + 0.0j)

    def max_coeff_modulus(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def sorted_terms(self) -> list[tuple[Exponents, complex]]:
        """Terms in descending graded-lexicographic order (leading first)."""
        return sorted(self.terms.items(), key=lambda item: _grlex_key(item[0]), reverse=True)

    def leading_term(self) -> tuple[Exponents, complex]:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        exps = max(self.terms, key=_grlex_key)
        return exps, self.terms[exps]

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, float, complex)):
            return MultiPoly.const(self.variables, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, 0.0) + c
        return MultiPoly(self.variables, merged,
                         scale=max(self.max_coeff_modulus(), other.max_coeff_modulus()))

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.__add__(-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self).__add__(other)

    def __mul__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Exponents, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MultiPoly(self.variables, out,
                         scale=self.max_coeff_modulus() * other.max_coeff_modulus())

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        acc = MultiPoly.const(self.variables, 1.0)
        for _ in range(n):
            acc = acc * self
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    # -- evaluation and composition -----------------------------------------

    def evaluate(self, point: Mapping[str, complex]) -> complex:
        """Evaluate at a complex point, summing in normalized term order."""
        missing = [v for v in self.variables if v not in point]
        if missing:
            raise KeyError(f"no value supplied for {missing}")
        maxdeg = [0] * len(self.variables)
        for e in self.terms:
            for i, d in enumerate(e):
                maxdeg[i] = max(maxdeg[i], d)
        powers = []
        for i, v in enumerate(self.variables):
            base = complex(point[v])
            row = [1.0 + 0.0j]
            for _ in range(maxdeg[i]):
                row.append(row[-1] * base)
            powers.append(row)
        acc = 0.0 + 0.0j
        for exps, c in self.sorted_terms():
            term = complex(c)
            for i, d in enumerate(exps):
                if d:
                    term *= powers[i][d]
            acc += term
        return acc

    def lift(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-embed into a (super)set of variables, preserving terms."""
        variables = tuple(variables)
        idx = []
        for v in self.variables:
            if v not in variables:
                raise ValueError(f"cannot lift: {v!r} missing from {variables}")
            idx.append(variables.index(v))
        out: dict[Exponents, complex] = {}
        for exps, c in self.terms.items():
            e = [0] * len(variables)
            for i, d in enumerate(exps):
                e[idx[i]] = d
            key = tuple(e)
            out[key] = out.get(key, 0.0) + c
        return MultiPoly(variables, out)

    def substitute(self, bindings: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Compose with polynomial bindings; unbound variables pass through.

        All binding values must share one variable tuple, which becomes the
        variable tuple of the result; unbound variables of ``self`` must be
        members of it.
        """
        if not bindings:
            return self
        target: tuple[str, ...] | None = None
        for name, value in bindings.items():
            if name not in self.variables:
                raise ValueError(f"binding for {name!r} which is not a variable of {self.variables}")
            if target is None:
                target = value.variables
            elif value.variables != target:
                raise ValueError("all bindings must share one variable tuple")
        assert target is not None
        maxdeg = [0] * len(self.variables)
        for e in self.terms:
            for i, d in enumerate(e):
                maxdeg[i] = max(maxdeg[i], d)
        base: list[MultiPoly | None] = []
        for i, v in enumerate(self.variables):
            if maxdeg[i] == 0:
                base.append(None)
            elif v in bindings:
                base.append(bindings[v])
            elif v in target:
                base.append(MultiPoly.var(target, v))
            else:
                raise ValueError(f"unbound variable {v!r} absent from target variables {target}")
        powers: list[list[MultiPoly]] = []
        for i in range(len(self.variables)):
            row = [MultiPoly.const(target, 1.0)]
            for _ in range(maxdeg[i]):
                row.append(row[-1] * base[i])
            powers.append(row)
        acc = MultiPoly.zero(target)
        for exps, c in self.sorted_terms():
            term = MultiPoly.const(target, c)
            for i, d in enumerate(exps):
                if d:
                    term = term * powers[i][d]
            acc = acc + term
        return acc

    # -- printing ------------------------------------------------------------

    def pretty(self) -> str:
        """Render in the expression grammar; ``parse_poly`` inverts this."""
        if not self.terms:
            return "0"
        chunks: list[str] = []
        for i, (exps, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                v if d == 1 else f"{v}^{d}"
                for v, d in zip(self.variables, exps) if d
            )
            sign = ""
            if (c.imag == 0.0 and c.real < 0) or (c.real == 0.0 and c.imag < 0):
                sign, c = "-", -c
            coeff = _format_complex(c)
            if mono and coeff == "1":
                body = mono
            elif mono:
                body = f"{coeff}*{mono}"
            else:
                body = coeff
            if i == 0:
                chunks.append(f"-{body}" if sign else body)
            else:
                chunks.append(f" - {body}" if sign else f" + {body}")
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"MultiPoly({self.variables!r}, {self.pretty()!r})"


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _format_complex(c: complex) -> str:
    if c.imag == 0.0:
        return _format_real(c.real)
    if c.real == 0.0:
        return _format_real(c.imag) + "i"
    sign = "+" if c.imag > 0 else "-"
    return f"({_format_real(c.real)}{sign}{_format_real(abs(c.imag))}i)"


def exact_div(p: MultiPoly, d: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Divide ``p`` by ``d`` under the graded-lexicographic order.

    Returns ``(q, r)`` with ``p = q*d + r`` and no term of ``r`` divisible by
    the leading term of ``d``.  For ``d = x1 - x2`` the remainder vanishes
    exactly when ``p`` vanishes on the diagonal ``x1 = x2``.
    """
    if d.variables != p.variables:
        raise ValueError(f"variable mismatch: {p.variables} vs {d.variables}")
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lt_e, lt_c = d.leading_term()
    scale = max(p.max_coeff_modulus(), d.max_coeff_modulus(), 1e-300)
    q: dict[Exponents, complex] = {}
    r: dict[Exponents, complex] = {}
    f = dict(p.terms)
    guard = 0
    while f:
        guard += 1
        if guard > 200_000:  # cannot happen for well-formed input; at worst dust
            raise RuntimeError("division failed to terminate")
        fe = max(f, key=_grlex_key)
        fc = f.pop(fe)
        if all(a >= b for a, b in zip(fe, lt_e)):
            te = tuple(a - b for a, b in zip(fe, lt_e))
            tc = fc / lt_c
            q[te] = q.get(te, 0.0) + tc
            for e2, c2 in d.terms.items():
                if e2 == lt_e:
                    continue
                e = tuple(a + b for a, b in zip(te, e2))
                c = f.get(e, 0.0) - tc * c2
                scale = max(scale, abs(c))
                if abs(c) > ZERO_RTOL * scale:
                    f[e] = c
                elif e in f:
                    del f[e]
        else:
            r[fe] = fc
    return (MultiPoly(p.variables, q, scale=scale),
            MultiPoly(p.variables, r, scale=scale))
