"""Independent adaptive integrator: the ground truth for every closed form.

An embedded Dormand-Prince 5(4) pair with proportional-integral step control
integrates complex systems componentwise (error norm: RMS over all 2n real
components) and produces dense output at requested sample times through the
pair's 4th-order interpolant.

This module must stay independent of the closed-form machinery: it imports
nothing from ``elliptic``, ``ysolve`` or ``pipeline``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from . import _backend, _purekernel
from .poly import MultiPoly

STATUS_NAMES = {
    _purekernel.STATUS_OK: "ok",
    _purekernel.STATUS_STEP_UNDERFLOW: "step_underflow",
    _purekernel.STATUS_NONFINITE: "nonfinite_rhs",
    _purekernel.STATUS_MAX_STEPS: "max_steps",
}


class PolyVectorField:
    """Autonomous square system ``dy_i/dt = P_i(y)`` of complex polynomials.

    Kept in flattened term arrays (normalized term order) so the compiled
    kernel and the pure fallback see exactly the same data.
    """

    def __init__(self, polys: Sequence[MultiPoly]):
        polys = tuple(polys)
        if not polys:
            raise ValueError("empty system")
        variables = polys[0].variables
        for p in polys:
            if p.variables != variables:
                raise ValueError("all components must share one variable tuple")
        if len(polys) != len(variables):
            raise ValueError(f"{len(polys)} equations for {len(variables)} variables")
        self.polys = polys
        self.variables = variables
        self.nvars = len(variables)
        offs = [0]
        coeffs: list[complex] = []
        exps: list[int] = []
        for p in polys:
            for e, c in p.sorted_terms():
                coeffs.append(complex(c))
                exps.extend(e)
            offs.append(len(coeffs))
        self.offs = offs
        self.coeffs = coeffs
        self.exps = exps

    def __call__(self, t: float, y: Sequence[complex]) -> tuple[complex, ...]:
        out = [0j] * self.nvars
        _purekernel.eval_poly_rhs(self.nvars, self.offs, self.coeffs, self.exps,
                                  list(y), out)
        return tuple(out)


RhsCallable = Callable[[float, tuple[complex, ...]], Sequence[complex]]


@dataclass(frozen=True)
class OdeProblem:
    """An initial value problem for a complex first-order system."""

    rhs: PolyVectorField | RhsCallable
    y0: tuple[complex, ...]
    t_span: tuple[float, float]
    rtol: float = 1e-10
    atol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "y0", tuple(complex(v) for v in self.y0))
        if len(self.y0) < 1:
            raise ValueError("dimension must be >= 1")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be > 0")
        t0, t1 = self.t_span
        if not (math.isfinite(t0) and math.isfinite(t1) and t1 > t0):
            raise ValueError(f"invalid time span {self.t_span}")


@dataclass(frozen=True)
class IntegrationEvent:
    time: float
    kind: str
    detail: str = ""


@dataclass(frozen=True)
class IntegrationResult:
    """Samples up to the first failure (if any); ``status == 'ok'`` means all
    requested times were reached."""

    times: tuple[float, ...]
    states: tuple[tuple[complex, ...], ...]
    status: str
    t_reached: float
    events: tuple[IntegrationEvent, ...] = ()
    n_accepted: int = 0
    n_rejected: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def integrate(problem: OdeProblem, sample_times: Sequence[float],
              max_steps: int = 2_000_000, force_pure: bool = False) -> IntegrationResult:
    """Integrate and sample; truncates with an event on step underflow or a
    non-finite right-hand side instead of raising."""
    t0, t1 = problem.t_span
    ts = [float(t) for t in sample_times]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ValueError("sample times must be ascending")
    if ts and (ts[0] < t0 - 1e-12 or ts[-1] > t1 + 1e-12):
        raise ValueError("sample times must lie within the time span")

    if isinstance(problem.rhs, PolyVectorField):
        f = problem.rhs
        samples, status, t_reached, na, nr = _backend.integrate_poly_arrays(
            f.nvars, f.offs, f.coeffs, f.exps, problem.y0, t0, t1,
            problem.rtol, problem.atol, ts, max_steps, force_pure=force_pure)
    else:
        f = problem.rhs

        def rhs(t, y, out):
            vals = f(t, tuple(y))
            for c in range(len(out)):
                out[c] = complex(vals[c])

        samples, _nf, status, t_reached, na, nr = _purekernel.integrate_core(
            rhs, list(problem.y0), t0, t1, problem.rtol, problem.atol, ts, max_steps)

    name = STATUS_NAMES[status]
    events = ()
    if name != "ok":
        events = (IntegrationEvent(time=t_reached, kind=name),)
    return IntegrationResult(
        times=tuple(ts[: len(samples)]),
        states=tuple(tuple(s) for s in samples),
        status=name,
        t_reached=t_reached,
        events=events,
        n_accepted=na,
        n_rejected=nr,
    )


@dataclass(frozen=True)
class FiniteDifferenceReport:
    max_residual: float
    max_residual_halved: float
    observed_order: float


def finite_difference_check(fn: Callable[[float], complex],
                            claimed_derivative: Callable[[float], complex],
                            grid: Sequence[float], h: float) -> FiniteDifferenceReport:
    """Centered-difference residual of a claimed derivative, at h and h/2.

    ``observed_order`` is ``log2(residual(h) / residual(h/2))``; a correct
    derivative shows order ~2.
    """
    def max_resid(step: float) -> float:
        worst = 0.0
        for t in grid:
            fd = (fn(t + step) - fn(t - step)) / (2.0 * step)
            worst = max(worst, abs(fd - claimed_derivative(t)))
        return worst

    r1 = max_resid(h)
    r2 = max_resid(h / 2.0)
    if r2 == 0.0:
        order = math.inf if r1 > 0 else 0.0
    else:
        order = math.log2(r1 / r2)
    return FiniteDifferenceReport(r1, r2, order)
