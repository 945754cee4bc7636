"""Maps between polynomial roots and coefficients, and velocity identities.

Two configurations are supported:

* ``GENERIC2``: a monic quadratic ``z^2 + y1*z + y2`` with roots ``x1, x2``.
* ``DOUBLE_ZERO3``: a monic cubic ``(z - x1)^2 (z - x2)`` whose double zero
  ``x1`` persists for all time, with coefficients ``y1, y2, y3``.

Root extraction is permutation-blind, so labels are assigned by continuity:
nearest-neighbour matching against the previous state, with a distance-ratio
guard that forces the caller to refine the time step when the matching gets
ambiguous.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from typing import Mapping

COLLISION_RTOL = 1e-9
ORIGIN_RTOL = 1e-9
P3_RESIDUAL_RTOL = 1e-8
AMBIGUITY_RATIO = 2.0


class Config(enum.Enum):
    GENERIC2 = "generic2"
    DOUBLE_ZERO3 = "double_zero3"


class Pair(enum.Enum):
    """Which two coefficients drive the dynamics."""
    Y12 = "y12"
    Y13 = "y13"
    Y23 = "y23"


class AmbiguousLabelingError(ValueError):
    """Continuity matching cannot decide labels; refine the time step."""


class CollisionError(ZeroDivisionError):
    """Roots too close (or the double zero too close to the origin) for the
    velocity formulas' denominators."""


class InconsistentCoeffsError(ValueError):
    """No root of the derivative polynomial is also a root of the cubic: the
    coefficient state does not describe a double-zero configuration."""


@dataclass(frozen=True)
class CoeffState:
    config: Config
    values: Mapping[str, complex]

    def __post_init__(self):
        names = ("y1", "y2") if self.config is Config.GENERIC2 else ("y1", "y2", "y3")
        vals = {k: complex(self.values[k]) for k in names}
        object.__setattr__(self, "values", vals)

    def __getitem__(self, name: str) -> complex:
        return self.values[name]


@dataclass(frozen=True)
class RootState:
    """Labelled roots; in DOUBLE_ZERO3 ``x1`` is the double zero."""

    config: Config
    x1: complex
    x2: complex
    ambiguous: bool = False

    def gap(self) -> float:
        return abs(self.x1 - self.x2)

    def collision_tol(self) -> float:
        return COLLISION_RTOL * max(1.0, abs(self.x1), abs(self.x2))


def roots_to_coeffs(r: RootState) -> CoeffState:
    x1, x2 = r.x1, r.x2
    if r.config is Config.GENERIC2:
        return CoeffState(Config.GENERIC2, {"y1": -(x1 + x2), "y2": x1 * x2})
    return CoeffState(Config.DOUBLE_ZERO3, {
        "y1": -(2.0 * x1 + x2),
        "y2": x1 * (x1 + 2.0 * x2),
        "y3": -(x1 * x1) * x2,
    })


def coeffs_to_ydots(r: RootState, xdot1: complex, xdot2: complex) -> dict[str, complex]:
    """Coefficient velocities induced by root velocities (chain rule)."""
    x1, x2 = r.x1, r.x2
    if r.config is Config.GENERIC2:
        return {"y1": -(xdot1 + xdot2), "y2": xdot1 * x2 + x1 * xdot2}
    return {
        "y1": -(2.0 * xdot1 + xdot2),
        "y2": 2.0 * (x1 + x2) * xdot1 + 2.0 * x1 * xdot2,
        "y3": -2.0 * x1 * x2 * xdot1 - x1 * x1 * xdot2,
    }


def solve_quadratic(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``z^2 + b z + c`` via the cancellation-safe formula."""
    disc = b * b - 4.0 * c
    sq = cmath.sqrt(disc)
    # pick the sign that avoids cancellation in -b -/+ sq
    if (b.conjugate() * sq).real > 0.0:
        sq = -sq
    q = (-b + sq) / 2.0
    if q == 0.0:
        return 0.0 + 0.0j, -b
    return q, c / q


def solve_monic_cubic(a2: complex, a1: complex, a0: complex) -> tuple[complex, complex, complex]:
    """Roots of ``z^3 + a2 z^2 + a1 z + a0`` (Cardano plus Newton polish)."""
    shift = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    sq = cmath.sqrt(disc)
    u3 = -q / 2.0 + sq
    if abs(u3) < abs(-q / 2.0 - sq):
        u3 = -q / 2.0 - sq
    if u3 == 0.0:
        roots = [-shift, -shift, -shift]
    else:
        u = u3 ** (1.0 / 3.0)
        w = complex(-0.5, 0.8660254037844386)  # primitive cube root of unity
        roots = []
        for uk in (u, u * w, u * w.conjugate()):
            v = -p / (3.0 * uk)
            roots.append(uk + v - shift)
    polished = []
    for z in roots:
        for _ in range(2):
            f = ((z + a2) * z + a1) * z + a0
            df = (3.0 * z + 2.0 * a2) * z + a1
            if df != 0.0:
                step = f / df
                if abs(step) < 1.0 + abs(z):
                    z = z - step
        polished.append(z)
    return tuple(polished)  # type: ignore[return-value]


def _canonical_pair(a: complex, b: complex) -> tuple[complex, complex]:
    return (a, b) if (a.real, a.imag) <= (b.real, b.imag) else (b, a)


def _match_two(a: complex, b: complex, prev1: complex, prev2: complex) -> tuple[complex, complex]:
    """Assign {a, b} to labels (1, 2) by total-distance-minimizing pairing."""
    d_keep = abs(a - prev1) + abs(b - prev2)
    d_swap = abs(a - prev2) + abs(b - prev1)
    lo, hi = min(d_keep, d_swap), max(d_keep, d_swap)
    if lo == 0.0:
        if hi == 0.0 and a != b:
            raise AmbiguousLabelingError("both pairings are exact")
    elif hi / lo < AMBIGUITY_RATIO:
        raise AmbiguousLabelingError(
            f"pairing distance ratio {hi / lo:.3f} < {AMBIGUITY_RATIO}; refine the step")
    return (a, b) if d_keep <= d_swap else (b, a)


def _select_by_continuity(cands: list[complex], prev: complex) -> complex:
    """Nearest candidate, guarded by the distance ratio to the runner-up."""
    ranked = sorted(cands, key=lambda z: abs(z - prev))
    if len(ranked) > 1:
        d0, d1 = abs(ranked[0] - prev), abs(ranked[1] - prev)
        if d0 > 0.0 and d1 / d0 < AMBIGUITY_RATIO:
            raise AmbiguousLabelingError(
                f"candidate distance ratio {d1 / d0:.3f} < {AMBIGUITY_RATIO}; refine the step")
        if d0 == 0.0 and d1 == 0.0:
            raise AmbiguousLabelingError("coincident candidates")
    return ranked[0]


def coeffs_to_roots(c: CoeffState, previous: RootState | None = None) -> RootState:
    """Recover the labelled roots of the full coefficient state.

    GENERIC2 solves the quadratic directly.  DOUBLE_ZERO3 solves the
    derivative quadratic ``3x^2 + 2 y1 x + y2`` for the double-zero
    candidates and keeps the one annihilating the cubic itself.
    """
    if c.config is Config.GENERIC2:
        y1, y2 = c["y1"], c["y2"]
        ra, rb = solve_quadratic(y1, y2)
        if previous is not None:
            x1, x2 = _match_two(ra, rb, previous.x1, previous.x2)
            return RootState(Config.GENERIC2, x1, x2)
        x1, x2 = _canonical_pair(ra, rb)
        tol = COLLISION_RTOL * max(1.0, abs(x1), abs(x2))
        return RootState(Config.GENERIC2, x1, x2, ambiguous=abs(x1 - x2) <= tol)

    y1, y2, y3 = c["y1"], c["y2"], c["y3"]
    ca, cb = solve_quadratic(2.0 * y1 / 3.0, y2 / 3.0)
    scale = max(1.0, abs(y1), abs(y2), abs(y3))

    def p3(x: complex) -> complex:
        return ((x + y1) * x + y2) * x + y3

    passing = [x for x in (ca, cb) if abs(p3(x)) <= P3_RESIDUAL_RTOL * scale * max(1.0, abs(x) ** 3)]
    if not passing:
        raise InconsistentCoeffsError(
            f"no double zero: |p3| residuals {[abs(p3(ca)), abs(p3(cb))]} exceed tolerance")
    if len(passing) == 1:
        x1 = passing[0]
    elif previous is not None:
        x1 = _select_by_continuity(passing, previous.x1)
    else:
        x1 = min(passing, key=lambda x: (abs(p3(x)), x.real, x.imag))
    x2 = -y1 - 2.0 * x1
    return RootState(Config.DOUBLE_ZERO3, x1, x2)


def roots_from_pair(config: Config, pair: Pair, yvals: Mapping[str, complex],
                    previous: RootState) -> RootState:
    """Recover roots from the two evolved coefficients of a pair family.

    Each family determines ``x1`` as a root of a small polynomial (their
    eliminant), selected by continuity from ``previous``; ``x2`` follows
    algebraically.
    """
    if config is Config.GENERIC2:
        if pair is not Pair.Y12:
            raise ValueError("GENERIC2 only supports the Y12 pair")
        st = coeffs_to_roots(CoeffState(config, dict(yvals)), previous)
        return st
    if pair is Pair.Y12:
        y1, y2 = complex(yvals["y1"]), complex(yvals["y2"])
        ca, cb = solve_quadratic(2.0 * y1 / 3.0, y2 / 3.0)
        x1 = _select_by_continuity([ca, cb], previous.x1)
        x2 = -y1 - 2.0 * x1
    elif pair is Pair.Y13:
        y1, y3 = complex(yvals["y1"]), complex(yvals["y3"])
        # eliminate x2 = -y1 - 2 x1 from y3 = -x1^2 x2: 2 x1^3 + y1 x1^2 - y3 = 0
        cands = solve_monic_cubic(y1 / 2.0, 0.0, -y3 / 2.0)
        x1 = _select_by_continuity(list(cands), previous.x1)
        x2 = -y1 - 2.0 * x1
    elif pair is Pair.Y23:
        y2, y3 = complex(yvals["y2"]), complex(yvals["y3"])
        # eliminate x2 = -y3/x1^2 from y2 = x1(x1 + 2 x2): x1^3 - y2 x1 - 2 y3 = 0
        cands = solve_monic_cubic(0.0, -y2, -2.0 * y3)
        x1 = _select_by_continuity(list(cands), previous.x1)
        if abs(x1) <= ORIGIN_RTOL * max(1.0, abs(x1), abs(previous.x2)):
            raise CollisionError("double zero at the origin: x2 = -y3/x1^2 undefined")
        x2 = -y3 / (x1 * x1)
    else:  # pragma: no cover
        raise ValueError(pair)
    return RootState(Config.DOUBLE_ZERO3, x1, x2)


def xdot_from_ydot(r: RootState, ydot: Mapping[str, complex], pair: Pair) -> tuple[complex, complex]:
    """Root velocities induced by coefficient velocities.

    GENERIC2 uses the two-zero identity; DOUBLE_ZERO3 has one formula pair
    per coefficient pair, with denominators ``x1 - x2`` and powers of ``x1``.
    """
    x1, x2 = r.x1, r.x2
    gap = x1 - x2
    if abs(gap) <= r.collision_tol():
        raise CollisionError(f"|x1 - x2| = {abs(gap):.3e} below collision tolerance")

    if r.config is Config.GENERIC2:
        if pair is not Pair.Y12:
            raise ValueError("GENERIC2 only supports the Y12 pair")
        yd1, yd2 = complex(ydot["y1"]), complex(ydot["y2"])
        xd1 = -(x1 * yd1 + yd2) / gap
        xd2 = (x2 * yd1 + yd2) / gap
        return xd1, xd2

    if pair is Pair.Y12:
        yd1, yd2 = complex(ydot["y1"]), complex(ydot["y2"])
        xd1 = -(2.0 * x1 * yd1 + yd2) / (2.0 * gap)
        xd2 = ((x1 + x2) * yd1 + yd2) / gap
        return xd1, xd2

    if abs(x1) <= ORIGIN_RTOL * max(1.0, abs(x1), abs(x2)):
        raise CollisionError(f"|x1| = {abs(x1):.3e} below origin tolerance")

    if pair is Pair.Y13:
        yd1, yd3 = complex(ydot["y1"]), complex(ydot["y3"])
        xd1 = -(x1 * x1 * yd1 - yd3) / (2.0 * x1 * gap)
        xd2 = (x1 * x2 * yd1 - yd3) / (x1 * gap)
        return xd1, xd2

    if pair is Pair.Y23:
        yd2, yd3 = complex(ydot["y2"]), complex(ydot["y3"])
        xd1 = (x1 * yd2 + 2.0 * yd3) / (2.0 * x1 * gap)
        xd2 = -(x1 * x2 * yd2 + (x1 + x2) * yd3) / (x1 * x1 * gap)
        return xd1, xd2

    raise ValueError(pair)  # pragma: no cover
