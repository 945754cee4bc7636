"""Transformations of the synthesized systems: affine reparametrization,
the isochrony substitution, and the real two-vector reformulation.

Affine: with x = u0 + U*xi the velocity field transports as
xi' = U^{-1} P(u0 + U*xi), which stays polynomial; for the first example the
transported coefficients also have closed forms (checked term-by-term
against the generic substitution in the tests).

Isochrony: a system with p-homogeneous right-hand side f(c*x) = c^p f(x)
maps, under

    w(t) = exp(alpha*t/(p-1)) * x(tau(t)),   tau(t) = (exp(alpha*t) - 1)/alpha,

to the autonomous system w' = alpha/(p-1)*w + f(w); for imaginary alpha all
its solutions are periodic with an integer multiple of T = 2*pi/|omega|.

Vector form: complex states become real 2-vectors r_n = (Re x_n, Im x_n)
with a' = (Re a, Im a) and b' = (Re b, -Im b); the quadratic example-1 field
then takes a covariant dot-product form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .generator import XSystem
from .oracle import OdeProblem, PolyVectorField, integrate
from .poly import MultiPoly

Vec2 = tuple[float, float]

_XI = ("xi1", "xi2")


class HomogeneityError(ValueError):
    pass


@dataclass(frozen=True)
class AffineMap:
    """x1 = u10 + u11*xi1 + u12*xi2,  x2 = u20 + u21*xi1 + u22*xi2."""

    u10: complex
    u20: complex
    u11: complex
    u12: complex
    u21: complex
    u22: complex

    @property
    def det(self) -> complex:
        return self.u11 * self.u22 - self.u12 * self.u21

    def __post_init__(self):
        if self.det == 0:
            raise ValueError("affine map must be invertible")

    def forward(self, xi1: complex, xi2: complex) -> tuple[complex, complex]:
        return (self.u10 + self.u11 * xi1 + self.u12 * xi2,
                self.u20 + self.u21 * xi1 + self.u22 * xi2)

    def inverse(self, x1: complex, x2: complex) -> tuple[complex, complex]:
        u = self.det
        d1, d2 = x1 - self.u10, x2 - self.u20
        return ((self.u22 * d1 - self.u12 * d2) / u,
                (-self.u21 * d1 + self.u11 * d2) / u)

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(0.0, 0.0, 1.0, 0.0, 0.0, 1.0)


def affine_transform_system(xs: XSystem, m: AffineMap) -> XSystem:
    """Substitute x = u0 + U*xi and apply U^{-1} to the velocity field."""
    xi1 = MultiPoly.var(_XI, "xi1")
    xi2 = MultiPoly.var(_XI, "xi2")
    v1, v2 = xs.variables
    bind = {
        v1: MultiPoly.const(_XI, m.u10) + m.u11 * xi1 + m.u12 * xi2,
        v2: MultiPoly.const(_XI, m.u20) + m.u21 * xi1 + m.u22 * xi2,
    }
    p1s = xs.p1.substitute(bind)
    p2s = xs.p2.substitute(bind)
    u = m.det
    q1 = (m.u22 / u) * p1s + (-m.u12 / u) * p2s
    q2 = (-m.u21 / u) * p1s + (m.u11 / u) * p2s
    return XSystem(q1, q2)


def example1_affine_coeffs(a: complex, b: complex, m: AffineMap) -> dict[str, complex]:
    """Closed-form coefficients of the transported example-1 system,

        xi_n' = A_n + B_n1 xi1 + B_n2 xi2 + C_n1 xi1^2 + C_n2 xi2^2 + C_n3 xi1 xi2.

    The second row carries an overall sign relative to its published form,
    which traces to a sign slip in the printed inverse change of variables;
    the identity map must reproduce the untransformed system (A2 = a etc.),
    which pins the sign used here.
    """
    u = m.det
    u10, u20 = m.u10, m.u20
    us = {(1, 1): m.u11, (1, 2): m.u12, (2, 1): m.u21, (2, 2): m.u22}

    def row(sa: complex, sb: complex, sign: float) -> dict[str, complex]:
        # sa, sb: the (u_{.2} - u_{.2}) style combinations for this row
        out = {}
        out["A"] = sign * (sa * (a - 4 * b * u10 * u20) + b * sb * (u10 ** 2 - u20 ** 2)) / u
        for n in (1, 2):
            u1n, u2n = us[(1, n)], us[(2, n)]
            out[f"B{n}"] = sign * 2 * b * (-2 * sa * (u10 * u2n + u20 * u1n)
                                           + sb * (u10 * u1n - u20 * u2n)) / u
            out[f"C{n}"] = sign * b * (-4 * sa * u1n * u2n + sb * (u1n ** 2 - u2n ** 2)) / u
        out["C3"] = sign * 2 * b * (-2 * sa * (m.u11 * m.u22 + m.u12 * m.u21)
                                    + sb * (m.u11 * m.u12 - m.u21 * m.u22)) / u
        return out

    # row 1: differences (u22 - u12), sums (u22 + u12); row 2 mirrors with
    # the first-column entries and the corrective overall sign
    r1 = row(m.u22 - m.u12, m.u22 + m.u12, +1.0)
    r2 = row(m.u21 - m.u11, m.u21 + m.u11, -1.0)
    return {
        "A1": r1["A"], "B11": r1["B1"], "B12": r1["B2"],
        "C11": r1["C1"], "C12": r1["C2"], "C13": r1["C3"],
        "A2": r2["A"], "B21": r2["B1"], "B22": r2["B2"],
        "C21": r2["C1"], "C22": r2["C2"], "C23": r2["C3"],
    }


def affine_coeffs_from_system(xs: XSystem) -> dict[str, complex]:
    """Read the quadratic-system coefficients out of a transformed XSystem."""
    out = {}
    for n, p in ((1, xs.p1), (2, xs.p2)):
        out[f"A{n}"] = p.coefficient((0, 0))
        out[f"B{n}1"] = p.coefficient((1, 0))
        out[f"B{n}2"] = p.coefficient((0, 1))
        out[f"C{n}1"] = p.coefficient((2, 0))
        out[f"C{n}2"] = p.coefficient((0, 2))
        out[f"C{n}3"] = p.coefficient((1, 1))
    return out


# ---------------------------------------------------------------------------
# isochrony


@dataclass(frozen=True)
class IsochronySetup:
    """Rotation rate and homogeneity degree for the isochrony substitution."""

    alpha: complex
    p: int | Fraction

    def __post_init__(self):
        p = Fraction(self.p)
        if p == 1:
            raise ValueError("homogeneity degree p = 1 is excluded")
        object.__setattr__(self, "p", p)

    @property
    def omega(self) -> float:
        if abs(self.alpha.real) > 1e-12 * max(1.0, abs(self.alpha)):
            raise ValueError("period search requires imaginary alpha")
        return self.alpha.imag

    @property
    def base_period(self) -> float:
        w = self.omega
        if w == 0:
            raise ValueError("alpha = 0 has no finite period")
        return 2.0 * math.pi / abs(w)


def homogeneity_check(xs: XSystem, p: int | Fraction) -> bool:
    """True iff every monomial of both components has total degree p."""
    p = Fraction(p)
    degrees = {sum(e) for e in xs.p1.terms} | {sum(e) for e in xs.p2.terms}
    return all(Fraction(d) == p for d in degrees)


def isochronize(xs: XSystem, setup: IsochronySetup) -> XSystem:
    """Shift a p-homogeneous system by the linear term alpha/(p-1)*w."""
    if not homogeneity_check(xs, setup.p):
        raise HomogeneityError(f"system is not homogeneous of degree {setup.p}")
    c = setup.alpha / (float(setup.p) - 1.0)
    v1, v2 = xs.variables
    w1 = MultiPoly.var(xs.variables, v1)
    w2 = MultiPoly.var(xs.variables, v2)
    return XSystem(xs.p1 + c * w1, xs.p2 + c * w2)


@dataclass(frozen=True)
class IsochronyReport:
    closed: bool
    q: int | None
    closure_error: float
    base_period: float
    errors_by_multiple: tuple[float, ...]


def isochrony_report(xs_w: XSystem, setup: IsochronySetup,
                     w0: tuple[complex, complex], q_max: int = 6,
                     tol: float = 1e-6, rtol: float = 1e-10) -> IsochronyReport:
    """Integrate the shifted system over q_max base periods and report the
    smallest multiple at which the trajectory closes."""
    T = setup.base_period
    times = [q * T for q in range(1, q_max + 1)]
    res = integrate(OdeProblem(PolyVectorField([xs_w.p1, xs_w.p2]), w0,
                               (0.0, q_max * T), rtol=rtol, atol=rtol), times)
    errors = []
    scale = max(1.0, abs(w0[0]), abs(w0[1]))
    for s in res.states:
        errors.append(max(abs(s[0] - w0[0]), abs(s[1] - w0[1])) / scale)
    for q, err in enumerate(errors, start=1):
        if err < tol:
            return IsochronyReport(True, q, err, T, tuple(errors))
    return IsochronyReport(False, None, min(errors) if errors else math.inf,
                           T, tuple(errors))


# ---------------------------------------------------------------------------
# real two-vector form


@dataclass(frozen=True)
class VectorState:
    r1: Vec2
    r2: Vec2


def to_vector_form(x1: complex, x2: complex) -> VectorState:
    return VectorState((x1.real, x1.imag), (x2.real, x2.imag))


def from_vector_form(state: VectorState) -> tuple[complex, complex]:
    return (complex(*state.r1), complex(*state.r2))


def coupling_vectors(a: complex, b: complex) -> tuple[Vec2, Vec2]:
    """Parameter vectors of the covariant form: the quadratic coupling
    enters through the conjugate-style vector (Re b, -Im b)."""
    return (a.real, a.imag), (b.real, -b.imag)


def _dot(u: Vec2, v: Vec2) -> float:
    return u[0] * v[0] + u[1] * v[1]


def _axpy(*pairs: tuple[float, Vec2]) -> Vec2:
    x = sum(c * v[0] for c, v in pairs)
    y = sum(c * v[1] for c, v in pairs)
    return (x, y)


def example1_vector_rhs(avec: Vec2, bvec: Vec2, r1: Vec2, r2: Vec2) -> tuple[Vec2, Vec2]:
    """The covariant form of the example-1 field:

        r_n' = a + 2 r_n (b . (r_n - 2 r_m)) - 2 r_m (b . (r_m + 2 r_n))
               + b (|r_m|^2 - |r_n|^2 + 4 r_n . r_m),   m = n+1 mod 2.
    """
    out = []
    pair = (r1, r2)
    for n in range(2):
        rn, rm = pair[n], pair[1 - n]
        s1 = _dot(bvec, (rn[0] - 2 * rm[0], rn[1] - 2 * rm[1]))
        s2 = _dot(bvec, (rm[0] + 2 * rn[0], rm[1] + 2 * rn[1]))
        s3 = _dot(rm, rm) - _dot(rn, rn) + 4 * _dot(rn, rm)
        out.append(_axpy((1.0, avec), (2 * s1, rn), (-2 * s2, rm), (s3, bvec)))
    return out[0], out[1]


def complex_rhs_as_vectors(xs: XSystem, x1: complex, x2: complex) -> tuple[Vec2, Vec2]:
    """Generic reformulation: componentwise real/imaginary parts of the
    complex velocity (used for the families without a published covariant
    form)."""
    v1, v2 = xs.rhs(x1, x2)
    return (v1.real, v1.imag), (v2.real, v2.imag)
