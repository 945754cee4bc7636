"""Jacobi elliptic sn for complex argument and complex modulus.

Algorithm: descending Landen transformation on the modulus,

    k_next = k^2 / (1 + sqrt(1 - k^2))^2,

iterated until ``|k| < 1e-15``; at the base the function is a plain sine,
and the values are carried back up with the Gauss ascent

    sn(z, k) = (1 + k1) s / (1 + k1 s^2),          s = sn(z/(1+k1), k1),
    sn'(z, k) = s' (1 - k1 s^2) / (1 + k1 s^2)^2.

The derivative pair (sn' = cn*dn) rides along so callers never take the
sign-ambiguous square roots for cn and dn.  Square roots use the principal
branch, with the sign re-checked each iterate so the modulus map stays
contracting.

The descent contracts for every modulus except ``k^2 = 1`` exactly (the
recurrence's fixed point); arguments with ``|1 - k^2| < 1e-8`` are routed to
the hyperbolic limit sn(z, 1) = tanh(z) with its first-order correction in
``1 - k^2``, which is accurate to ~1e-15 inside that window.

No reduction to the fundamental period parallelogram is performed: the
intended arguments stay small (a few periods at most); accuracy degrades for
very large ``|Im z|``.
"""

from __future__ import annotations

import cmath

_K_FLOOR = 1e-15
_TANH_WINDOW = 1e-8
_MAX_DESCENT = 64
_POLE_MAGNITUDE = 1e12


class EllipticError(ValueError):
    pass


class EllipticPoleError(EllipticError):
    """The argument fell on (or numerically indistinguishable from) a pole."""

    def __init__(self, message: str, z: complex, pole_estimate: complex):
        super().__init__(f"{message}; nearest pole estimated at {pole_estimate}")
        self.z = z
        self.pole_estimate = pole_estimate


def _descend_moduli(k: complex) -> list[complex]:
    """Landen modulus sequence [k1, k2, ...] down to |k| < 1e-15.

    The sign of sqrt(1 - k^2) selects between the descending and ascending
    transformations; the branch keeping |1 + root| maximal is the contracting
    one (for the principal branch this is automatic, since Re root >= 0).
    """
    seq = []
    cur = k
    for _ in range(_MAX_DESCENT):
        root = cmath.sqrt(1.0 - cur * cur)
        if abs(1.0 + root) < abs(1.0 - root):
            root = -root
        cur = cur * cur / (1.0 + root) ** 2
        if abs(cur) < _K_FLOOR:
            return seq
        seq.append(cur)
    raise EllipticError(f"Landen descent failed to converge for k = {k}")


def _tanh_branch(z: complex, kp2: complex) -> tuple[complex, complex]:
    ch = cmath.cosh(z)
    if abs(ch) < 1e-9:
        raise EllipticPoleError("argument at a pole of the k=1 limit", z,
                               _nearest_tanh_pole(z))
    sh = cmath.sinh(z)
    th = sh / ch
    sech2 = 1.0 / (ch * ch)
    s = th + 0.25 * kp2 * (sh * ch - z) * sech2
    d = sech2 + 0.25 * kp2 * (2.0 * sh * sh - 2.0 * (sh * ch - z) * th) * sech2
    return s, d


def _nearest_tanh_pole(z: complex) -> complex:
    n = round((z.imag - cmath.pi / 2) / cmath.pi)
    return complex(z.real, cmath.pi / 2 + n * cmath.pi)


def sn_with_prime(z: complex, k: complex) -> tuple[complex, complex]:
    """Return ``(sn(z, k), d/dz sn(z, k))``.

    The derivative equals cn*dn with the branch fixed by holomorphic
    continuation from sn(0) = 0, sn'(0) = 1 along the ray from 0.
    """
    z = complex(z)
    k = complex(k)
    if abs(k) < _K_FLOOR:
        return cmath.sin(z), cmath.cos(z)
    kp2 = 1.0 - k * k
    if abs(kp2) < _TANH_WINDOW:
        return _tanh_branch(z, kp2)

    moduli = _descend_moduli(k)
    v = z
    for km in moduli:
        v = v / (1.0 + km)
    try:
        s = cmath.sin(v)
        d = cmath.cos(v)
    except (OverflowError, ValueError) as exc:
        raise EllipticError(f"argument {z} too large for the elliptic kernel") from exc
    for km in reversed(moduli):
        s2 = s * s
        denom = 1.0 + km * s2
        if denom == 0.0:
            raise EllipticPoleError("pole hit during the Gauss ascent", z, z)
        s = (1.0 + km) * s / denom
        d = d * (1.0 - km * s2) / (denom * denom)
    if abs(s) > _POLE_MAGNITUDE:
        est = z - 1.0 / (k * s)
        raise EllipticPoleError(f"|sn| = {abs(s):.2e} diverged", z, est)
    return s, d


def sn(z: complex, k: complex) -> complex:
    """First Jacobi elliptic function for complex argument and modulus.

    Satisfies (sn')^2 = (1 - sn^2)(1 - k^2 sn^2) with sn(0) = 0, sn'(0) = 1;
    degenerates to sin for k = 0 and tanh for k = 1.
    """
    return sn_with_prime(z, k)[0]
