import cmath
import math
import random

import numpy as np
import pytest

from rootflow.elliptic import EllipticError, EllipticPoleError, sn, sn_with_prime
from rootflow.oracle import OdeProblem, integrate

# frozen via the independent (sn, cn, dn) integration oracle below
SN_HALF_HALF = 0.47508293602853646


def sn_by_ode(z, k, rtol=1e-12):
    """Independent oracle: integrate (sn, cn, dn)' = (c*d, -s*d, -k^2*s*c)
    from (0, 1, 1) along the ray to z."""
    r = abs(z)
    if r == 0:
        return 0.0 + 0.0j
    direction = z / r

    def rhs(t, y):
        s, c, d = y
        return (direction * c * d, -direction * s * d, -direction * k * k * s * c)

    res = integrate(OdeProblem(rhs, (0.0, 1.0, 1.0), (0.0, r), rtol=rtol, atol=rtol), [r])
    assert res.ok
    return res.states[-1][0]


class TestDegenerations:
    def test_k_zero_is_sin(self):
        for z in np.linspace(-2, 2, 21):
            assert abs(sn(z, 0.0) - math.sin(z)) < 1e-12

    def test_k_one_is_tanh(self):
        for z in np.linspace(-2, 2, 21):
            assert abs(sn(z, 1.0) - math.tanh(z)) < 1e-12

    def test_complex_arguments_degenerate_too(self):
        rng = random.Random(1)
        for _ in range(20):
            z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            assert abs(sn(z, 0.0) - cmath.sin(z)) < 1e-12
            assert abs(sn(z, 1.0) - cmath.tanh(z)) < 1e-12


class TestAgainstOdeOracle:
    def test_frozen_value(self):
        assert abs(sn(0.5, 0.5) - SN_HALF_HALF) < 1e-10

    def test_half_half_live_oracle(self):
        assert abs(sn(0.5, 0.5) - sn_by_ode(0.5, 0.5)) < 1e-10

    def test_random_complex_arguments_and_moduli(self):
        rng = random.Random(31)
        for _ in range(20):
            z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-0.8, 0.8))
            k = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.4, 0.4))
            if abs(k) > 0.9:
                k = 0.9 * k / abs(k)
            if abs(z) < 0.05:
                continue
            assert abs(sn(z, k) - sn_by_ode(z, k)) < 1e-10


class TestProperties:
    def test_oddness(self):
        rng = random.Random(7)
        for _ in range(25):
            z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            k = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.5, 0.5))
            assert abs(sn(-z, k) + sn(z, k)) < 1e-12

    def test_first_integral(self):
        # (sn')^2 = (1 - sn^2)(1 - k^2 sn^2)
        rng = random.Random(9)
        for _ in range(25):
            z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            k = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.5, 0.5))
            s, d = sn_with_prime(z, k)
            assert abs(d * d - (1 - s * s) * (1 - k * k * s * s)) < 1e-12 * max(1.0, abs(s) ** 4)

    def test_derivative_by_centered_differences_order_two(self):
        k = 0.6 - 0.2j
        z0 = 0.8 + 0.3j

        def resid(h):
            fd = (sn(z0 + h, k) - sn(z0 - h, k)) / (2 * h)
            return abs(fd - sn_with_prime(z0, k)[1])

        r1, r2 = resid(1e-3), resid(5e-4)
        assert r1 / r2 == pytest.approx(4.0, rel=0.2)

    def test_near_unit_modulus_window_is_seamless(self):
        # Landen just outside the k^2 ~ 1 routing window agrees with the
        # hyperbolic branch inside it
        for eps in (1e-7, 2e-8):
            k_out = cmath.sqrt(1 - eps)
            k_in = cmath.sqrt(1 - 1e-9)
            assert abs(sn(0.7, k_out) - sn(0.7, k_in)) < 1e-6  # continuity in k
        assert abs(sn(0.7, cmath.sqrt(1 - 2e-8)) - sn_by_ode(0.7, cmath.sqrt(1 - 2e-8))) < 1e-10

    def test_large_modulus_descends(self):
        # |k| > 1 converges too (one stalled iterate, then contraction)
        k = 2.0
        s, d = sn_with_prime(0.3, k)
        assert abs(d * d - (1 - s * s) * (1 - k * k * s * s)) < 1e-12
        assert abs(sn(0.3, 2.0) - sn_by_ode(0.3, 2.0)) < 1e-10


class TestPoles:
    def test_pole_of_tanh_branch(self):
        with pytest.raises(EllipticPoleError) as err:
            sn(1j * math.pi / 2, 1.0)
        assert err.value.pole_estimate == pytest.approx(1j * math.pi / 2)

    def test_pole_detected_by_divergence(self):
        # sn(z, k) has a pole at z = i K'(k); for k = 0.5, K'(0.5) ~ 2.1565
        kprime_quarter = 2.156515647499643
        with pytest.raises((EllipticPoleError, EllipticError)):
            sn(1j * kprime_quarter, 0.5)

    def test_pole_estimate_points_at_pole(self):
        kprime_quarter = 2.156515647499643
        z = 1j * (kprime_quarter + 1e-14)
        try:
            sn(z, 0.5)
        except EllipticPoleError as err:
            assert abs(err.pole_estimate - 1j * kprime_quarter) < 1e-6
        else:  # close enough to diverge past the magnitude guard
            assert abs(sn(z, 0.5)) > 1e10
