import cmath
import math
import random

import numpy as np
import pytest

from rootflow.oracle import OdeProblem, integrate
from rootflow.ysolve import (
    AnharmonicPath,
    AnharmonicSpec,
    ClosedFormSingularityError,
    DegenerateQuadraticError,
    EllipticParams,
    LinearAnharmonicPath,
    LogisticPath,
    LogisticSpec,
    anharmonic_y,
    fit_elliptic_params,
    logistic_y,
)
from rootflow.elliptic import sn


def unit_disk(rng, rmax=1.0):
    return cmath.rect(math.sqrt(rng.random()) * rmax, rng.uniform(0, 2 * math.pi))


class TestFit:
    def test_zero_initial_data_forces_unit_k_squared(self):
        spec = AnharmonicSpec.for_example(1, -0.7, 0.4)  # beta0 = 0.7 != 0
        params = fit_elliptic_params(spec, 0.0, 0.0)
        assert params.k ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_defining_relations_hold(self):
        spec = AnharmonicSpec.for_example(1, 0.3 - 0.4j, 0.8 + 0.1j)
        y10, y20 = 0.25 + 0.1j, -0.3 + 0.2j
        p = fit_elliptic_params(spec, y10, y20)
        k2 = p.k ** 2
        assert p.lam ** 2 == pytest.approx(-8 * spec.beta0 * spec.beta1 / (1 + k2), rel=1e-10)
        assert p.mu ** 2 == pytest.approx(-2 * spec.beta0 * k2 / (spec.beta1 * (1 + k2)), rel=1e-10)
        assert p.mu * sn(p.rho, p.k) == pytest.approx(y10, rel=1e-10, abs=1e-10)

    def test_round_trips_initial_point(self):
        spec = AnharmonicSpec.for_example(2, -0.5 + 0.2j, 0.6 - 0.3j)
        y10, y20 = 0.4 - 0.2j, 0.1 + 0.5j
        p = fit_elliptic_params(spec, y10, y20)
        y1, y2 = anharmonic_y(spec, p, 0.0)
        assert y1 == pytest.approx(y10, rel=1e-10, abs=1e-10)
        assert y2 == pytest.approx(y20, rel=1e-10, abs=1e-10)

    def test_beta0_zero_raises_degenerate(self):
        spec = AnharmonicSpec(0.0, 8.0, 0.0, 1.0)
        with pytest.raises(DegenerateQuadraticError):
            fit_elliptic_params(spec, 0.3, 0.1)

    def test_beta1_zero_rejected(self):
        spec = AnharmonicSpec(2.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError, match="linear branch"):
            fit_elliptic_params(spec, 0.3, 0.1)

    def test_selection_robustness_over_random_instances(self):
        rng = random.Random(23)
        checked = 0
        for _ in range(60):
            a, b = unit_disk(rng), unit_disk(rng)
            if abs(a) < 0.02 or abs(b) < 0.02:
                continue
            spec = AnharmonicSpec.for_example(1, a, b)
            params = fit_elliptic_params(spec, unit_disk(rng), unit_disk(rng))
            assert params.fit_residual < 1e-8
            checked += 1
        assert checked > 40


class TestAnharmonic:
    @pytest.mark.parametrize("ex", [1, 2])
    def test_matches_oracle(self, ex):
        rng = random.Random(50 + ex)
        for _ in range(10):
            a, b = unit_disk(rng), unit_disk(rng)
            if abs(a) < 0.05 or abs(b) < 0.05:
                continue
            spec = AnharmonicSpec.for_example(ex, a, b)
            y10, y20 = unit_disk(rng), unit_disk(rng)
            path = AnharmonicPath(spec, y10, y20)
            ts = list(np.linspace(0.05, 0.5, 10))
            res = integrate(OdeProblem(spec.vector_field(), (y10, y20), (0.0, 0.5),
                                       rtol=1e-12, atol=1e-12), ts)
            assert res.ok
            for t, ref in zip(res.times, res.states):
                got = path.eval(t)
                scale = max(1.0, abs(ref[0]), abs(ref[1]))
                assert abs(got["y1"] - ref[0]) < 1e-8 * scale
                assert abs(got["y2"] - ref[1]) < 1e-8 * scale

    def test_second_difference_matches_oscillator(self):
        # y1'' = 8*beta1*(beta0*y1 + beta1*y1^3) at O(h^2)
        spec = AnharmonicSpec.for_example(1, -0.6 + 0.1j, 0.5 - 0.2j)
        path = AnharmonicPath(spec, 0.3 + 0.1j, -0.2 + 0.4j)

        def y1(t):
            return path.eval(t)["y1"]

        def resid(h):
            worst = 0.0
            for t in np.linspace(0.1, 0.4, 7):
                dd = (y1(t + h) - 2 * y1(t) + y1(t - h)) / (h * h)
                v = y1(t)
                force = 8 * spec.beta1 * (spec.beta0 * v + spec.beta1 * v ** 3)
                worst = max(worst, abs(dd - force))
            return worst

        r1, r2 = resid(1e-3), resid(5e-4)
        assert r1 / r2 == pytest.approx(4.0, rel=0.25)

    def test_small_beta1_approaches_linearized_solution(self):
        # with y small and beta1 tiny the dynamics is nearly y1'' = 8 b1 b0 y1;
        # cross-check the closed form against the oracle
        spec = AnharmonicSpec.for_example(1, -1.0, 1e-4)
        y10, y20 = 0.01, 0.005
        path = AnharmonicPath(spec, y10, y20)
        res = integrate(OdeProblem(spec.vector_field(), (y10, y20), (0.0, 1.0),
                                   rtol=1e-12, atol=1e-12), [1.0])
        got = path.eval(1.0)
        assert abs(got["y1"] - res.states[0][0]) < 1e-9
        assert abs(got["y2"] - res.states[0][1]) < 1e-9

    def test_linear_branch(self):
        spec = AnharmonicSpec(2.0, 0.0, 1.0, 0.0)  # alpha0 = 2*beta0
        path = LinearAnharmonicPath(spec, 0.5, -0.25)
        got = path.eval(0.7)
        assert got["y1"] == pytest.approx(0.5 + 2.0 * 0.7)
        assert got["y2"] == pytest.approx(-0.25 + 1.0 * (0.5 * 0.7 + 0.5 * 2.0 * 0.7 ** 2))

    def test_pole_reported_with_time_estimate(self):
        # drive y1 into an sn pole: strongly real lambda path with a pole on it
        spec = AnharmonicSpec.for_example(1, -1.0, 1.0)
        params = fit_elliptic_params(spec, 0.0, 0.0)  # k^2 = 1: y1 = mu*tanh(lam t)
        # tanh poles sit at imaginary argument; force one by rescaling lam
        bad = EllipticParams(params.k, 1j * math.pi, params.mu, 0.0)
        with pytest.raises(ClosedFormSingularityError) as err:
            anharmonic_y(spec, bad, 0.5)
        assert err.value.time == pytest.approx(0.5, abs=0.2)


class TestLogistic:
    def test_decoupled_follower_zero(self):
        spec = LogisticSpec.for_example(3, 0.4 + 0.3j, -0.2 + 0.1j)
        a = spec.alpha1
        lead, follow = logistic_y(spec, 0.7 - 0.2j, 0.0, 0.8)
        assert follow == 0.0
        assert lead == pytest.approx((0.7 - 0.2j) * cmath.exp(a * 0.8), rel=1e-12)

    @pytest.mark.parametrize("ex", [3, 4])
    def test_matches_oracle(self, ex):
        rng = random.Random(80 + ex)
        for _ in range(10):
            spec = LogisticSpec.for_example(ex, unit_disk(rng), unit_disk(rng))
            yl0, yf0 = unit_disk(rng), unit_disk(rng)
            path = LogisticPath(spec, yl0, yf0)
            ts = list(np.linspace(0.1, 1.0, 10))
            res = integrate(OdeProblem(spec.vector_field(), (yl0, yf0), (0.0, 1.0),
                                       rtol=1e-12, atol=1e-12), ts)
            names = spec.pair_names
            for t, ref in zip(res.times, res.states):
                try:
                    got = path.eval(t)
                except ClosedFormSingularityError:
                    break
                scale = max(1.0, abs(ref[0]), abs(ref[1]))
                assert abs(got[names[0]] - ref[0]) < 1e-8 * scale
                assert abs(got[names[1]] - ref[1]) < 1e-8 * scale

    def test_imaginary_rate_periodicity(self):
        # a = i*omega: follower closes at T/3, both close at T
        omega = 1.0
        spec = LogisticSpec(3, 1j * omega, 1.0, 3j * omega, 3.0)
        rng = random.Random(5)
        T = 2 * math.pi / omega
        for _ in range(5):
            path = LogisticPath(spec, unit_disk(rng), unit_disk(rng, 0.8))
            v0, vT = path.eval(0.0), path.eval(T)
            v13 = path.eval(T / 3)
            assert abs(vT["y1"] - v0["y1"]) < 1e-8
            assert abs(vT["y3"] - v0["y3"]) < 1e-8
            assert abs(v13["y3"] - v0["y3"]) < 1e-8

    def test_rate_zero_limit(self):
        # A -> 0: g = 1 - m*B*t exactly
        spec = LogisticSpec(3, 0.0, 0.5, 0.0, 1.5)
        lead, follow = logistic_y(spec, 1.0, 0.4, 0.5)
        g = 1.0 - 3 * (0.5 * 0.4) * 0.5
        assert follow == pytest.approx(0.4 / g, rel=1e-12)

    def test_blow_up_detected(self):
        # real positive rate and coupling: g hits zero in finite time
        spec = LogisticSpec(3, 1.0, 1.0, 3.0, 3.0)
        path = LogisticPath(spec, 1.0, 1.0)
        # g(t) = 1 + 1*(1 - e^{3t}) = 2 - e^{3t}: zero at t = ln(2)/3
        t_star = math.log(2.0) / 3.0
        with pytest.raises(ClosedFormSingularityError):
            path.eval(t_star)
        before = path.eval(t_star - 0.05)
        assert abs(before["y3"]) > 1.0

    def test_branch_continuity_under_winding(self):
        # strong rotation: phi must stay continuous along a fine grid
        spec = LogisticSpec(3, 2j, 1.0, 6j, 3.0)
        path = LogisticPath(spec, 1.0, 0.9)
        prev = path.eval(0.0)["y1"]
        for t in np.linspace(0.01, 3.0, 300):
            cur = path.eval(float(t))["y1"]
            assert abs(cur - prev) < 0.5 * max(1.0, abs(prev))
            prev = cur

    def test_relation_validation(self):
        with pytest.raises(ValueError, match="follower"):
            LogisticSpec(3, 1.0, 1.0, 2.0, 3.0)


class TestSpecBuilders:
    def test_example_relations(self):
        a, b = 0.37 - 0.4j, -0.8 + 0.05j
        s1 = AnharmonicSpec.for_example(1, a, b)
        assert s1.alpha0 == 2 * s1.beta0 and s1.alpha1 == 8 * s1.beta1
        s2 = AnharmonicSpec.for_example(2, a, b)
        assert s2.alpha0 == 1.5 * s2.beta0 and s2.alpha1 == 4.5 * s2.beta1
        s3 = LogisticSpec.for_example(3, a, b)
        assert s3.beta1 == 3 * s3.alpha1 and s3.beta2 == 3 * s3.alpha2
        s4 = LogisticSpec.for_example(4, a, b)
        assert s4.beta1 == 1.5 * s4.alpha1 and s4.beta2 == 1.5 * s4.alpha2
