import random

import pytest

from rootflow.correspondence import (
    Config,
    Pair,
    RootState,
    roots_to_coeffs,
    xdot_from_ydot,
)
from rootflow.generator import (
    ConditionReport,
    SynthesisError,
    YSystemSpec,
    builtin_example,
    check_condition,
    example_params,
    example_xsystem_reference,
    synthesize_xsystem,
)
from rootflow.poly import MultiPoly

Y12 = ("y1", "y2")
Y13 = ("y1", "y3")


def anharmonic_spec(alpha0, alpha1, beta0, beta1, config=Config.GENERIC2):
    f1 = MultiPoly(Y12, {(0, 0): alpha0, (0, 1): alpha1})
    f2 = MultiPoly(Y12, {(1, 0): beta0, (3, 0): beta1})
    return YSystemSpec(config, Pair.Y12, {"y1": f1, "y2": f2})


class TestConditions:
    def test_condition1_satisfied_with_required_relations(self):
        beta0, beta1 = 0.7 - 0.2j, -1.1 + 0.4j
        rep = check_condition(anharmonic_spec(2 * beta0, 8 * beta1, beta0, beta1))
        assert rep.condition == 1
        assert rep.satisfied
        assert rep.residual.is_zero()

    def test_condition1_unit_parameters_leave_linear_residual(self):
        # alpha0 = beta0 = 1 with the cubic relation kept: residual is -x
        rep = check_condition(anharmonic_spec(1.0, 8.0, 1.0, 1.0))
        assert not rep.satisfied
        assert rep.residual == MultiPoly(("x",), {(1,): -1.0})

    def test_condition3_satisfied(self):
        a1, a2 = 0.3 + 0.1j, -0.8 - 0.5j
        f1 = MultiPoly(Y13, {(1, 0): a1, (1, 1): a2})
        f3 = MultiPoly(Y13, {(0, 1): 3 * a1, (0, 2): 3 * a2})
        rep = check_condition(YSystemSpec(Config.DOUBLE_ZERO3, Pair.Y13, {"y1": f1, "y3": f3}))
        assert rep.condition == 3
        assert rep.satisfied

    def test_condition3_divisibility_failure_reported(self):
        # a constant term in f3 makes the numerator not divisible by x
        f1 = MultiPoly(Y13, {(1, 0): 1.0})
        f3 = MultiPoly(Y13, {(0, 0): 2.0, (0, 1): 3.0})
        rep = check_condition(YSystemSpec(Config.DOUBLE_ZERO3, Pair.Y13, {"y1": f1, "y3": f3}))
        assert not rep.satisfied
        assert rep.divisibility_failure == pytest.approx(-2.0)

    def test_random_instantiations_agree_with_analytic_relations(self):
        rng = random.Random(42)
        for _ in range(8):
            b0 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            b1 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            assert check_condition(anharmonic_spec(2 * b0, 8 * b1, b0, b1)).satisfied
            assert check_condition(
                anharmonic_spec(1.5 * b0, 4.5 * b1, b0, b1, Config.DOUBLE_ZERO3)).satisfied
            # and perturbed relations fail
            assert not check_condition(anharmonic_spec(2 * b0 + 0.01, 8 * b1, b0, b1)).satisfied


class TestSynthesis:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_builtin_matches_published_form(self, n):
        a, b = 0.4 - 0.7j, 1.1 + 0.3j
        _, xs = builtin_example(n, a, b)
        ref = example_xsystem_reference(n, a, b)
        assert (xs.p1 - ref.p1).is_zero()
        assert (xs.p2 - ref.p2).is_zero()

    def test_example1_explicit_coefficients(self):
        # P1 = -beta0 + beta1*(x1^2 - 4 x1 x2 - x2^2) for a = -beta0, b = beta1
        _, xs = builtin_example(1, -1.0, 2.0)  # beta0 = 1, beta1 = 2
        assert xs.p1.coefficient((0, 0)) == pytest.approx(-1.0)
        assert xs.p1.coefficient((2, 0)) == pytest.approx(2.0)
        assert xs.p1.coefficient((1, 1)) == pytest.approx(-8.0)
        assert xs.p1.coefficient((0, 2)) == pytest.approx(-2.0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_synthesis_reproduces_velocity_identities(self, n):
        # evaluate(P) equals xdot_from_ydot applied to f at the mapped coeffs
        rng = random.Random(100 + n)
        spec, xs = builtin_example(n, 0.3 + 0.2j, -0.6 + 0.9j)
        config = spec.config
        for _ in range(100):
            x1 = complex(rng.uniform(0.2, 1.5), rng.uniform(-1, 1))
            x2 = complex(rng.uniform(-1.5, -0.2), rng.uniform(-1, 1))
            st = RootState(config, x1, x2)
            c = roots_to_coeffs(st)
            ydot = {name: f.evaluate(dict(c.values)) for name, f in spec.f.items()}
            want = xdot_from_ydot(st, ydot, spec.pair)
            got = xs.rhs(x1, x2)
            scale = max(1.0, abs(want[0]), abs(want[1]))
            assert abs(got[0] - want[0]) <= 1e-12 * scale
            assert abs(got[1] - want[1]) <= 1e-12 * scale

    def test_perturbed_relation_leaves_remainder(self):
        beta0, beta1 = 0.9, -0.4
        for eps_slot in ("alpha0", "alpha1"):
            d = dict(alpha0=2 * beta0, alpha1=8 * beta1)
            d[eps_slot] += 1e-3
            spec = anharmonic_spec(d["alpha0"], d["alpha1"], beta0, beta1)
            with pytest.raises(SynthesisError):
                synthesize_xsystem(spec)

    def test_perturbed_logistic_relation_leaves_remainder(self):
        p = example_params(3, 0.5, 0.7)
        f1 = MultiPoly(Y13, {(1, 0): p["alpha1"], (1, 1): p["alpha2"]})
        f3 = MultiPoly(Y13, {(0, 1): p["beta1"] + 1e-3, (0, 2): p["beta2"]})
        with pytest.raises(SynthesisError):
            synthesize_xsystem(YSystemSpec(Config.DOUBLE_ZERO3, Pair.Y13, {"y1": f1, "y3": f3}))

    def test_homogeneity_hooks(self):
        # with a = 0 the published systems are homogeneous of degree 2, 2, 4, 3
        for n, deg in ((1, 2), (2, 2), (3, 4), (4, 3)):
            _, xs = builtin_example(n, 0.0, 1.0)
            degrees = {sum(e) for e in xs.p1.terms} | {sum(e) for e in xs.p2.terms}
            assert degrees == {deg}

    def test_b_zero_degenerates_to_constant_or_linear(self):
        _, xs = builtin_example(1, 0.8, 0.0)
        assert xs.p1 == MultiPoly.const(("x1", "x2"), 0.8)
        _, xs3 = builtin_example(3, 0.8, 0.0)
        assert xs3.p1 == MultiPoly(("x1", "x2"), {(1, 0): 0.8})


class TestSpecValidation:
    def test_generic2_requires_y12(self):
        f = {"y1": MultiPoly(Y13, {(1, 0): 1.0}), "y3": MultiPoly(Y13, {(0, 1): 1.0})}
        with pytest.raises(ValueError, match="Y12"):
            YSystemSpec(Config.GENERIC2, Pair.Y13, f)

    def test_wrong_coefficient_names(self):
        f = {"y1": MultiPoly(Y12, {(1, 0): 1.0}), "y3": MultiPoly(Y12, {(0, 1): 1.0})}
        with pytest.raises(ValueError, match="needs f for"):
            YSystemSpec(Config.GENERIC2, Pair.Y12, f)

    def test_report_describe(self):
        rep = check_condition(anharmonic_spec(1.0, 8.0, 1.0, 1.0))
        assert isinstance(rep, ConditionReport)
        assert "violated" in rep.describe()
