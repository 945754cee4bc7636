import math

import pytest
from hypothesis import given, settings, strategies as st

from rootflow.poly import MultiPoly, exact_div
from rootflow.parsing import PolyParseError, UndeclaredSymbolError, parse_poly

X12 = ("x1", "x2")


def P(src, variables=X12):
    return parse_poly(src, variables)


class TestParse:
    def test_direct_expansion(self):
        p = parse_poly("y1*(3 + 2*y3)", ("y1", "y3"))
        assert p.terms == {(1, 0): 3.0, (1, 1): 2.0}

    def test_zero(self):
        assert parse_poly("0", X12).is_zero()

    def test_cube_of_negated_sum_matches_binomial_oracle(self):
        # oracle: expand (-x1-x2)^3 term-by-term via binomial coefficients
        expected = {}
        for k in range(4):
            expected[(3 - k, k)] = -float(math.comb(3, k))
        p = P("(-x1-x2)^3")
        assert p.terms == expected

    def test_complex_literals(self):
        p = parse_poly("2 + 3i + 1.5i*x", ("x",))
        assert p.terms == {(0,): 2 + 3j, (1,): 1.5j}

    def test_literal_sum_form(self):
        p = parse_poly("2+3i", ())
        assert p.terms == {(): 2 + 3j}

    def test_syntax_error_has_position(self):
        with pytest.raises(PolyParseError) as err:
            P("x1 + ?")
        assert err.value.position == 5

    def test_undeclared_symbol(self):
        with pytest.raises(UndeclaredSymbolError):
            P("x1 + y")

    def test_negative_exponent_rejected(self):
        with pytest.raises(PolyParseError, match="non-negative integer"):
            P("x1^-2")

    def test_fractional_exponent_rejected(self):
        with pytest.raises(PolyParseError, match="non-negative integer"):
            P("x1^1.5")

    def test_trailing_garbage(self):
        with pytest.raises(PolyParseError, match="trailing"):
            P("x1 x2")


class TestArithmetic:
    def test_difference_of_squares(self):
        assert P("(x1 - x2)*(x1 + x2)") == P("x1^2 - x2^2")

    def test_additive_inverse(self):
        p = P("3*x1^2*x2 - 2*x1 + 5")
        assert (p + (-p)).is_zero()

    def test_binomial_coefficient(self):
        assert P("(x1+x2)^3").coefficient((2, 1)) == 3.0

    def test_variable_mismatch(self):
        with pytest.raises(ValueError, match="variable mismatch"):
            P("x1") + parse_poly("y1", ("y1", "y2"))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            MultiPoly(X12, {(0, 0): float("inf")})


class TestSubstitute:
    def test_square_of_product(self):
        p = parse_poly("y2^2", ("y1", "y2"))
        q = p.substitute({"y2": P("x1*x2")})
        assert q == P("x1^2*x2^2")

    def test_condition_style_substitution(self):
        # alpha0 + alpha1*y2 at y1 -> -2x, y2 -> x^2
        a0, a1 = 0.75, -2.5
        p = MultiPoly(("y1", "y2"), {(0, 0): a0, (0, 1): a1})
        q = p.substitute({"y1": parse_poly("-2*x", ("x",)), "y2": parse_poly("x^2", ("x",))})
        assert q == parse_poly("0.75 - 2.5*x^2", ("x",))

    def test_pass_through_then_evaluate(self):
        p = parse_poly("y1^3", ("y1", "y2"))
        q = p.substitute({"y1": P("-(x1+x2)")})
        assert q.evaluate({"x1": 1, "x2": 1}) == -8

    def test_unbound_passes_through(self):
        p = parse_poly("y1 + y2", ("y1", "y2"))
        q = p.substitute({"y2": parse_poly("y1^2", ("y1", "y2"))})
        assert q == parse_poly("y1 + y1^2", ("y1", "y2"))


class TestEvaluate:
    def test_point(self):
        assert P("x1^2 - 4*x1*x2 - x2^2").evaluate({"x1": 1, "x2": 2}) == -11

    def test_zero_poly(self):
        assert MultiPoly.zero(X12).evaluate({"x1": 3j, "x2": 1}) == 0

    def test_complex_point(self):
        assert P("(x1+x2)^3").evaluate({"x1": 1j, "x2": 1}) == pytest.approx(-2 + 2j)


class TestExactDiv:
    def test_difference_of_squares(self):
        q, r = exact_div(P("x1^2 - x2^2"), P("x1 - x2"))
        assert q == P("x1 + x2")
        assert r.is_zero()

    def test_example1_numerator_factor(self):
        p = P("-x1^3 + 5*x1^2*x2 - 3*x1*x2^2 - x2^3")
        d = P("x1 - x2")
        q, r = exact_div(p, d)
        assert r.is_zero()
        assert q == P("-x1^2 + 4*x1*x2 + x2^2")
        assert q * d == p  # multiply-back oracle

    def test_non_divisible(self):
        q, r = exact_div(P("x1*x2"), P("x1 - x2"))
        assert not r.is_zero()
        assert q * P("x1 - x2") + r == P("x1*x2")

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            exact_div(P("x1"), MultiPoly.zero(X12))


# ---------------------------------------------------------------------------
# property tests: dyadic-rational coefficients keep every cancellation exact

coeffs = st.integers(min_value=-8, max_value=8).map(lambda n: n / 2.0)
exponents = st.tuples(st.integers(0, 3), st.integers(0, 3))


@st.composite
def polys(draw):
    n_terms = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n_terms):
        e = draw(exponents)
        c = draw(coeffs) + 1j * draw(coeffs)
        terms[e] = terms.get(e, 0) + c
    return MultiPoly(X12, terms)


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), polys())
def test_distributive_law(p, q, r):
    assert (p + q) * r == p * r + q * r


@settings(max_examples=100, deadline=None)
@given(polys())
def test_exact_div_round_trip(p):
    d = P("x1 - x2")
    q, r = exact_div(p, d)
    assert q * d + r == p


@settings(max_examples=100, deadline=None)
@given(polys())
def test_parse_pretty_round_trip(p):
    assert parse_poly(p.pretty(), X12) == p


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_substitute_commutes_with_evaluate(p, b1, b2):
    pt = {"x1": 0.5 - 0.25j, "x2": -1.5 + 0.5j}
    composed = p.substitute({"x1": b1, "x2": b2}).evaluate(pt)
    direct = p.evaluate({"x1": b1.evaluate(pt), "x2": b2.evaluate(pt)})
    assert composed == pytest.approx(direct, rel=1e-9, abs=1e-9)


def test_pretty_ordering_and_format():
    p = P("x1^2 + 7*x1*x2 + x2^2")
    assert p.pretty() == "x1^2 + 7*x1*x2 + x2^2"
    assert P("0").pretty() == "0"
    assert P("-x1 - 1").pretty() == "-x1 - 1"
    assert parse_poly("(2+3i)*x", ("x",)).pretty() == "(2+3i)*x"
