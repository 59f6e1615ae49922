from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import rationals, unit_rationals
from oracles import interval_maps, stern_brocot_qmark
from modwalk.cfrac import INF
from modwalk.errors import DomainError
from modwalk.minkowski import (
    HOLDER_EXPONENT,
    DyadicRational,
    chi_half,
    chi_half_series,
    fibonacci_holder_ratios,
    holder_modulus,
    kernel_pushforward_cdf,
    lambda_cdf,
    lambda_survival,
    qmark,
    qmark_bracket,
    qmark_float,
    qmark_inverse,
    qmark_oracle,
)

F = Fraction


def Q(x) -> Fraction:
    return qmark(x).to_fraction()


class TestDyadic:
    def test_reduced_form(self):
        d = DyadicRational(12, 5)
        assert (d.num, d.exp) == (3, 3)
        assert str(d) == "3/2^3"
        assert str(DyadicRational(4, 2)) == "1"

    @given(st.integers(-(10**9), 10**9), st.integers(0, 60), st.integers(-(10**9), 10**9), st.integers(0, 60))
    def test_arithmetic_matches_fraction(self, a, e, b, f):
        x, y = DyadicRational(a, e), DyadicRational(b, f)
        fx, fy = F(a, 2**e), F(b, 2**f)
        assert (x + y).to_fraction() == fx + fy
        assert (x - y).to_fraction() == fx - fy
        assert (x * y).to_fraction() == fx * fy
        assert (x < y) == (fx < fy)
        assert DyadicRational.from_fraction(fx) == x

    def test_from_fraction_rejects_non_dyadic(self):
        with pytest.raises(DomainError):
            DyadicRational.from_fraction(F(1, 3))


@pytest.mark.parametrize("x, value", [(F(1, 2), F(1, 2)), (F(1, 3), F(1, 4)), (F(3, 7), F(7, 16))])
def test_qmark_examples(x, value):
    assert Q(x) == value


def test_qmark_value_at_three_sevenths_is_mediant_average():
    assert Q(F(3, 7)) == (Q(F(2, 5)) + Q(F(1, 2))) / 2


@pytest.mark.parametrize("x, value", [(0, 0), (1, 1), (F(2, 5), F(3, 8))])
def test_qmark_oracle_examples(x, value):
    assert qmark_oracle(x) == value


@pytest.mark.parametrize("bad", [F(-1, 2), F(3, 2), INF])
def test_qmark_domain(bad):
    with pytest.raises(DomainError):
        qmark(bad)


@pytest.mark.parametrize("d, x", [(F(1, 2), F(1, 2)), (F(1, 4), F(1, 3)), (F(3, 8), F(2, 5))])
def test_qmark_inverse_examples(d, x):
    assert qmark_inverse(d) == x


def test_qmark_inverse_rejects_non_dyadic():
    with pytest.raises(DomainError):
        qmark_inverse(F(1, 3))


@pytest.mark.parametrize("y, value", [(1, F(1, 2)), (F(1, 3), F(7, 8)), (3, F(1, 8))])
def test_chi_half_examples(y, value):
    assert chi_half(y).to_fraction() == value


def test_chi_half_at_zero_is_one():
    assert chi_half(0).to_fraction() == 1


@pytest.mark.parametrize("x, value", [(0, F(1, 2)), (1, F(1, 4)), (-3, F(15, 16)), (INF, 0)])
def test_lambda_survival_examples(x, value):
    assert lambda_survival(x).to_fraction() == value


@pytest.mark.parametrize(
    "prefix, lo, hi",
    [([1], F(1, 2), F(1)), ([1, 1], F(1, 2), F(3, 4)), ([2], F(1, 4), F(1, 2))],
)
def test_qmark_bracket_examples(prefix, lo, hi):
    b = qmark_bracket(prefix)
    assert (b.lo.to_fraction(), b.hi.to_fraction()) == (lo, hi)


@given(st.lists(st.integers(1, 12), min_size=1, max_size=8), st.lists(st.integers(1, 12), max_size=8))
def test_qmark_bracket_encloses_every_continuation(prefix, rest):
    b = qmark_bracket(prefix)
    assert b.width.to_fraction() <= 2 * F(1, 2 ** sum(prefix))
    ks = prefix + rest
    x = F(0)
    for k in reversed(ks):
        x = 1 / (k + x)
    assert qmark(x) in b


def test_oracle_equivalence_small_denominators():
    for q in range(1, 61):
        for p in range(q + 1):
            assert Q(F(p, q)) == qmark_oracle(F(p, q)) == stern_brocot_qmark(F(p, q))


@given(unit_rationals(10**6, open_interval=False))
def test_qmark_matches_stern_brocot_path(x):
    assert Q(x) == stern_brocot_qmark(x)


@given(unit_rationals(10**6))
def test_functional_equations(x):
    assert Q(1 - x) == 1 - Q(x)
    assert Q(x / (1 + x)) == Q(x) / 2
    assert Q(1 / (1 + x)) == 1 - Q(x) / 2


@given(unit_rationals(10**6))
def test_tent_invariance(w):
    h = interval_maps(w)
    assert Q(h[4]) + 1 - Q(h[1]) == Q(w)


@given(unit_rationals(10**5))
def test_kernel_stationarity(w):
    assert kernel_pushforward_cdf(w) == Q(w)


def test_monotone_on_grid():
    grid = sorted({F(p, q) for q in range(1, 141) for p in range(q + 1)})
    assert len(grid) > 6000
    vals = [Q(x) for x in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@given(unit_rationals(10**6, open_interval=False))
def test_inverse_round_trip(x):
    d = qmark(x)
    assert qmark_inverse(d) == x
    assert qmark(qmark_inverse(d)) == d


@given(st.integers(0, 2**20), st.integers(0, 20))
def test_inverse_then_forward_on_dyadics(num, exp):
    d = F(num % (2**exp + 1), 2**exp)
    assert Q(qmark_inverse(d)) == d


@given(unit_rationals(10**6))
def test_qmark_float_agrees(x):
    assert abs(qmark_float(float(x)) - float(Q(x))) < 1e-12


@given(st.fractions(min_value=F(1, 10**4), max_value=10**4, max_denominator=10**4))
def test_chi_identities_agree_with_series(y):
    assert chi_half(y) == chi_half_series(y)


@given(st.fractions(min_value=F(1, 10**4), max_value=10**4, max_denominator=10**4))
def test_chi_reflection(y):
    # Y and 1/Y have the same law: chi(y) + chi(1/y) = 1 at continuity points
    assert chi_half(y).to_fraction() + chi_half(1 / y).to_fraction() == 1


@given(rationals())
def test_lambda_is_symmetric(x):
    # Pr(X > x) = Pr(X < -x) and the law has no atoms
    assert lambda_survival(x).to_fraction() == lambda_cdf(-x).to_fraction()
    if x >= 0:
        assert lambda_survival(x).to_fraction() == chi_half(x).to_fraction() / 2


def test_lambda_monotone():
    xs = sorted({F(p, q) for q in range(1, 30) for p in range(-60, 61)})
    vals = [lambda_survival(x).to_fraction() for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_holder_exponent():
    assert abs(HOLDER_EXPONENT - 0.7202) < 1e-4


def test_holder_modulus_is_finite_and_stable():
    vals = [holder_modulus(2000, F(1, 2**k), seed=k) for k in (10, 12, 14)]
    assert all(0 < v < 10 for v in vals)
    mean = sum(vals) / len(vals)
    assert all(abs(v - mean) <= 0.5 * mean for v in vals)


def test_fibonacci_ratios_settle():
    r = fibonacci_holder_ratios(30)
    tail = r[-6:]
    assert max(tail) - min(tail) < 0.05 * max(tail)
