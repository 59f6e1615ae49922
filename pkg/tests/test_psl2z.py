from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import rationals
from oracles import brute_force_unit_neighbors, mobius, table_as_tuples
from modwalk.cfrac import INF, ExtendedRational
from modwalk.errors import DomainError
from modwalk.psl2z import (
    GENERATORS,
    IDENTITY,
    ProjectiveMatrix,
    UpperHalfPoint,
    canonical_tuple,
    generator,
    generator_index,
    inverse,
    is_unit_neighbor,
    mobius_complex,
    mobius_real,
    multiply,
)

E = GENERATORS


def to_oracle(x: ExtendedRational):
    return None if x.is_infinite else x.to_fraction()


def test_generator_table_matches_brute_force():
    assert {g.entries for g in E} == brute_force_unit_neighbors()
    assert [g.entries for g in E] == table_as_tuples()


@pytest.mark.parametrize(
    "i, entries",
    [(0, (0, -1, 1, 0)), (5, (1, 0, 1, 1)), (3, (1, -1, 1, 0))],
)
def test_generator_entries(i, entries):
    assert generator(i).entries == entries


def test_generator_index_out_of_range():
    with pytest.raises(DomainError):
        generator(9)
    assert generator_index(E[4]) == 4
    assert generator_index(IDENTITY) is None


def test_multiply_examples():
    assert E[1] @ E[2] == IDENTITY
    assert E[0] @ E[0] == IDENTITY
    assert E[0] @ E[1] == E[7]


def test_inverse_examples():
    assert inverse(IDENTITY) == IDENTITY
    assert inverse(E[1]) == E[2]
    assert inverse(E[0]) == E[0]


def test_unit_neighbor_examples():
    assert is_unit_neighbor(E[3])
    assert not is_unit_neighbor(IDENTITY)
    assert not is_unit_neighbor(ProjectiveMatrix(2, 1, 1, 1))


def test_determinant_enforced():
    with pytest.raises(DomainError):
        ProjectiveMatrix(1, 1, 1, 1)


def test_mobius_real_examples():
    assert mobius_real(E[0], INF) == 0
    assert mobius_real(E[1], Fraction(2, 3)) == Fraction(5, 3)
    assert mobius_real(E[5], -1) == INF


def test_mobius_complex_examples():
    i = UpperHalfPoint(0, 1)
    assert mobius_complex(IDENTITY, i) == i
    assert mobius_complex(E[0], i) == i
    assert mobius_complex(E[1], i) == UpperHalfPoint(1, 1)


def test_upper_half_point_rejects_lower_half():
    with pytest.raises(DomainError):
        UpperHalfPoint(0, 0)
    with pytest.raises(DomainError):
        UpperHalfPoint(1.0, -2.0)


def test_json_round_trip_with_big_entries():
    m = ProjectiveMatrix(1, 0, 0, 1)
    for k in range(80):
        m = m @ E[5] @ E[1]
    assert max(abs(v) for v in m.entries) > 2**64
    assert ProjectiveMatrix.from_json(m.to_json()) == m


def _product(word):
    m = IDENTITY
    for i in word:
        m = m @ E[i]
    return m


unimodular = st.lists(st.integers(0, 8), max_size=12).map(_product)


@given(unimodular)
def test_canonicalization_identifies_sign(m):
    a, b, c, d = m.entries
    assert canonical_tuple(-a, -b, -c, -d) == m.entries
    assert canonical_tuple(*m.entries) == m.entries
    assert c > 0 or (c == 0 and d > 0)


@given(unimodular, unimodular)
def test_inverse_and_associativity(m, n):
    assert m @ inverse(m) == IDENTITY
    assert inverse(m @ n) == inverse(n) @ inverse(m)


@given(rationals(), st.integers(0, 8), st.integers(0, 8))
def test_action_is_functorial(x, i, j):
    x = ExtendedRational(x.numerator, x.denominator)
    assert mobius_real(multiply(E[i], E[j]), x) == mobius_real(E[i], mobius_real(E[j], x))


@given(rationals(), st.integers(0, 8))
def test_mobius_real_matches_oracle(x, i):
    got = mobius_real(E[i], ExtendedRational(x.numerator, x.denominator))
    assert to_oracle(got) == mobius(E[i].entries, x)


@given(rationals(1000, 1000), st.integers(1, 1000).map(lambda q: Fraction(1, q)), unimodular)
def test_mobius_complex_stays_in_upper_half_plane(re, im, m):
    z = mobius_complex(m, UpperHalfPoint(re, im))
    assert z.is_exact
    assert z.im > 0
    # im h(z) = im z / |cz + d|^2 for det 1
    a, b, c, d = m.entries
    assert z.im == im / ((c * re + d) ** 2 + (c * im) ** 2)
