from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import brute_index, brute_in_nth_power_class, brute_vp
from pdens.padic import (DivisionByZero, InvalidSubgroup, PadicNumber, PowerClasses,
                         PrecisionExhausted, Subgroup, hensel_margin, is_nth_power,
                         power_classes, refine_keys, subgroup_index, valuation, vp_int)

PRIMES = [3, 5, 7]
nonzero_rat = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4).filter(
    lambda x: x != 0)


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 9])
def test_index_matches_coset_enumeration(p, n):
    assert PowerClasses(p, n).index == brute_index(p, n)
    assert subgroup_index(Subgroup.P(p, n)) == brute_index(p, n)


@pytest.mark.parametrize("p", PRIMES)
def test_hensel_margin(p):
    assert hensel_margin(1, p) == 1
    assert hensel_margin(p, p) == 3
    assert hensel_margin(p * p * 2, p) == 5
    assert vp_int(p ** 3 * 2, p) == 3


@given(st.sampled_from(PRIMES), nonzero_rat)
def test_valuation_agrees_with_integer_count(p, x):
    expected = brute_vp(abs(x.numerator), p) - brute_vp(x.denominator, p)
    assert valuation(x, p) == expected


@given(st.sampled_from(PRIMES), nonzero_rat, st.sampled_from([2, 3, 4, 6]))
def test_nth_power_test_against_residues(p, x, n):
    assert is_nth_power(x, n, p) == brute_in_nth_power_class(x, Fraction(1), n, p)


@given(st.sampled_from(PRIMES), nonzero_rat, nonzero_rat)
def test_padic_arithmetic_matches_rationals(p, a, b):
    A = PadicNumber.from_rational(p, a, 30)
    B = PadicNumber.from_rational(p, b, 30)

    def agrees(X, r):
        # X is r modulo p^(absolute precision)
        diff = X.to_fraction() - r
        return diff == 0 or valuation(diff, p) >= X.absolute_precision

    assert agrees(A * B, a * b)
    assert agrees(A / B, a / b)
    assert agrees(A - B, a - b) if a != b else True
    assert (A * B).valuation == valuation(a * b, p)
    assert (A / B).valuation == valuation(a / b, p)
    s = A + B
    if a + b != 0 and valuation(a + b, p) < 20:
        assert s.valuation == valuation(a + b, p)


def test_precision_errors():
    p = 5
    a = PadicNumber.from_rational(p, 1, 4)
    b = PadicNumber.from_rational(p, 1 + 5 ** 6, 8)
    with pytest.raises(PrecisionExhausted):
        (a - b).valuation  # all known digits cancel
    with pytest.raises(DivisionByZero):
        PadicNumber.zero(p).inverse()


def test_subgroup_validation_and_lattice():
    p = 5
    with pytest.raises(InvalidSubgroup):
        Subgroup(p, 4, (2,))  # not closed under multiplication
    P2, P4 = Subgroup.P(p, 2), Subgroup.P(p, 4)
    assert P4.issubset(P2) and not P2.issubset(P4)
    assert P2.intersect(Subgroup.P(p, 3)) == Subgroup.P(p, 6)
    assert Subgroup(p, 4, (1, 4)).index == P4.index // 2
    assert P2.contains(Fraction(4, 9)) and not P2.contains(2)


@pytest.mark.parametrize("p,n,m", [(5, 2, 4), (3, 2, 6), (7, 3, 6)])
def test_refined_keys_cover_the_coarse_class(p, n, m):
    pc_n, pc_m = power_classes(p, n), power_classes(p, m)
    for key in pc_n.keys():
        fine = refine_keys(p, [key], n, m)
        assert len(fine) == pc_m.index // pc_n.index
        for k2 in fine:
            assert pc_n.key(pc_m.rep(k2)) == key
