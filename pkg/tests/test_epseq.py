import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import random_bounded_sequence
from pdens.epseq import (EPSequence, EPTerm, Unbounded, ball_to_sphere, fraction_str,
                         sphere_to_ball_limits)

seeds = st.integers(0, 10**6)
qs = st.sampled_from([3, 5, 7])


def seq(seed, q):
    return random_bounded_sequence(random.Random(seed), q)


def window_average(s, start: int) -> Fraction:
    return sum((s(n) for n in range(start, start + s.modulus)), Fraction(0)) / s.modulus


@given(seeds, qs)
def test_mean_value_is_limit_of_window_averages(seed, q):
    s = seq(seed, q)
    mv = s.mean_value_at_infinity()
    # decaying terms are at most 9 * n^2 * q^-n each, four per branch at most
    n = 120 * s.modulus
    bound = 4 * 9 * Fraction(n + s.modulus) ** 2 * Fraction(q) ** -n
    assert abs(window_average(s, n) - mv) <= bound


@given(seeds, qs, st.sampled_from([2, 3, 4]))
def test_modulus_refinement_keeps_values_and_mean(seed, q, k):
    s = seq(seed, q)
    t = s.rebase_modulus(k * s.modulus)
    assert all(s(n) == t(n) for n in range(0, 3 * t.modulus + s.onset))
    assert t.mean_value_at_infinity() == s.mean_value_at_infinity()


@given(seeds, qs, st.integers(0, 7))
def test_shift(seed, q, k):
    s = seq(seed, q)
    t = s.shift(k)
    assert all(t(n) == s(n + k) for n in range(12))
    assert t.mean_value_at_infinity() == s.mean_value_at_infinity()


@given(seeds, seeds, qs, st.fractions(max_denominator=20, min_value=-5, max_value=5))
def test_linearity(a, b, q, c):
    s, t = seq(a, q), seq(b, q)
    assert (s + t).mean_value_at_infinity() == s.mean_value_at_infinity() + t.mean_value_at_infinity()
    assert s.scale(c).mean_value_at_infinity() == c * s.mean_value_at_infinity()
    assert all((s - t)(n) == s(n) - t(n) for n in range(10))


@given(seeds, qs)
def test_json_round_trip(seed, q):
    s = seq(seed, q)
    assert EPSequence.from_json(q, s.to_json()).equals(s)


@given(seeds, qs)
def test_later_onset_is_same_sequence(seed, q):
    s = seq(seed, q)
    assert s.with_onset(s.onset + 3).equals(s)


def test_unbounded_rejected():
    s = EPSequence(5, 1, 0, ((EPTerm(1, 0, 1),),))
    assert not s.is_bounded()
    with pytest.raises(Unbounded):
        s.mean_value_at_infinity()
    with pytest.raises(Unbounded):
        EPSequence.term(5, 1, 0, 1).mean_value_at_infinity()


def test_ball_sphere_conversion_on_even_levels():
    q = 5
    ball = EPSequence.periodic(q, [Fraction(5, 6), Fraction(1, 6)])
    sphere = ball_to_sphere(ball, 1)
    assert sphere.branch_limits() == [1, 0]
    assert sphere_to_ball_limits(sphere, 1) == [Fraction(5, 6), Fraction(1, 6)]


def test_fraction_str():
    assert fraction_str(Fraction(2, 4)) == "1/2"
    assert fraction_str(3) == "3"
    assert fraction_str(Fraction(-1, 3)) == "-1/3"
