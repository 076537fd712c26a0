import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import apply, brute_index, random_unit_det_matrix
from pdens.cells import Cell1D, CosetAtom, OrdAtom, Set1D, normalize_1d
from pdens.density import (StepFunction, density,
                           density_additivity_check, local_density, theta_ball_sequence,
                           theta_sequence, volume_on_ball, volume_on_sphere)
from pdens.gallery import GERMS
from pdens.sets import BoxSet, Ray, RayCone, UnsupportedSet, ambient_dim, dimension, linear_image


def evenval(p):
    from pdens.dsl import Environment, parse
    env = Environment(p)
    env.add(parse(f"prime {p}; set E = evenval(0);").items[0])
    return env.sets["E"]


def test_evenval_reproduction():
    q = Fraction(5)
    rep = local_density(evenval(5), 0)
    assert rep.density == Fraction(1, 2)
    assert rep.theta_ball_sequence.branch_limits() == [1 / (1 + 1 / q), 1 / (1 + q)]
    assert rep.theta_sequence.branch_limits() == [1, 0]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_evenval_sphere_volumes(p):
    E = evenval(p)
    q = Fraction(p)
    for n in range(-2, 6):
        expected = (1 - 1 / q) * q ** -n if n % 2 == 0 else 0
        assert volume_on_sphere(E, 0, n) == expected


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_coset_density_is_inverse_index(p, n):
    X = normalize_1d(CosetAtom(0, 1, n), p)
    assert density(X, 0) == Fraction(1, brute_index(p, n))


@pytest.mark.parametrize("g", GERMS, ids=lambda g: g.name)
def test_sphere_and_ball_pipelines_agree(g):
    """Both normalizations, each compared to direct volume evaluation."""
    X = g.build()
    d = dimension(X)
    q = Fraction(g.p)
    ball = theta_ball_sequence(X, g.point, d)
    sphere = theta_sequence(X, g.point, d)
    for n in range(0, ball.onset + 3 * ball.modulus):
        assert ball(n) == volume_on_ball(X, g.point, n) * q ** (n * d)
        assert sphere(n) == volume_on_sphere(X, g.point, n) * q ** (n * d) / (1 - q ** -d)
    assert ball.mean_value_at_infinity() == sphere.mean_value_at_infinity()


def test_box_densities_do_not_multiply():
    p = 5
    S = normalize_1d(CosetAtom(0, 1, 2), p)
    B = BoxSet(p, [S, evenval(p)])
    # by hand: ball ratios multiply to 25/72 and 1/72 on even and odd levels,
    # sphere ratios are then 13/36 and 0
    assert density(B, (0, 0)) == Fraction(13, 72)
    assert density(S, 0) * density(evenval(p), 0) == Fraction(1, 8)


def test_additivity():
    p = 5
    X = normalize_1d(CosetAtom(0, 1, 2), p)
    Y = normalize_1d(CosetAtom(0, 2, 2), p).union(X)
    assert density_additivity_check(X, Y, 0)
    A = RayCone(p, (0, 0), [Ray((1, 1), 1, 2), Ray((1, 0), 1, 1)])
    B = RayCone(p, (0, 0), [Ray((1, 1), 1, 1)])
    assert density_additivity_check(A, B, (0, 0))


@given(st.integers(0, 10**6))
def test_step_function_linearity(seed):
    rng = random.Random(seed)
    p = 5
    sets = [normalize_1d(CosetAtom(0, lam, n), p) for lam, n in [(1, 2), (2, 2), (5, 4), (1, 3)]]
    ws = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in sets]
    phi = StepFunction(tuple(zip(ws, sets)), 1)
    nonzero = [(w, X) for w, X in zip(ws, sets) if w]
    expected = sum((w * density(X, 0) for w, X in nonzero), Fraction(0))
    got = density(phi, 0) if phi.terms else Fraction(0)
    assert got == expected


@given(st.integers(0, 10**6))
def test_densities_invariant_under_isometries(seed):
    rng = random.Random(seed)
    p = rng.choice([3, 5])
    g = random_unit_det_matrix(rng, p)
    C = RayCone(p, (1, 2), [Ray((1, 1), 1, 2), Ray((0, 1), 2, 4), Ray((1, 3), 1, 1)], True)
    gC = linear_image(C, g)
    for x in [(1, 2), (2, 3), (1, 4)]:
        assert density(gC, apply(g, x)) == density(C, x)


def test_lower_dimensional_terms_carry_no_mass():
    p = 5
    pt = Set1D.of(p, [Cell1D(p, 0, 0)])
    X = normalize_1d(OrdAtom(0, ">=", 0), p)
    phi = StepFunction(((1, X), (3, pt)), 1)
    assert density(phi, 0) == 1
    with pytest.raises(UnsupportedSet):
        density(pt, 0)
