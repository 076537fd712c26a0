from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from conftest import brute_in_nth_power_class, brute_vp, rational_vp
from pdens.cells import (And, Cell1D, Const, CosetAtom, Not, Or, OrdAtom, Set1D, germ_1d,
                         is_lambda_cone_1d, local_cone_radius_1d, normalize_1d)
from pdens.padic import Subgroup

P = 5
Q = Fraction(P)

# ---------------------------------------------------------------------------
# independent evaluator of formulas
# ---------------------------------------------------------------------------


def brute_eval(f, t: Fraction, p: int) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not brute_eval(f.arg, t, p)
    if isinstance(f, And):
        return all(brute_eval(a, t, p) for a in f.args)
    if isinstance(f, Or):
        return any(brute_eval(a, t, p) for a in f.args)
    y = t - f.center
    if isinstance(f, CosetAtom):
        if f.lam == 0:
            return y == 0
        return y != 0 and brute_in_nth_power_class(y, f.lam, f.n, p)
    if y == 0:
        return f.op in (">=", ">")
    v = rational_vp(y, p)
    return {">=": v >= f.bound, ">": v > f.bound, "<=": v <= f.bound,
            "<": v < f.bound, "=": v == f.bound}[f.op]


centers = st.sampled_from([Fraction(0), Fraction(1), Fraction(P), Fraction(1, P), Fraction(7)])
ord_atoms = st.builds(OrdAtom, centers, st.sampled_from([">=", ">", "<=", "<", "="]),
                      st.integers(-2, 3))
coset_atoms = st.builds(CosetAtom, centers,
                        st.sampled_from([Fraction(1), Fraction(2), Fraction(P), Fraction(3, P)]),
                        st.sampled_from([1, 2, 4]))
atoms = st.one_of(ord_atoms, coset_atoms)
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(st.builds(Not, sub),
                          st.builds(lambda a, b: And((a, b)), sub, sub),
                          st.builds(lambda a, b: Or((a, b)), sub, sub)),
    max_leaves=4)

# points spread over several valuation levels around the centres used above
SAMPLE_POINTS = sorted({Fraction(c) + Fraction(r) * Q ** e
                        for c in (0, 1, P, 7) for e in (-2, -1, 0, 1, 2, 3)
                        for r in (1, 2, 3, 4, 6, 11, 24, 26, 49, 101)} | {Fraction(0), Fraction(1)})


@given(formulas)
def test_normalize_is_sound(f):
    X = normalize_1d(f, P)
    for t in SAMPLE_POINTS:
        assert X.contains(t) == brute_eval(f, t, P), (f, t)


@given(formulas)
def test_cells_are_disjoint(f):
    X = normalize_1d(f, P)
    for t in SAMPLE_POINTS:
        assert sum(c.contains(t) for c in X.cells) <= 1


# ---------------------------------------------------------------------------
# truncated interval oracle for ball volumes
# ---------------------------------------------------------------------------

def _cell_decided(c: Cell1D, r: Fraction, m: int):
    """None if membership may vary on B(r, m), else the constant value."""
    y = r - c.center
    inside = y == 0 or rational_vp(y, c.p) >= m
    if c.lam == 0:
        return None if inside else False
    if inside:
        if c.hi is not None and m > c.hi:
            return False
        return None
    v = rational_vp(y, c.p)
    if m < v + 2 * brute_vp(c.n, c.p) + 2:
        return None
    if (c.lo is not None and v < c.lo) or (c.hi is not None and v > c.hi):
        return False
    return brute_in_nth_power_class(y, c.lam, c.n, c.p)


def interval_ball_volume(X: Set1D, x: Fraction, k: int, extra: int = 20):
    """[lo, hi] enclosing mu(X n B(x, k)), subdividing undecided balls down to
    level k + extra."""
    p = X.p
    lo, undecided = Fraction(0), Fraction(0)
    stack = [(Fraction(x), k)]
    while stack:
        r, m = stack.pop()
        vals = [_cell_decided(c, r, m) for c in X.cells]
        if None not in vals:
            if any(vals):
                lo += Fraction(p) ** -m
            continue
        if m >= k + extra:
            undecided += Fraction(p) ** -m
            continue
        stack.extend((r + a * Fraction(p) ** m, m + 1) for a in range(p))
    return lo, lo + undecided


CELL_SETS = [
    Set1D.of(P, [Cell1D(P, 0, 1, 2)]),
    Set1D.of(P, [Cell1D(P, 0, 2, 2, 1, 6)]),
    Set1D.of(P, [Cell1D(P, 1, 5, 4, None, 3), Cell1D(P, 0, 3, 1, 2, 2)]),
    normalize_1d(Or((CosetAtom(0, 1, 2), OrdAtom(1, ">=", 2))), P),
    normalize_1d(And((CosetAtom(Fraction(1, 5), 2, 2), OrdAtom(0, "<=", 0))), P),
]


@pytest.mark.parametrize("X", CELL_SETS)
@pytest.mark.parametrize("x,k", [(0, 0), (0, 2), (1, 1), (Fraction(1, 5), -1), (26, 2), (3, -1)])
def test_ball_volume_within_interval_oracle(X, x, k):
    lo, hi = interval_ball_volume(X, Fraction(x), k, extra=12)
    v = X.ball_volume(x, k)
    assert lo <= v <= hi
    # undecided mass: the balls around each centre inside its Hensel margin
    assert hi - lo <= len(X.cells) * P ** 2 * Q ** -(k + 12)


def test_ball_volume_within_depth_twenty():
    X = Set1D.of(P, [Cell1D(P, 0, 1, 2)])
    lo, hi = interval_ball_volume(X, Fraction(0), 0, extra=22)
    assert lo <= X.ball_volume(0, 0) <= hi and hi - lo <= Q ** -20


def test_point_cell_is_needed_for_closed_ball():
    # {ord t >= 0} is the punctured cell plus the centre
    X = normalize_1d(OrdAtom(0, ">=", 0), P)
    assert X.contains(0) and X.contains(25) and not X.contains(Fraction(1, 5))
    assert X.ball_volume(0, 0) == 1


@given(formulas, st.sampled_from([Fraction(0), Fraction(1), Fraction(3, 5)]),
       st.integers(-1, 3))
def test_complement_volumes_add_up(f, x, k):
    X = normalize_1d(f, P)
    Y = X.complement()
    assert X.ball_volume(x, k) + Y.ball_volume(x, k) == Q ** -k


@given(formulas, st.sampled_from([Fraction(2), Fraction(1, 3), Fraction(-7, 2)]),
       st.sampled_from([Fraction(0), Fraction(1), Fraction(6)]), st.integers(-1, 3))
def test_translation_invariance(f, b, x, k):
    X = normalize_1d(f, P)
    assert X.translated(b).ball_volume(x + b, k) == X.ball_volume(x, k)


@given(formulas, st.sampled_from([Fraction(5), Fraction(2), Fraction(1, 25), Fraction(3, 5)]),
       st.sampled_from([Fraction(0), Fraction(1)]), st.integers(-1, 3))
def test_scaling_multiplies_volume_by_abs(f, a, x, k):
    X = normalize_1d(f, P)
    va = rational_vp(a, P)
    assert X.scaled(a).ball_volume(a * x, k + va) == Q ** -va * X.ball_volume(x, k)


@given(formulas)
def test_union_intersection_inclusion_exclusion(f):
    X = normalize_1d(f, P)
    Y = normalize_1d(CosetAtom(0, 1, 2), P)
    for x, k in [(0, 0), (1, 1)]:
        lhs = X.union(Y).ball_volume(x, k) + X.intersection(Y).ball_volume(x, k)
        assert lhs == X.ball_volume(x, k) + Y.ball_volume(x, k)


def test_empty_cell_rejected():
    with pytest.raises(ValueError):
        Cell1D(P, 0, 1, 2, 3, 3)  # squares have even valuation only


def test_germ_and_local_cones():
    X = normalize_1d(CosetAtom(0, 1, 2), P)
    g = germ_1d(X, 0)
    assert g.L == 2 and not g.contains_point
    S2 = Subgroup.P(P, 2)
    assert is_lambda_cone_1d(X, S2, 0)
    assert not is_lambda_cone_1d(X.truncated(0, 2), S2, 0)
    shifted = normalize_1d(Or((CosetAtom(1, 5, 2), OrdAtom(1, ">=", 2))), P)
    # 5P_2 u B(0, 2) after shifting: p^-2 moves level 2 onto level 0, which
    # 5P_2 misses, but inside B(0, 2) the set is the whole ball
    assert local_cone_radius_1d(shifted, 1, S2) == 2
    odd = normalize_1d(CosetAtom(1, 5, 2), P)
    assert [local_cone_radius_1d(odd, x0, S2) for x0 in (1, 3, 6)] == [0, 1, 2]
