"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
directly with ``python tests/test_acceptance.py``.
"""
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import apply, brute_index, random_bounded_sequence, random_unit_det_matrix  # noqa: E402
from test_cells import CELL_SETS, interval_ball_volume  # noqa: E402
from test_cone import CROSS  # noqa: E402
from test_dsl import CORPUS, ROOT  # noqa: E402

from pdens.cells import CosetAtom, normalize_1d  # noqa: E402
from pdens.cli import dump  # noqa: E402
from pdens.cone import distinguished_check, sc_cross_check, sc_multiplicity, theorem_mt_check  # noqa: E402
from pdens.crofton import crofton_integral, verify_crofton  # noqa: E402
from pdens.density import density, local_density, theta_ball_sequence, theta_sequence  # noqa: E402
from pdens.dsl import default_group, parse, print_document, run  # noqa: E402
from pdens.gallery import GERMS, germ  # noqa: E402
from pdens.padic import Subgroup  # noqa: E402
from pdens.sets import Ray, RayCone, dimension, linear_image  # noqa: E402

RESULTS: dict = {}


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def crit1():
    q = Fraction(5)
    E = germ("evenval").build()
    rep = local_density(E, 0)
    limits = rep.theta_ball_sequence.branch_limits()
    want = [1 / (1 + 1 / q), 1 / (1 + q)]
    ok = rep.density == Fraction(1, 2) and limits == want
    return record(1, ok, f"density {rep.density}, ball limits {[str(v) for v in limits]}")


def crit2():
    bad = []
    for p in (3, 5, 7):
        for n in (1, 2, 3, 4):
            got = density(normalize_1d(CosetAtom(0, 1, n), p), 0)
            if got != Fraction(1, brute_index(p, n)):
                bad.append((p, n, got))
    return record(2, not bad, f"12 (p, n) pairs, mismatches {bad}")


def crit3():
    bad = []
    for g in GERMS:
        X = g.build()
        d = dimension(X)
        s = theta_sequence(X, g.point, d).mean_value_at_infinity()
        b = theta_ball_sequence(X, g.point, d).mean_value_at_infinity()
        if s != b:
            bad.append(g.name)
    return record(3, len(GERMS) >= 15 and not bad, f"{len(GERMS)} germs, disagreeing {bad}")


def crit4():
    rng = random.Random(2024)
    failures = 0
    for _ in range(100):
        q = rng.choice([3, 5, 7])
        s, t = random_bounded_sequence(rng, q), random_bounded_sequence(rng, q)
        mv = s.mean_value_at_infinity()
        c = Fraction(rng.randint(-7, 7), rng.randint(1, 5))
        checks = [s.rebase_modulus(k * s.modulus).mean_value_at_infinity() == mv for k in (2, 3, 4)]
        checks += [s.shift(k).mean_value_at_infinity() == mv for k in (1, 2, 5)]
        checks.append((s + t).mean_value_at_infinity() == mv + t.mean_value_at_infinity())
        checks.append(s.scale(c).mean_value_at_infinity() == c * mv)
        failures += not all(checks)
    return record(4, failures == 0, f"100 random sequences, failures {failures}")


MT = [g for g in GERMS if "mt" in g.tags]


def crit5():
    bad = []
    for g in MT:
        X = g.build()
        r = theorem_mt_check(X, g.point, default_group(X), refine_bound=4)
        if not r.equal:
            bad.append(g.name)
    return record(5, len(MT) >= 10 and not bad, f"{len(MT)} germs, failing {bad}")


def crit6():
    bad = []
    for g in MT:
        X = g.build()
        base = default_group(X)
        if not distinguished_check(X, g.point, base,
                                   [Subgroup.P(g.p, k * base.N) for k in (2, 3, 6)]):
            bad.append(g.name)
    return record(6, not bad, f"{len(MT)} germs, k in (2, 3, 6), failing {bad}")


def crit7():
    curves = [g for g in GERMS if "crofton" in g.tags]
    bad = [g.name for g in curves if not verify_crofton(g.build(), g.point).equal]
    rng = random.Random(7)
    kappa = []
    for _ in range(10):
        p = rng.choice([3, 5])
        a, b = 0, 0
        while (a, b) == (0, 0):
            a, b = rng.randint(-20, 20), rng.randint(-20, 20)
        Pi = RayCone(p, (0, 0), [Ray((a, b), 1, 1)], include_origin=True)
        kappa.append(crofton_integral(Pi, (0, 0)).value)
    ok = len(curves) >= 8 and not bad and all(k == 1 for k in kappa)
    return record(7, ok, f"{len(curves)} curves, failing {bad}; kappa on 10 lines {set(map(str, kappa))}")


def crit8():
    rng = random.Random(8)
    built = [(g.p, g.build(), g.point)
             for g in map(germ, ("ray", "line", "two_rays", "moved_ray"))]
    built.append((5, RayCone(5, (0, 0), [Ray((1, 2), 1, 2), Ray((3, 1), 5, 4)]), (0, 0)))
    bad = 0
    for _ in range(20):
        for p, X, x in built:
            g = random_unit_det_matrix(rng, p)
            gX, gx = linear_image(X, g), apply(g, x)
            if density(gX, gx) != density(X, x):
                bad += 1
            if crofton_integral(gX, gx).value != crofton_integral(X, x).value:
                bad += 1
    return record(8, bad == 0, f"20 matrices x {len(built)} cones, mismatches {bad}")


def crit9():
    a_bad = []
    for X in CELL_SETS:
        for x, n0 in [(0, 0), (1, 1), (Fraction(1, 5), -1)]:
            lo, hi = interval_ball_volume(X, Fraction(x), n0, extra=22)
            v = X.ball_volume(x, n0)
            if not (lo <= v <= hi and hi - lo <= Fraction(X.p) ** -(n0 + 20)):
                a_bad.append((x, n0))
    b_bad = []
    for name, z, _ in CROSS:
        g = germ(name)
        X = g.build()
        grp = default_group(X)
        exact = sc_multiplicity(X, g.point, grp).multiplicity_at(z)
        if exact not in sc_cross_check(X, g.point, grp, z, depth=12):
            b_bad.append((name, z))
    ok = not a_bad and not b_bad and len(CROSS) >= 5
    return record(9, ok, f"(a) {3 * len(CELL_SETS)} volumes, (b) {len(CROSS)} multiplicities; "
                         f"misses {a_bad + b_bad}")


def crit10():
    bad = []
    for path in CORPUS:
        doc = parse(path.read_text())
        if parse(print_document(doc)) != doc:
            bad.append(f"round trip {path.name}")
        texts = {"".join(dump(r.payload) + "\n" for r in run(doc)) for _ in range(2)}
        gold = (ROOT / "tests" / "golden" / (path.stem + ".json")).read_text()
        if texts != {gold}:
            bad.append(f"golden {path.name}")
    return record(10, len(CORPUS) > 0 and not bad, f"{len(CORPUS)} documents, problems {bad}")


CRITERIA = [crit1, crit2, crit3, crit4, crit5, crit6, crit7, crit8, crit9, crit10]


@pytest.mark.parametrize("check", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
