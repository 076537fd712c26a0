import os
from fractions import Fraction
from itertools import product

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# ---------------------------------------------------------------------------
# Brute-force oracles shared by several test files. They only use integer
# arithmetic modulo p^k and never call into the package.
# ---------------------------------------------------------------------------

def brute_vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def brute_unit_nth_powers(p: int, n: int, k: int) -> set:
    """Residues mod p^k of n-th powers of units."""
    m = p ** k
    return {pow(u, n, m) for u in range(1, m) if u % p}


def brute_index(p: int, n: int) -> int:
    """[Q_p^x : P_n] by counting unit classes modulo n-th powers at a depth
    past the Hensel bound, times n for the valuation part."""
    k = 2 * brute_vp(n, p) + 2
    m = p ** k
    powers = brute_unit_nth_powers(p, n, k)
    units = [u for u in range(1, m) if u % p]
    classes = set()
    for u in units:
        classes.add(frozenset(u * w % m for w in powers))
    return n * len(classes)


def rational_vp(x: Fraction, p: int) -> int:
    return brute_vp(x.numerator, p) - brute_vp(x.denominator, p)


def brute_in_nth_power_class(x: Fraction, lam: Fraction, n: int, p: int) -> bool:
    """x in lam * P_n, both nonzero rationals, decided via residues."""
    y = x / lam
    v = rational_vp(y, p)
    if v % n:
        return False
    u = y / Fraction(p) ** v
    k = 2 * brute_vp(n, p) + 2
    m = p ** k
    r = u.numerator * pow(u.denominator, -1, m) % m
    return r in brute_unit_nth_powers(p, n, k)


def residues(p: int, k: int):
    return range(p ** k)


def grid_points(p: int, lo: int, depth: int):
    """Rationals p^lo * r for r in 0..p^depth - 1: one point in each ball of
    radius level lo + depth inside B(0, lo)."""
    return [Fraction(r) * Fraction(p) ** lo for r in range(p ** depth)]


def pairs(iterable):
    return list(product(iterable, repeat=2))


def random_bounded_sequence(rng, q: int):
    """A bounded EPSequence with a random modulus, onset and decaying terms."""
    from pdens.epseq import EPSequence, EPTerm
    e = rng.randint(1, 4)
    onset = rng.randint(0, 3)
    branches = []
    for _ in range(e):
        terms = [EPTerm(0, 0, Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 6)))
                 for _ in range(rng.randint(0, 1))]
        for _ in range(rng.randint(0, 2)):
            terms.append(EPTerm(rng.randint(0, 2), -rng.randint(1, 3),
                                Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 4))))
        branches.append(tuple(terms))
    head = tuple(Fraction(rng.randint(-5, 5)) for _ in range(onset))
    return EPSequence(q, e, onset, tuple(branches), head)


def random_unit_det_matrix(rng, p: int):
    """2x2 integer matrix whose determinant is prime to p (an isometry of Z_p^2)."""
    while True:
        g = [[rng.randint(-6, 6) for _ in range(2)] for _ in range(2)]
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        if det % p:
            return g


def apply(g, v):
    return tuple(sum(Fraction(g[i][j]) * Fraction(v[j]) for j in range(2)) for i in range(2))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
