"""One-variable cells with constant data, quantifier-free formulas, and the
normalizer turning a formula into a disjoint union of cells.

A cell is ``{t : lo <= ord(t - c) <= hi, t - c in lam * P_n}``; ``lam = 0``
gives the singleton ``{c}``.  Valuation bounds replace the pair of norms
``|alpha|, |beta|`` (see :meth:`Cell1D.from_bounds`).
"""
from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Optional, Union

from .padic import (INF, PadicNumber, check_prime, hensel_margin, is_nth_power,
                    is_zero, power_classes, refine_keys, sub, valuation)


def _snap_up(m, r, n):
    """Least integer >= m congruent to r mod n."""
    return m + (r - m) % n


def _snap_down(m, r, n):
    return m - (m - r) % n


@dataclass(frozen=True)
class Cell1D:
    p: int
    center: Fraction
    lam: Fraction
    n: int = 1
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.n < 1:
            raise ValueError("coset exponent must be positive")
        if self.lam == 0:
            object.__setattr__(self, "n", 1)
            object.__setattr__(self, "lo", None)
            object.__setattr__(self, "hi", None)
            return
        r = self.offset
        if self.lo is not None:
            object.__setattr__(self, "lo", _snap_up(self.lo, r, self.n))
        if self.hi is not None:
            object.__setattr__(self, "hi", _snap_down(self.hi, r, self.n))
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError("empty cell")

    @classmethod
    def point(cls, p, c) -> "Cell1D":
        return cls(p, c, 0)

    @classmethod
    def from_bounds(cls, p, center, lam, n, alpha=None, beta=None,
                    strict_lower=True, strict_upper=True) -> "Cell1D":
        """Cell {|alpha| <1 |t-c| <2 |beta|, t-c in lam P_n}; a bound of None means no condition."""
        hi = lo = None
        if alpha is not None:
            a = valuation(alpha, p)
            hi = int(a) - 1 if strict_lower else int(a)
        if beta is not None:
            b = valuation(beta, p)
            lo = int(b) + 1 if strict_upper else int(b)
        return cls(p, center, lam, n, lo, hi)

    @property
    def offset(self) -> int:
        """Residue mod n of the valuations ord(t - c) occurring in the cell."""
        return int(valuation(self.lam, self.p)) % self.n

    @property
    def is_point(self) -> bool:
        return self.lam == 0

    @property
    def dimension(self) -> int:
        return 0 if self.is_point else 1

    def contains(self, t) -> bool:
        y = sub(t, self.center)
        if self.is_point:
            return is_zero(y)
        if is_zero(y):
            return False
        v = valuation(y, self.p)
        if self.lo is not None and v < self.lo:
            return False
        if self.hi is not None and v > self.hi:
            return False
        q = y / self.lam if isinstance(y, PadicNumber) else y / self.lam
        return is_nth_power(q, self.n, self.p)

    def unit_count(self) -> int:
        return power_classes(self.p, self.n).unit_count

    def level_volume(self, m: int) -> Fraction:
        """mu(cell intersected with S(c, m))."""
        if self.is_point or (m - self.offset) % self.n:
            return Fraction(0)
        if (self.lo is not None and m < self.lo) or (self.hi is not None and m > self.hi):
            return Fraction(0)
        q = Fraction(self.p)
        return (1 - 1 / q) * q ** (-m) / self.unit_count()

    def _levels_sum(self, start: int) -> Fraction:
        """Sum of level volumes over m >= start."""
        if self.lo is not None:
            start = max(start, self.lo)
        m0 = _snap_up(start, self.offset, self.n)
        if self.hi is not None and m0 > self.hi:
            return Fraction(0)
        q = Fraction(self.p)
        step = q ** (-self.n)
        first = (1 - 1 / q) * q ** (-m0) / self.unit_count()
        if self.hi is None:
            return first / (1 - step)
        count = (self.hi - m0) // self.n + 1
        return first * (1 - step ** count) / (1 - step)

    def ball_volume(self, x, k: int) -> Fraction:
        """Exact Haar measure of the cell inside B(x, k)."""
        if self.is_point:
            return Fraction(0)
        p = self.p
        x = Fraction(x)
        d = x - self.center
        delta = valuation(d, p)
        if k <= delta:
            return self._levels_sum(k)
        delta = int(delta)
        if self.level_volume(delta) == 0:
            return Fraction(0)
        top = delta + hensel_margin(self.n, p)
        q = Fraction(p)
        if k >= top:
            return q ** (-k) if is_nth_power(d / self.lam, self.n, p) else Fraction(0)
        hits = 0
        for j in range(p ** (top - k)):
            y = d + j * Fraction(p) ** k
            if valuation(y, p) == delta and is_nth_power(y / self.lam, self.n, p):
                hits += 1
        return hits * q ** (-top)

    def sphere_volume(self, x, k: int) -> Fraction:
        return self.ball_volume(x, k) - self.ball_volume(x, k + 1)

    def formula(self) -> "Formula1D":
        if self.is_point:
            return CosetAtom(self.center, Fraction(0), 1)
        parts = [CosetAtom(self.center, self.lam, self.n)]
        if self.lo is not None:
            parts.append(OrdAtom(self.center, ">=", self.lo))
        if self.hi is not None:
            parts.append(OrdAtom(self.center, "<=", self.hi))
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def scaled(self, a) -> "Cell1D":
        a = Fraction(a)
        v = int(valuation(a, self.p))
        lo = None if self.lo is None else self.lo + v
        hi = None if self.hi is None else self.hi + v
        return Cell1D(self.p, self.center * a, self.lam * a, self.n, lo, hi)

    def translated(self, b) -> "Cell1D":
        return Cell1D(self.p, self.center + Fraction(b), self.lam, self.n, self.lo, self.hi)


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class OrdAtom:
    center: Fraction
    op: str
    bound: int

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class CosetAtom:
    center: Fraction
    lam: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.n < 1:
            raise ValueError("coset exponent must be positive")


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Const:
    value: bool


Formula1D = Union[OrdAtom, CosetAtom, And, Or, Not, Const]


def atoms(f) -> list:
    """Atoms in AST (depth-first, left to right) order."""
    if isinstance(f, (OrdAtom, CosetAtom)):
        return [f]
    if isinstance(f, (And, Or)):
        return [a for g in f.args for a in atoms(g)]
    if isinstance(f, Not):
        return atoms(f.arg)
    return []


def _evaluate(f, truth) -> bool:
    if isinstance(f, (OrdAtom, CosetAtom)):
        return truth(f)
    if isinstance(f, And):
        return all(_evaluate(g, truth) for g in f.args)
    if isinstance(f, Or):
        return any(_evaluate(g, truth) for g in f.args)
    if isinstance(f, Not):
        return not _evaluate(f.arg, truth)
    return f.value


def _atom_at(atom, t, p) -> bool:
    y = sub(t, atom.center)
    if isinstance(atom, OrdAtom):
        return _OPS[atom.op](valuation(y, p), atom.bound)
    if atom.lam == 0:
        return is_zero(y)
    if is_zero(y):
        return False
    return is_nth_power(y / atom.lam, atom.n, p)


def eval_formula(f, t, p: int) -> bool:
    return _evaluate(f, lambda a: _atom_at(a, t, p))


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

FULL = "full"
EMPTY = "empty"


class _Normalizer:
    """Ball-tree decomposition of a formula into cells centred at atom centres."""

    def __init__(self, f, p: int, extra_centers: Iterable = ()):
        self.f = f
        self.p = p
        self.atoms = atoms(f)
        centers = []
        for c in [Fraction(c) for c in extra_centers] + [a.center for a in self.atoms]:
            if c not in centers:
                centers.append(c)
        self.centers = centers or [Fraction(0)]
        exps = [a.n for a in self.atoms if isinstance(a, CosetAtom) and a.lam != 0]
        self.L = math.lcm(*exps) if exps else 1
        self.margin = max((hensel_margin(n, p) for n in exps), default=1)

    # atom behaviour on B(a, k) when the ball holds none of the atom's centre
    def _atom_on_ball(self, atom, a, k):
        d = a - atom.center
        delta = valuation(d, self.p)
        assert delta < k
        if isinstance(atom, OrdAtom):
            return _OPS[atom.op](delta, atom.bound)
        if atom.lam == 0:
            return False
        if k - delta >= hensel_margin(atom.n, self.p):
            return is_nth_power(d / atom.lam, atom.n, self.p)
        return None

    def _nearest(self, a):
        best, best_v = None, None
        for c in self.centers:
            v = valuation(a - c, self.p)
            if best_v is None or v > best_v:
                best, best_v = c, v
        return best

    def ball_cells(self, a, k) -> list[Cell1D]:
        inside = [c for c in self.centers if valuation(a - c, self.p) >= k]
        if inside:
            c = inside[0]
            return [Cell1D(self.p, c, 0), Cell1D(self.p, c, 1, 1, k, None)]
        c = self._nearest(a)
        delta = int(valuation(a - c, self.p))
        n = (self.p - 1) * self.p ** (k - delta - 1)
        return [Cell1D(self.p, c, a - c, n, delta, delta)]

    def decompose(self, a, k, depth=0):
        """FULL, EMPTY or a list of cells for the formula restricted to B(a, k)."""
        if depth > 400:
            raise RuntimeError("normalization did not terminate")
        p = self.p
        inside = [c for c in self.centers if valuation(a - c, p) >= k]
        if not inside:
            known = {}
            for atom in self.atoms:
                v = self._atom_on_ball(atom, a, k)
                if v is None:
                    break
                known[atom] = v
            else:
                return FULL if _evaluate(self.f, known.__getitem__) else EMPTY
        elif len(inside) == 1:
            c = inside[0]
            known = {}
            for atom in self.atoms:
                if atom.center == c:
                    continue
                v = self._atom_on_ball(atom, c, k)
                if v is None:
                    break
                known[atom] = v
            else:
                return self._conic(c, k, None, known)
        children = [self.decompose(a + j * Fraction(p) ** k, k + 1, depth + 1)
                    for j in range(p)]
        if all(ch == FULL for ch in children):
            return FULL
        if all(ch == EMPTY for ch in children):
            return EMPTY
        out = []
        for j, ch in enumerate(children):
            if ch == FULL:
                out.extend(self.ball_cells(a + j * Fraction(p) ** k, k + 1))
            elif ch != EMPTY:
                out.extend(ch)
        return out

    def _conic(self, c, lo, hi, known, as_if_centered=False):
        """Cells for {lo <= ord(t-c) <= hi} where only atoms at c (or all
        atoms, if as_if_centered) vary."""
        p = self.p
        local = [a for a in self.atoms if a not in known]
        exps = [a.n for a in local if isinstance(a, CosetAtom) and a.lam != 0]
        L = math.lcm(*exps) if exps else 1
        pc = power_classes(p, L)
        cuts = sorted({b for a in local if isinstance(a, OrdAtom) for b in (a.bound, a.bound + 1)})
        if lo is not None:
            cuts = [b for b in cuts if b > lo]
            starts = [lo] + cuts
        else:
            starts = [None] + cuts
        if hi is not None:
            starts = [s for s in starts if s is None or s <= hi]
        intervals = []
        for i, s in enumerate(starts):
            e = starts[i + 1] - 1 if i + 1 < len(starts) else hi
            intervals.append((s, e))

        def truth_for(key, level):
            rep = pc.rep(key)

            def t(atom):
                if atom in known:
                    return known[atom]
                if isinstance(atom, OrdAtom):
                    return _OPS[atom.op](level, atom.bound)
                if atom.lam == 0:
                    return False
                return is_nth_power(rep / atom.lam, atom.n, p)
            return _evaluate(self.f, t)

        cells, everything = [], True
        for key in pc.keys():
            run = None
            for s, e in intervals:
                level = s if s is not None else (e if e is not None else 0)
                try:
                    cell_ok = True
                    probe = Cell1D(p, c, pc.rep(key), L, s, e)
                except ValueError:
                    cell_ok = False
                if not cell_ok:
                    continue
                if truth_for(key, level):
                    run = (run[0], e) if run else (s, e)
                else:
                    everything = False
                    if run:
                        cells.append(Cell1D(p, c, pc.rep(key), L, *run))
                        run = None
            if run:
                cells.append(Cell1D(p, c, pc.rep(key), L, *run))
        if lo is None or hi is not None:
            everything = False
        point = _evaluate(self.f, lambda a: known[a] if a in known
                          else (_OPS[a.op](INF, a.bound) if isinstance(a, OrdAtom) else a.lam == 0))
        if as_if_centered:
            return cells
        if point:
            cells.append(Cell1D(p, c, 0))
        else:
            everything = False
        if everything:
            return FULL
        if not cells:
            return EMPTY
        return cells

    def far_level(self):
        c1 = self.centers[0]
        cands = [0]
        for c in self.centers[1:]:
            cands.append(int(valuation(c - c1, self.p)) - self.margin)
        for a in self.atoms:
            if isinstance(a, OrdAtom):
                cands.append(a.bound)
        return min(cands)

    def run(self) -> list[Cell1D]:
        p = self.p
        c1 = self.centers[0]
        m = self.far_level()
        far = self._far_cells(c1, m - 1)
        inner = self.decompose(c1, m)
        if inner == FULL:
            inner = self.ball_cells(c1, m)
        elif inner == EMPTY:
            inner = []
        return _tidy(p, far + inner)

    def _far_cells(self, c1, top):
        # every centre sits deep inside B(c1, top+1); each atom sees t - c1's class
        p = self.p
        pc = power_classes(p, self.L)
        out = []
        for key in pc.keys():
            rep = pc.rep(key)

            def t(atom):
                if isinstance(atom, OrdAtom):
                    return _OPS[atom.op](top, atom.bound)
                if atom.lam == 0:
                    return False
                return is_nth_power(rep / atom.lam, atom.n, p)
            if _evaluate(self.f, t):
                try:
                    out.append(Cell1D(p, c1, rep, self.L, None, top))
                except ValueError:
                    pass
        return out


def _coarsen_keys(p: int, keys: frozenset, L: int) -> list[tuple[Fraction, int]]:
    """Write a union of P_L classes as disjoint P_M cosets, smallest M first."""
    remaining = set(keys)
    out = []
    for M in [d for d in range(1, L + 1) if L % d == 0]:
        pcm = power_classes(p, M)
        for km in pcm.keys():
            fine = refine_keys(p, [km], M, L)
            if fine <= remaining:
                out.append((pcm.rep(km), M))
                remaining -= fine
        if not remaining:
            break
    return out


def _tidy(p: int, cells: list[Cell1D]) -> list[Cell1D]:
    """Merge abutting valuation ranges, coarsen coset families, sort."""
    groups: dict = {}
    singles = []
    for cell in cells:
        # points and one-level cells (small balls) are kept as they are
        if cell.is_point or cell.lo is not None and cell.lo == cell.hi and cell.n > 1:
            singles.append(cell)
            continue
        pc = power_classes(p, cell.n)
        groups.setdefault((cell.center, cell.n), {}).setdefault(pc.key(cell.lam), []).append(
            (cell.lo, cell.hi))
    merged = []
    for (c, n), by_key in groups.items():
        ranges: dict = {}
        for key, rs in by_key.items():
            rs.sort(key=lambda r: -math.inf if r[0] is None else r[0])
            out = []
            for lo, hi in rs:
                if out and out[-1][1] is not None and lo is not None and lo <= out[-1][1] + n:
                    prev = out[-1]
                    out[-1] = (prev[0], None if hi is None else max(hi, prev[1]))
                elif out and out[-1][1] is None:
                    continue
                else:
                    out.append((lo, hi))
            for r in out:
                ranges.setdefault(r, set()).add(key)
        for (lo, hi), keys in ranges.items():
            for lam, M in _coarsen_keys(p, frozenset(keys), n):
                try:
                    merged.append(Cell1D(p, c, lam, M, lo, hi))
                except ValueError:
                    pass
    allc = merged + singles
    allc.sort(key=_cell_sort_key)
    return allc


def _cell_sort_key(cell: Cell1D):
    return (cell.center, cell.is_point, -math.inf if cell.lo is None else cell.lo,
            cell.n, cell.lam)


@dataclass(frozen=True)
class Set1D:
    """A finite disjoint union of cells in K = Q_p."""

    p: int
    cells: tuple
    verify: InitVar[bool] = True

    def __post_init__(self, verify):
        check_prime(self.p)
        object.__setattr__(self, "cells", tuple(self.cells))
        if verify:
            for i, a in enumerate(self.cells):
                for b in self.cells[i + 1:]:
                    if normalize_1d(And((a.formula(), b.formula())), self.p).cells:
                        raise ValueError("cells of a Set1D must be pairwise disjoint")

    @classmethod
    def of(cls, p: int, cells: Iterable[Cell1D]) -> "Set1D":
        """Union of possibly overlapping cells, renormalized."""
        return normalize_1d(Or(tuple(c.formula() for c in cells)), p)

    @classmethod
    def whole(cls, p: int) -> "Set1D":
        return cls(p, (Cell1D(p, 0, 0), Cell1D(p, 0, 1, 1)), verify=False)

    @classmethod
    def empty(cls, p: int) -> "Set1D":
        return cls(p, (), verify=False)

    @property
    def ambient_dim(self) -> int:
        return 1

    @property
    def dimension(self) -> int:
        return max((c.dimension for c in self.cells), default=0)

    @property
    def exponents(self) -> list[int]:
        return [c.n for c in self.cells if not c.is_point]

    def formula(self):
        return Or(tuple(c.formula() for c in self.cells))

    def contains(self, t) -> bool:
        if isinstance(t, tuple):
            (t,) = t
        return any(c.contains(t) for c in self.cells)

    def ball_volume(self, x, k: int) -> Fraction:
        if isinstance(x, tuple):
            (x,) = x
        return sum((c.ball_volume(x, k) for c in self.cells), Fraction(0))

    def sphere_volume(self, x, k: int) -> Fraction:
        return self.ball_volume(x, k) - self.ball_volume(x, k + 1)

    def union(self, other: "Set1D") -> "Set1D":
        return normalize_1d(Or((self.formula(), other.formula())), self.p)

    def intersection(self, other: "Set1D") -> "Set1D":
        return normalize_1d(And((self.formula(), other.formula())), self.p)

    def complement(self) -> "Set1D":
        return normalize_1d(Not(self.formula()), self.p)

    def same_set(self, other: "Set1D") -> bool:
        f, g = self.formula(), other.formula()
        diff = Or((And((f, Not(g))), And((g, Not(f)))))
        return not normalize_1d(diff, self.p).cells

    def scaled(self, a) -> "Set1D":
        return Set1D(self.p, tuple(c.scaled(a) for c in self.cells), verify=False)

    def translated(self, b) -> "Set1D":
        return Set1D(self.p, tuple(c.translated(b) for c in self.cells), verify=False)

    def truncated(self, x, k: int) -> "Set1D":
        """The set intersected with B(x, k)."""
        return normalize_1d(And((self.formula(), OrdAtom(x, ">=", k))), self.p)


def normalize_1d(f, p: int, extra_centers: Iterable = ()) -> Set1D:
    """Disjoint cells whose union is the set defined by f.

    Centres are drawn from ``extra_centers`` followed by the atom centres in
    AST order; the first listed centre takes priority on ties.
    """
    return _normalize_cached(f, p, tuple(Fraction(c) for c in extra_centers))


@lru_cache(maxsize=4096)
def _normalize_cached(f, p: int, extra_centers: tuple) -> Set1D:
    check_prime(p)
    return Set1D(p, tuple(_Normalizer(f, p, extra_centers).run()), verify=False)


# ---------------------------------------------------------------------------
# Local conic structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Germ1D:
    """X near x0: the point x0 itself, plus the P_L classes of t - x0."""

    point: Fraction
    contains_point: bool
    L: int
    keys: frozenset
    radius: int

    @property
    def in_closure(self) -> bool:
        return self.contains_point or bool(self.keys)


def germ_1d(X: Set1D, x0) -> Germ1D:
    return _germ_cached(X, Fraction(x0))


@lru_cache(maxsize=4096)
def _germ_cached(X: Set1D, x0: Fraction) -> Germ1D:
    p = X.p
    norm = normalize_1d(X.formula(), p, extra_centers=(x0,))
    germ_cells = [c for c in norm.cells if c.center == x0 and not c.is_point and c.hi is None]
    contains_point = any(c.is_point and c.center == x0 for c in norm.cells)
    L = math.lcm(*[c.n for c in germ_cells]) if germ_cells else 1
    pc = power_classes(p, L)
    keys = set()
    for c in germ_cells:
        keys |= refine_keys(p, [power_classes(p, c.n).key(c.lam)], c.n, L)
    radius = 0
    for c in norm.cells:
        if c in germ_cells:
            radius = max(radius, c.lo if c.lo is not None else radius)
        elif c.center == x0 and not c.is_point:
            radius = max(radius, c.hi + 1)
        elif c.center != x0:
            radius = max(radius, int(valuation(c.center - x0, p)) + 1)
    del pc
    return Germ1D(x0, contains_point, L, frozenset(keys), radius)


def _class_slice_status(norm: _Normalizer, x0, m: int, L: int, key) -> str:
    """Whether X contains, misses, or splits x0 + (class key at level m)."""
    p = norm.p
    pc = power_classes(p, L)
    k = pc.k
    seen = set()
    for w in range(1, p ** k):
        if w % p == 0 or pc.key(w) != (0, key[1]):
            continue
        a = x0 + w * Fraction(p) ** m
        r = norm.decompose(a, m + k)
        seen.add(r if r in (FULL, EMPTY) else "mixed")
        if len(seen) > 1 or "mixed" in seen:
            return "mixed"
    return seen.pop() if seen else EMPTY


def _pattern(X: Set1D, x0, L: int, levels):
    """{(level, class key): status} for the classes of P_L meeting each level."""
    norm = _Normalizer(X.formula(), X.p, extra_centers=(x0,))
    pc = power_classes(X.p, L)
    out = {}
    for m in levels:
        for key in pc.keys():
            if key[0] != m % L:
                continue
            out[(m, key)] = _class_slice_status(norm, x0, m, L, key)
    return out


def _window(X: Set1D, x0) -> tuple[int, int]:
    norm = normalize_1d(X.formula(), X.p, extra_centers=(x0,))
    marks = []
    for c in norm.cells:
        if c.center == x0:
            marks += [b for b in (c.lo, c.hi) if b is not None]
        else:
            marks.append(int(valuation(c.center - x0, X.p)))
    if not marks:
        return (0, 0)
    return (min(marks) - 1, max(marks) + 1)


def _stable(p: int, classes: set, group_keys, L: int) -> bool:
    pc = power_classes(p, L)
    return all(pc.mul(g, k) in classes for g in group_keys for k in classes)


def is_lambda_cone_1d(X: Set1D, group, x0=0) -> bool:
    """True iff group * (X - x0) is contained in X - x0."""
    x0 = Fraction(x0)
    L = group.N
    lo, hi = _window(X, x0)
    pat = _pattern(X, x0, L, range(lo - L, hi + L + 1))
    if "mixed" in pat.values():
        return False
    inside = {}
    for (m, key), status in pat.items():
        if inside.setdefault(key, status) != status:
            return False
    classes = {k for k, s in inside.items() if s == FULL}
    return _stable(X.p, classes, group.keys_at(L), L)


def local_cone_radius_1d(X: Set1D, x0, group) -> int:
    """Least gamma >= 0 with X and B(x0, gamma) a local group-cone at x0."""
    from .padic import InvalidSubgroup, Subgroup
    x0 = Fraction(x0)
    exps = X.exponents
    N = math.lcm(*exps) if exps else 1
    if not group.issubset(Subgroup.P(X.p, N)):
        raise InvalidSubgroup(f"group is not contained in P_{N}")
    L = group.N
    _, hi = _window(X, x0)
    top = max(hi, 0) + L
    pat = _pattern(X, x0, L, range(0, top + 1))
    gkeys = group.keys_at(L)
    for gamma in range(0, top + 1):
        inside, ok = {}, True
        for (m, key), status in pat.items():
            if m < gamma:
                continue
            if status == "mixed" or inside.setdefault(key, status) != status:
                ok = False
                break
        if ok and _stable(X.p, {k for k, s in inside.items() if s == FULL}, gkeys, L):
            return gamma
    raise RuntimeError("no local cone radius found below the scan bound")
