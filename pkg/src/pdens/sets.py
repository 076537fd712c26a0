"""Supported set kinds beyond one variable: ray cones, monomial graph germs,
boxes and disjoint unions, with exact ball volumes and germ data.

Every set kind answers the same small protocol, dispatched by the module
level functions :func:`member`, :func:`ball_volume`, :func:`line_germs` and
:func:`onset_data`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .cells import (And, Cell1D, Germ1D, OrdAtom, Set1D, _coarsen_keys, germ_1d,
                    is_lambda_cone_1d, local_cone_radius_1d, normalize_1d)
from .padic import (INF, PadicError, Subgroup, check_prime, hensel_margin,
                    power_classes, refine_keys, sub, valuation)


class UnsupportedSet(PadicError, TypeError):
    """The requested operation is outside the supported class of sets."""


def _vec(z) -> tuple:
    if isinstance(z, (list, tuple)):
        return tuple(Fraction(c) if not hasattr(c, "unit_digits") else c for c in z)
    return (Fraction(z),)


def canonical_direction(u: Sequence, p: int) -> tuple[tuple, Fraction]:
    """(u', f) with u = f * u', u' primitive and its first unit coordinate 1."""
    u = tuple(Fraction(c) for c in u)
    if all(c == 0 for c in u):
        raise ValueError("direction must be nonzero")
    v = min(valuation(c, p) for c in u if c != 0)
    j = next(i for i, c in enumerate(u) if c != 0 and valuation(c, p) == v)
    f = u[j]
    return tuple(c / f for c in u), f


@dataclass(frozen=True)
class Ray:
    """lam * P_n * direction (the origin excluded)."""

    direction: tuple
    lam: Fraction
    n: int


@dataclass(frozen=True)
class LineGerm:
    """Germ along one line: points x + s*direction with s in the listed P_L classes."""

    direction: tuple
    L: int
    keys: frozenset

    def refined(self, p: int, M: int) -> "LineGerm":
        return LineGerm(self.direction, M, refine_keys(p, self.keys, self.L, M))


def merge_line_germs(p: int, germs: Iterable[LineGerm]) -> list[LineGerm]:
    """Union per direction, refined to a common exponent."""
    by_dir: dict = {}
    for g in germs:
        by_dir.setdefault(g.direction, []).append(g)
    out = []
    for d in sorted(by_dir):
        gs = by_dir[d]
        L = math.lcm(*[g.L for g in gs])
        keys = frozenset().union(*[g.refined(p, L).keys for g in gs])
        if keys:
            out.append(LineGerm(d, L, keys))
    return out


class RayCone:
    """x0 + union of lam_i P_{n_i} u_i, optionally with x0 itself."""

    def __init__(self, p: int, origin, rays: Iterable = (), include_origin: bool = False):
        check_prime(p)
        self.p = p
        self.origin = _vec(origin)
        self.include_origin = bool(include_origin)
        germs = []
        for r in rays:
            if not isinstance(r, Ray):
                r = Ray(*r)
            if len(r.direction) != len(self.origin):
                raise ValueError("ray direction and origin live in different spaces")
            if r.lam == 0:
                raise ValueError("ray coset must be nonzero")
            d, f = canonical_direction(r.direction, p)
            pc = power_classes(p, r.n)
            germs.append(LineGerm(d, r.n, frozenset([pc.key(Fraction(r.lam) * f)])))
        self.lines = tuple(merge_line_germs(p, germs))

    @classmethod
    def from_lines(cls, p, origin, lines: Iterable[LineGerm], include_origin=False) -> "RayCone":
        c = cls(p, origin, (), include_origin)
        c.lines = tuple(merge_line_germs(p, lines))
        return c

    @property
    def rays(self) -> tuple:
        out = []
        for g in self.lines:
            for lam, n in _coarsen_keys(self.p, g.keys, g.L):
                out.append(Ray(g.direction, lam, n))
        return tuple(out)

    @property
    def ambient_dim(self) -> int:
        return len(self.origin)

    @property
    def dimension(self) -> int:
        return 1 if self.lines else 0

    @property
    def exponents(self) -> list[int]:
        return [g.L for g in self.lines]

    def __repr__(self):
        return (f"RayCone(p={self.p}, origin={self.origin}, rays={list(self.rays)}, "
                f"include_origin={self.include_origin})")

    def _key(self):
        L = math.lcm(1, *[g.L for g in self.lines])
        return (self.p, self.origin, self.include_origin,
                tuple((g.direction, g.refined(self.p, L).keys) for g in self.lines))

    def __eq__(self, other):
        if not isinstance(other, RayCone):
            return NotImplemented
        if self.p != other.p:
            return False
        L = math.lcm(1, *[g.L for g in self.lines + other.lines])
        mine = {g.direction: g.refined(self.p, L).keys for g in self.lines}
        theirs = {g.direction: g.refined(self.p, L).keys for g in other.lines}
        return (self.origin == other.origin and self.include_origin == other.include_origin
                and mine == theirs)

    def __hash__(self):
        return hash((self.p, self.origin, self.include_origin,
                     tuple(g.direction for g in self.lines)))

    def _param(self, x, g: LineGerm):
        """(s0, w): y = x - origin = s0*u + w, with w vanishing in the pivot coordinate."""
        y = tuple(sub(a, b) for a, b in zip(_vec(x), self.origin))
        j = next(i for i, c in enumerate(g.direction) if c == 1)
        s0 = y[j]
        w = tuple(a - s0 * c for a, c in zip(y, g.direction))
        return s0, w

    def contains(self, z) -> bool:
        z = _vec(z)
        if z == self.origin:
            return self.include_origin
        for g in self.lines:
            s0, w = self._param(z, g)
            if all(c == 0 for c in w) and s0 != 0:
                return power_classes(self.p, g.L).key(s0) in g.keys
        return False

    def ball_volume(self, x, k: int) -> Fraction:
        total = Fraction(0)
        for g in self.lines:
            s0, w = self._param(x, g)
            if valuation_vec(w, self.p) < k:
                continue
            pc = power_classes(self.p, g.L)
            for key in g.keys:
                total += Cell1D(self.p, 0, pc.rep(key), g.L).ball_volume(s0, k)
        return total

    def line_germs(self, x) -> tuple[list[LineGerm], bool]:
        x = _vec(x)
        if x == self.origin:
            return list(self.lines), self.include_origin
        if self.contains(x):
            g = next(g for g in self.lines if all(c == 0 for c in self._param(x, g)[1]))
            return [LineGerm(g.direction, 1, frozenset([(0, 1)]))], True
        return [], False

    def onset_data(self, x) -> tuple[int, int]:
        x = _vec(x)
        if x == self.origin:
            return 0, math.lcm(1, *[g.L for g in self.lines])
        R = 0
        for g in self.lines:
            s0, w = self._param(x, g)
            if all(c == 0 for c in w):
                R = max(R, int(valuation(s0, self.p)) + hensel_margin(g.L, self.p))
            else:
                R = max(R, int(valuation_vec(w, self.p)) + 1)
        d = valuation_vec(tuple(a - b for a, b in zip(x, self.origin)), self.p)
        return max(R, int(d) + 1), 1

    def translated(self, b) -> "RayCone":
        o = tuple(a + Fraction(c) for a, c in zip(self.origin, _vec(b)))
        return RayCone.from_lines(self.p, o, self.lines, self.include_origin)

    def linear_image(self, g) -> "RayCone":
        o = _matvec(g, self.origin)
        rays = [Ray(_matvec(g, r.direction), r.lam, r.n) for r in self.rays]
        return RayCone(self.p, o, rays, self.include_origin)

    def union(self, other: "RayCone") -> "RayCone":
        if other.origin != self.origin:
            raise UnsupportedSet("ray cones with different origins")
        return RayCone.from_lines(self.p, self.origin, self.lines + other.lines,
                                  self.include_origin or other.include_origin)

    def with_origin(self, flag: bool) -> "RayCone":
        return RayCone.from_lines(self.p, self.origin, self.lines, flag)


def valuation_vec(v, p: int):
    return min((valuation(c, p) for c in v), default=INF)


def _matvec(g, v) -> tuple:
    return tuple(sum((Fraction(g[i][j]) * v[j] for j in range(len(v))), Fraction(0))
                 for i in range(len(g)))


def min_graph_level(p: int, coeff, k: int) -> int:
    """Least m0 with ord(coeff) + (k-1) m0 >= 1."""
    c = Fraction(coeff)
    return -((int(valuation(c, p)) - 1) // (k - 1))


class MonomialGraph:
    """{(t, coeff * t^k) : t in base, ord(t) >= m0} in K^2."""

    def __init__(self, p: int, base: Set1D, coeff, k: int, m0: Optional[int] = None):
        check_prime(p)
        if k < 2:
            raise ValueError("monomial exponent must be at least 2")
        self.p, self.base, self.coeff, self.k = p, base, Fraction(coeff), k
        # a zero coefficient gives the flat graph, where any level works
        least = min_graph_level(p, self.coeff, k) if self.coeff != 0 else None
        if m0 is None:
            m0 = 0 if least is None else least
        elif least is not None and m0 < least:
            raise ValueError(f"m0 must be at least {least} for this coefficient")
        self.m0 = m0
        self.germ_base = base.intersection(normalize_1d(OrdAtom(0, ">=", m0), p))

    ambient_dim = 2

    def __repr__(self):
        return f"MonomialGraph(p={self.p}, coeff={self.coeff}, k={self.k}, m0={self.m0})"

    @property
    def dimension(self) -> int:
        return self.germ_base.dimension

    @property
    def exponents(self) -> list[int]:
        return self.germ_base.exponents

    def value(self, t):
        return self.coeff * t ** self.k

    def contains(self, z) -> bool:
        a, b = _vec(z)
        return self.germ_base.contains(a) and sub(b, self.value(a)) == 0

    def slope(self, t) -> Fraction:
        return self.coeff * self.k * Fraction(t) ** (self.k - 1)

    def _in_region(self, a) -> bool:
        return valuation(a, self.p) >= self.m0

    def ball_volume(self, x, k: int) -> Fraction:
        a, b = _vec(x)
        if not self._in_region(a):
            if k > valuation(a, self.p):
                return Fraction(0)
            return self.germ_base.ball_volume(a, k) if valuation(b, self.p) >= k else Fraction(0)
        if valuation(b - self.value(a), self.p) >= k:
            return self.germ_base.ball_volume(a, k)
        return Fraction(0)

    def line_germs(self, x) -> tuple[list[LineGerm], bool]:
        a, b = _vec(x)
        if b != self.value(a) or not self._in_region(a):
            return [], False
        g = germ_1d(self.germ_base, a)
        lines = [LineGerm((Fraction(1), self.slope(a)), g.L, g.keys)] if g.keys else []
        return lines, g.contains_point

    def onset_data(self, x) -> tuple[int, int]:
        a, b = _vec(x)
        if not self._in_region(a):
            return max(int(valuation(a, self.p)) + 1, 0), 1
        g = germ_1d(self.germ_base, a)
        R = g.radius
        r = valuation(b - self.value(a), self.p)
        if r != INF:
            R = max(R, int(r) + 1)
        return max(R, 0), g.L


class BoxSet:
    """Cartesian product of one-variable sets; full-dimensional in K^n."""

    def __init__(self, p: int, factors: Sequence[Set1D]):
        check_prime(p)
        if not factors:
            raise ValueError("a box needs at least one factor")
        self.p = p
        self.factors = tuple(factors)

    def __repr__(self):
        return f"BoxSet(p={self.p}, factors={len(self.factors)})"

    @property
    def ambient_dim(self) -> int:
        return len(self.factors)

    @property
    def dimension(self) -> int:
        if all(f.dimension == 1 for f in self.factors):
            return len(self.factors)
        return sum(f.dimension for f in self.factors)

    @property
    def full_dimensional(self) -> bool:
        return all(f.dimension == 1 for f in self.factors)

    @property
    def exponents(self) -> list[int]:
        return [n for f in self.factors for n in f.exponents]

    def contains(self, z) -> bool:
        return all(f.contains(c) for f, c in zip(self.factors, _vec(z)))

    def ball_volume(self, x, k: int) -> Fraction:
        out = Fraction(1)
        for f, c in zip(self.factors, _vec(x)):
            out *= f.ball_volume(c, k)
            if out == 0:
                break
        return out

    def germs(self, x) -> list[Germ1D]:
        return [germ_1d(f, c) for f, c in zip(self.factors, _vec(x))]

    def line_germs(self, x):
        if len(self.factors) == 1:
            return set1d_line_germs(self.factors[0], _vec(x)[0])
        raise UnsupportedSet("boxes of dimension > 1 have no line germs")

    def onset_data(self, x) -> tuple[int, int]:
        gs = self.germs(x)
        return max(0, *[g.radius for g in gs]), math.lcm(*[g.L for g in gs])

    def linear_image(self, g) -> "BoxSet":
        """Image under a monomial matrix (permutation times unit diagonal)."""
        n = len(self.factors)
        new = [None] * n
        for i in range(n):
            nz = [j for j in range(n) if Fraction(g[i][j]) != 0]
            if len(nz) != 1:
                raise UnsupportedSet("boxes are only closed under monomial matrices")
            j = nz[0]
            new[i] = self.factors[j].scaled(Fraction(g[i][j]))
        if any(f is None for f in new):
            raise UnsupportedSet("not a permutation pattern")
        return BoxSet(self.p, new)


class UnionSet:
    """Union of supported sets of one ambient dimension, disjoint up to measure zero."""

    def __init__(self, p: int, members: Sequence):
        check_prime(p)
        members = tuple(members)
        if not members:
            raise ValueError("empty union")
        dims = {ambient_dim(m) for m in members}
        if len(dims) != 1:
            raise ValueError("union members live in different spaces")
        self.p = p
        self.members = members
        self._check_overlaps()

    def __repr__(self):
        return f"UnionSet(p={self.p}, members={list(self.members)})"

    def _check_overlaps(self):
        ms = self.members
        for i, a in enumerate(ms):
            for b in ms[i + 1:]:
                if isinstance(a, RayCone) and isinstance(b, RayCone) and a.origin == b.origin:
                    for ga in a.lines:
                        for gb in b.lines:
                            if ga.direction == gb.direction:
                                L = math.lcm(ga.L, gb.L)
                                if ga.refined(self.p, L).keys & gb.refined(self.p, L).keys:
                                    raise ValueError("overlapping rays; merge them into one cone")
                if isinstance(a, Set1D) and isinstance(b, Set1D):
                    if any(not c.is_point for c in a.intersection(b).cells):
                        raise ValueError("union members overlap in positive measure")
                if isinstance(a, MonomialGraph) and isinstance(b, MonomialGraph):
                    if (a.coeff, a.k) == (b.coeff, b.k) and a.germ_base.intersection(b.germ_base).dimension:
                        raise ValueError("identical graph branches overlap")

    @property
    def ambient_dim(self) -> int:
        return ambient_dim(self.members[0])

    @property
    def dimension(self) -> int:
        return max(dimension(m) for m in self.members)

    @property
    def exponents(self) -> list[int]:
        return [n for m in self.members for n in exponents(m)]

    def contains(self, z) -> bool:
        return any(member(m, z) for m in self.members)

    def ball_volume(self, x, k: int) -> Fraction:
        d = self.dimension
        return sum((ball_volume(m, x, k) for m in self.members if dimension(m) == d), Fraction(0))

    def line_germs(self, x):
        lines, point = [], False
        for m in self.members:
            ls, pt = line_germs(m, x)
            lines += ls
            point = point or pt
        return lines, point

    def branches(self, x) -> list[list[LineGerm]]:
        """Line germs grouped by member (each member one branch family)."""
        return [line_germs(m, x)[0] for m in self.members]

    def onset_data(self, x) -> tuple[int, int]:
        data = [onset_data(m, x) for m in self.members]
        return max(r for r, _ in data), math.lcm(*[e for _, e in data])

    def linear_image(self, g) -> "UnionSet":
        return UnionSet(self.p, [linear_image(m, g) for m in self.members])


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

SUPPORTED = (Set1D, RayCone, MonomialGraph, BoxSet, UnionSet)


def _check(X):
    if not isinstance(X, SUPPORTED):
        raise UnsupportedSet(f"unsupported set kind {type(X).__name__}")


def ambient_dim(X) -> int:
    _check(X)
    return X.ambient_dim


def dimension(X) -> int:
    _check(X)
    return X.dimension


def exponents(X) -> list[int]:
    _check(X)
    return X.exponents


def member(X, z) -> bool:
    _check(X)
    return X.contains(z)


def ball_volume(X, x, k: int) -> Fraction:
    _check(X)
    return X.ball_volume(x, k)


def sphere_volume(X, x, k: int) -> Fraction:
    return ball_volume(X, x, k) - ball_volume(X, x, k + 1)


def set1d_line_germs(X: Set1D, x) -> tuple[list[LineGerm], bool]:
    g = germ_1d(X, x)
    lines = [LineGerm((Fraction(1),), g.L, g.keys)] if g.keys else []
    return lines, g.contains_point


def line_germs(X, x) -> tuple[list[LineGerm], bool]:
    """Germ of a one-dimensional set at x as classes along tangent lines."""
    _check(X)
    if isinstance(X, Set1D):
        (c,) = _vec(x)
        return set1d_line_germs(X, c)
    return X.line_germs(x)


def onset_data(X, x) -> tuple[int, int]:
    """(R, e): for levels n >= R the normalized ball volume at x is e-periodic."""
    _check(X)
    if isinstance(X, Set1D):
        (c,) = _vec(x)
        g = germ_1d(X, c)
        return max(g.radius, 0), g.L
    return X.onset_data(x)


def linear_image(X, g):
    """Image of X under the matrix g (rows of rationals)."""
    _check(X)
    if isinstance(X, Set1D):
        return X.scaled(Fraction(g[0][0]))
    if isinstance(X, MonomialGraph):
        raise UnsupportedSet("graph germs are not closed under linear maps")
    return X.linear_image(g)


def is_lambda_cone(X, group: Subgroup, x0=None) -> bool:
    """Whether group * (X - x0) is contained in X - x0."""
    _check(X)
    if isinstance(X, Set1D):
        return is_lambda_cone_1d(X, group, Fraction(0) if x0 is None else Fraction(_vec(x0)[0]))
    if isinstance(X, RayCone):
        x0 = X.origin if x0 is None else _vec(x0)
        if x0 == X.origin:
            for g in X.lines:
                L = math.lcm(g.L, group.N)
                keys = g.refined(X.p, L).keys
                pc = power_classes(X.p, L)
                if any(pc.mul(a, b) not in keys for a in group.keys_at(L) for b in keys):
                    return False
            return True
        d = tuple(a - b for a, b in zip(X.origin, x0))
        if X.lines and any(g.direction != canonical_direction(d, X.p)[0] for g in X.lines):
            # scaling about x0 moves a ray off the line through x0 onto other lines
            return False
        return is_lambda_cone_1d(_cone_on_line(X, x0), group, 0)
    raise UnsupportedSet("cone test is implemented for Set1D and RayCone")


def _cone_on_line(X: RayCone, x0) -> Set1D:
    """X as a subset of the line through x0 and the origin, in the parameter
    s of x0 + s*u; every ray must lie on that line."""
    p = X.p
    d = tuple(a - b for a, b in zip(X.origin, x0))
    if not X.lines:
        if X.include_origin:
            return Set1D(p, (Cell1D(p, 1, 0),), verify=False)
        return Set1D.empty(p)
    u, f = canonical_direction(d, p)
    (g,) = X.lines
    pc = power_classes(p, g.L)
    cells = [Cell1D(p, f, pc.rep(k), g.L) for k in g.keys]
    if X.include_origin:
        cells.append(Cell1D(p, f, 0))
    return Set1D(p, tuple(cells), verify=False)


def local_cone_radius(X: Set1D, x0, group: Subgroup) -> int:
    if not isinstance(X, Set1D):
        raise UnsupportedSet("local cone radius is implemented for Set1D")
    return local_cone_radius_1d(X, Fraction(_vec(x0)[0]), group)
