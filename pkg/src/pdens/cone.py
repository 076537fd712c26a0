"""Tangent cones, specialization multiplicities by branch counting, the
deformation-set cross-check, and the density comparison with the cone."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cells import Cell1D, Set1D
from .density import StepFunction, density
from .epseq import fraction_str
from .padic import INF, PadicError, Subgroup, power_classes, refine_keys, valuation
from .sets import (BoxSet, LineGerm, Ray, RayCone, UnionSet, UnsupportedSet, _coarsen_keys, _vec,
                   ball_volume, dimension, exponents, line_germs, onset_data)


class NoStabilization(PadicError, RuntimeError):
    """Refining the group never made the density comparison hold."""


class DepthTooSmall(PadicError, RuntimeError):
    """The truncated oracle saw no stable periodic pattern."""


@dataclass(frozen=True)
class WeightedRays:
    """Rays from a common origin carrying rational weights, as
    (direction, exponent L, P_L class key) -> weight."""

    p: int
    origin: tuple
    L: int
    weights: dict
    include_origin: bool = True

    def refined(self, M: int) -> "WeightedRays":
        if M % self.L:
            raise ValueError("refinement exponent must be a multiple of L")
        out = {}
        for (d, k), w in self.weights.items():
            for k2 in refine_keys(self.p, [k], self.L, M):
                out[(d, k2)] = w
        return WeightedRays(self.p, self.origin, M, out, self.include_origin)

    def __add__(self, other: "WeightedRays") -> "WeightedRays":
        L = math.lcm(self.L, other.L)
        a, b = self.refined(L), other.refined(L)
        out = dict(a.weights)
        for key, w in b.weights.items():
            out[key] = out.get(key, Fraction(0)) + w
        return WeightedRays(self.p, self.origin, L, {k: w for k, w in out.items() if w},
                            self.include_origin or other.include_origin)

    def scale(self, c) -> "WeightedRays":
        c = Fraction(c)
        return WeightedRays(self.p, self.origin, self.L,
                            {k: w * c for k, w in self.weights.items() if w * c},
                            self.include_origin)


class ConeWithMultiplicity:
    """A closed tangent cone with a multiplicity on each ray family.

    For full-dimensional boxes the cone is itself a box (``box``), carrying a
    single multiplicity.
    """

    def __init__(self, p: int, origin, rays: Iterable = (), include_origin: bool = True,
                 box: BoxSet | None = None, box_multiplicity=Fraction(1)):
        self.p = p
        self.origin = _vec(origin)
        self.rays = tuple((r, Fraction(m)) for r, m in rays)
        self.include_origin = include_origin
        self.box = box
        self.box_multiplicity = Fraction(box_multiplicity)

    @classmethod
    def from_weights(cls, wr: WeightedRays) -> "ConeWithMultiplicity":
        groups: dict = {}
        for (d, k), w in wr.weights.items():
            groups.setdefault((d, w), set()).add(k)
        rays = []
        for (d, w), keys in sorted(groups.items()):
            for lam, n in _coarsen_keys(wr.p, frozenset(keys), wr.L):
                rays.append((Ray(d, lam, n), w))
        return cls(wr.p, wr.origin, rays, wr.include_origin)

    @property
    def dim(self) -> int:
        if self.box is not None:
            return self.box.dimension
        return 1 if self.rays else 0

    @property
    def cone(self):
        if self.box is not None:
            return self.box
        return RayCone(self.p, self.origin, [r for r, _ in self.rays], self.include_origin)

    def weights(self) -> WeightedRays:
        if self.box is not None:
            raise UnsupportedSet("box cones carry no ray weights")
        L = math.lcm(1, *[r.n for r, _ in self.rays])
        out = {}
        for r, m in self.rays:
            pc = power_classes(self.p, r.n)
            for k in refine_keys(self.p, [pc.key(r.lam)], r.n, L):
                out[(r.direction, k)] = out.get((r.direction, k), Fraction(0)) + m
        return WeightedRays(self.p, self.origin, L, out, self.include_origin)

    def multiplicity_at(self, z) -> Fraction:
        """Multiplicity at a point of the cone off the apex (0 off the cone)."""
        z = _vec(z)
        if self.box is not None:
            return self.box_multiplicity if self.box.contains(z) else Fraction(0)
        total = Fraction(0)
        for r, m in self.rays:
            if RayCone(self.p, self.origin, [r]).contains(z):
                total += m
        return total

    def step_function(self) -> StepFunction:
        if self.box is not None:
            return StepFunction(((self.box_multiplicity, self.box),), self.box.dimension)
        terms = tuple((m, RayCone(self.p, self.origin, [r])) for r, m in self.rays)
        return StepFunction(terms, 1)

    def density(self) -> Fraction:
        phi = self.step_function()
        if not phi.terms:
            return Fraction(0)
        return density(phi, self.origin)

    def same_cone(self, other: "ConeWithMultiplicity") -> bool:
        return same_cone(self.cone, other.cone)

    def to_json(self) -> dict:
        if self.box is not None:
            return {"origin": [fraction_str(c) for c in self.origin],
                    "box": [[_cell_json(c) for c in f.cells] for f in self.box.factors],
                    "multiplicity": fraction_str(self.box_multiplicity)}
        return {
            "origin": [fraction_str(c) for c in self.origin],
            "rays": [{"direction": [fraction_str(c) for c in r.direction],
                      "coset": {"lambda": fraction_str(r.lam), "n": r.n},
                      "multiplicity": fraction_str(m)} for r, m in self.rays],
        }


def _cell_json(c: Cell1D) -> dict:
    return {"center": fraction_str(c.center), "lambda": fraction_str(c.lam), "n": c.n,
            "lo": c.lo, "hi": c.hi}


def same_cone(A, B) -> bool:
    if isinstance(A, RayCone) and isinstance(B, RayCone):
        return A == B
    if isinstance(A, BoxSet) and isinstance(B, BoxSet):
        return len(A.factors) == len(B.factors) and all(
            f.same_set(g) for f, g in zip(A.factors, B.factors))
    return False


# ---------------------------------------------------------------------------
# Tangent cones
# ---------------------------------------------------------------------------

def _saturate(p: int, g: LineGerm, group: Subgroup) -> LineGerm:
    L = math.lcm(g.L, group.N)
    pc = power_classes(p, L)
    keys = g.refined(p, L).keys
    return LineGerm(g.direction, L, frozenset(pc.mul(a, b) for a in group.keys_at(L) for b in keys))


def _is_box(X) -> bool:
    return isinstance(X, BoxSet) and len(X.factors) > 1


def _box_cone(X: BoxSet, x, group: Subgroup) -> BoxSet:
    p = X.p
    factors = []
    for g, c in zip(X.germs(x), _vec(x)):
        L = math.lcm(g.L, group.N)
        pc = power_classes(p, L)
        keys = refine_keys(p, g.keys, g.L, L)
        if any(pc.mul(a, b) not in keys for a in group.keys_at(L) for b in keys):
            raise UnsupportedSet("box tangent cones need a group stabilizing every factor germ")
        cells = [Cell1D(p, c, pc.rep(k), L) for k in sorted(keys)]
        if keys or g.contains_point:
            cells.append(Cell1D(p, c, 0))
        factors.append(Set1D(p, tuple(cells), verify=False))
    return BoxSet(p, factors)


def tangent_cone(X, x, group: Subgroup):
    """The closed tangent cone of X at x (a RayCone with origin x, or a box)."""
    x = _vec(x)
    if _is_box(X):
        return _box_cone(X, x, group)
    if dimension(X) > 1:
        raise UnsupportedSet("tangent cones are implemented for curves and boxes")
    germs, point = line_germs(X, x)
    sat = [_saturate(X.p, g, group) for g in germs]
    return RayCone.from_lines(X.p, x, sat, include_origin=point or bool(sat))


def _branches(X, x) -> list[list[LineGerm]]:
    if isinstance(X, UnionSet):
        out = []
        for m in X.members:
            out.extend(_branches(m, x))
        return out
    return [[g] for g in line_germs(X, x)[0]]


def _branch_weights(p: int, x, branches, group: Subgroup) -> WeightedRays:
    """Per ray class zeta: sum over branches of #{xi in group : xi zeta in S_b} / #group."""
    L = math.lcm(group.N, *[g.L for b in branches for g in b]) if branches else group.N
    pc = power_classes(p, L)
    gk = group.keys_at(L)
    weights: dict = {}
    for b in branches:
        for g in b:
            S = g.refined(p, L).keys
            for zeta in pc.keys():
                hits = sum(1 for xi in gk if pc.mul(xi, zeta) in S)
                if hits:
                    key = (g.direction, zeta)
                    weights[key] = weights.get(key, Fraction(0)) + Fraction(hits, len(gk))
    return WeightedRays(p, x, L, weights, True)


def sc_multiplicity(X, x, group: Subgroup) -> ConeWithMultiplicity:
    x = _vec(x)
    if _is_box(X):
        return ConeWithMultiplicity(X.p, x, box=_box_cone(X, x, group))
    if dimension(X) > 1:
        raise UnsupportedSet("multiplicities are implemented for curves and boxes")
    germs, point = line_germs(X, x)
    wr = _branch_weights(X.p, x, _branches(X, x), group)
    cwm = ConeWithMultiplicity.from_weights(wr)
    cwm.include_origin = point or bool(germs)
    return cwm


def nu_specialization(phi: StepFunction, x, group: Subgroup) -> ConeWithMultiplicity:
    """Linear extension of sc_multiplicity over the terms of phi."""
    x = _vec(x)
    terms = phi.active_terms()
    if not terms:
        return ConeWithMultiplicity(phi.p or 3, x, (), include_origin=False)
    if any(_is_box(X) for _, X in terms):
        if len(terms) != 1:
            raise UnsupportedSet("weighted sums of boxes are not supported")
        w, X = terms[0]
        c = sc_multiplicity(X, x, group)
        return ConeWithMultiplicity(c.p, x, box=c.box, box_multiplicity=w * c.box_multiplicity)
    total = None
    for w, X in terms:
        wr = sc_multiplicity(X, x, group).weights().scale(w)
        total = wr if total is None else total + wr
    return ConeWithMultiplicity.from_weights(total)


def distinguished_check(X, x, group: Subgroup, refinements: Iterable[Subgroup]) -> bool:
    base = tangent_cone(X, x, group)
    for sub in refinements:
        if not sub.issubset(group):
            raise ValueError("refinement groups must be contained in the base group")
        if not same_cone(base, tangent_cone(X, x, sub)):
            return False
    return True


@dataclass(frozen=True)
class MTCheck:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    group: Subgroup
    refinements: int

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.equal))


def theorem_mt_check(X, x, group: Subgroup, refine_bound: int = 4) -> MTCheck:
    """Compare the density of X at x with that of its weighted tangent cone,
    shrinking the group to group n P_{kN} (k = 2, 3, ...) while they differ."""
    d = dimension(X)
    if d < 1:
        raise UnsupportedSet("dimension-0 sets are outside the density pipeline")
    x = _vec(x)
    lhs = density(X, x, d)
    N = math.lcm(1, *exponents(X))
    current = group
    rhs = None
    for i in range(refine_bound + 1):
        try:
            rhs = sc_multiplicity(X, x, current).density()
        except UnsupportedSet:
            if not _is_box(X):
                raise
            rhs = None
        if rhs == lhs:
            return MTCheck(lhs, rhs, True, current, i)
        current = group.intersect(Subgroup.P(X.p, (i + 2) * N))
    raise NoStabilization(f"density {lhs} never matched the cone (last {rhs}) "
                          f"after {refine_bound} refinements")


# ---------------------------------------------------------------------------
# Deformation-set oracle
# ---------------------------------------------------------------------------

def _volume_bound(X) -> int:
    """An upper bound for q^(k d) * mu_d(X cap B(y, k)) over all y, k."""
    if isinstance(X, RayCone):
        return max(1, len(X.lines))
    if isinstance(X, UnionSet):
        return sum(_volume_bound(m) for m in X.members)
    return 1


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __contains__(self, v) -> bool:
        return self.lo <= Fraction(v) <= self.hi

    def to_json(self) -> dict:
        return {"lo": fraction_str(self.lo), "hi": fraction_str(self.hi)}


def sc_cross_check(X, x, group: Subgroup, z, depth: int = 12, start: int = 1,
                   max_start: int = 6) -> Interval:
    """Enclose [K^x : group] * Theta_{d+1}(D)(z, 0) for the deformation set
    D = {(z', lam) : x + lam z' in X, lam in group}, by Fubini over lam.

    Each normalized ball volume of D around (z, 0) is summed exactly over the
    lam-levels n..n+depth; the remaining levels add at most
    bound * q^(-depth).
    """
    p = X.p
    q = Fraction(p)
    d = dimension(X)
    x, z = _vec(x), _vec(z)
    _, e = onset_data(X, x)
    L = math.lcm(group.N, e)
    pc = power_classes(p, L)
    gk = group.keys_at(L)
    vz = min((valuation(c, p) for c in z if c != 0), default=INF)
    vz = 0 if vz == INF else int(vz)
    bound = _volume_bound(X)
    slack = bound * q ** (-depth)

    def ball_ratio(n: int) -> Fraction:
        kw = max(n - min(vz, 0), pc.k, 1)
        mod = p ** kw
        total = Fraction(0)
        for m in range(n, n + depth + 1):
            for w in range(1, mod):
                if w % p == 0:
                    continue
                lam = w * q ** m
                if pc.key(lam) not in gk:
                    continue
                y = tuple(a + lam * c for a, c in zip(x, z))
                vol = ball_volume(X, y, n + m)
                if vol:
                    total += q ** (-m - kw) * q ** (m * d) * vol
        return total * q ** (n * (d + 1))

    for n0 in range(start, max_start + 1):
        vals = [ball_ratio(n) for n in range(n0, n0 + 2 * L)]
        if all(abs(vals[i] - vals[i + L]) <= slack for i in range(L)):
            mean = sum(vals[:L], Fraction(0)) / L
            idx = group.index
            return Interval(idx * mean, idx * (mean + slack))
    raise DepthTooSmall(f"no stable pattern with period {L} below level {max_start}")
