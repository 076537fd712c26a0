"""Integration over the projective line of lines in K^2: the invariant
measure, projections K^2 -> K^2/V = K, direct images of germs with
multiplicities, and the exact Crofton integral for weighted ray cones."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .cells import Cell1D, Set1D
from .cone import sc_multiplicity
from .density import StepFunction, density
from .epseq import fraction_str
from .padic import (PadicError, Subgroup, check_prime, hensel_margin, power_classes,
                    refine_keys, valuation)
from .sets import (MonomialGraph, RayCone, UnionSet, UnsupportedSet, _vec, ambient_dim,
                   canonical_direction, dimension, exponents)


class ConditionStarViolated(PadicError, ValueError):
    """The fiber of the projection through x meets the germ outside x."""


@dataclass(frozen=True)
class ProjectiveLine:
    """A line V = K v in K^2, v primitive with its first unit coordinate 1.

    Chart 0 holds [1 : t] with t in Z_p, chart 1 holds [s : 1] with s in pZ_p.
    """

    p: int
    v: tuple

    def __post_init__(self):
        check_prime(self.p)
        if len(self.v) != 2:
            raise ValueError("only lines in K^2 are supported")
        u, _ = canonical_direction(self.v, self.p)
        object.__setattr__(self, "v", u)

    @classmethod
    def chart_point(cls, p: int, chart: int, c) -> "ProjectiveLine":
        return cls(p, (Fraction(1), Fraction(c)) if chart == 0 else (Fraction(c), Fraction(1)))

    @property
    def chart(self) -> int:
        return 0 if self.v[0] == 1 else 1

    @property
    def coordinate(self) -> Fraction:
        return self.v[1] if self.chart == 0 else self.v[0]

    @property
    def complement(self) -> tuple:
        """w with det(v | w) a unit: (0, 1) on chart 0, (1, 0) on chart 1."""
        return (Fraction(0), Fraction(1)) if self.chart == 0 else (Fraction(1), Fraction(0))

    def projection(self) -> "ProjectionMap":
        return ProjectionMap(self)

    def to_json(self) -> list:
        return [fraction_str(c) for c in self.v]


def _det(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class ProjectionMap:
    """p_V : K^2 -> K, u -> the w-coordinate of u in the basis (v, w)."""

    V: ProjectiveLine

    @property
    def w(self) -> tuple:
        return self.V.complement

    def __call__(self, u) -> Fraction:
        u = _vec(u)
        return _det(self.V.v, u) / _det(self.V.v, self.w)


# ---------------------------------------------------------------------------
# Invariant measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscCell:
    """{V in chart : coordinate in a + p^k Z_p}; chart 1 needs k >= 1."""

    p: int
    chart: int
    a: int
    k: int

    @property
    def measure(self) -> Fraction:
        return Fraction(1, (self.p + 1) * self.p ** (self.k - 1))

    def contains(self, V: ProjectiveLine) -> bool:
        return V.chart == self.chart and valuation(V.coordinate - self.a, self.p) >= self.k

    def children(self) -> list["DiscCell"]:
        return [DiscCell(self.p, self.chart, self.a + j * self.p ** self.k, self.k + 1)
                for j in range(self.p)]

    @property
    def center(self) -> ProjectiveLine:
        return ProjectiveLine.chart_point(self.p, self.chart, self.a)


@dataclass(frozen=True)
class InvariantMeasurePartition:
    p: int
    depth: int
    cells: tuple

    def total(self) -> Fraction:
        return sum((c.measure for c in self.cells), Fraction(0))


def invariant_cell_measure(p: int, depth: int) -> InvariantMeasurePartition:
    """The (q+1) q^(depth-1) residue cells of depth ``depth``."""
    check_prime(p)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cells = [DiscCell(p, 0, a, depth) for a in range(p ** depth)]
    cells += [DiscCell(p, 1, p * j, depth) for j in range(p ** (depth - 1))]
    return InvariantMeasurePartition(p, depth, tuple(cells))


def top_cells(p: int) -> list[DiscCell]:
    return list(invariant_cell_measure(p, 1).cells)


# ---------------------------------------------------------------------------
# Condition (*) and direct images
# ---------------------------------------------------------------------------

def _line_directions(X, x) -> list[tuple]:
    """Directions of the straight pieces of the germ of X at x."""
    x = _vec(x)
    if isinstance(X, RayCone):
        germs, _ = X.line_germs(x)
        return [g.direction for g in germs]
    if isinstance(X, MonomialGraph):
        germs, _ = X.line_germs(x)
        # a curved branch contains no segment; a flat one is the horizontal line
        return [g.direction for g in germs] if X.coeff == 0 else []
    if isinstance(X, UnionSet):
        return [d for m in X.members for d in _line_directions(m, x)]
    raise UnsupportedSet("condition (*) is implemented for curves in K^2")


def check_condition_star(X, x, V: ProjectiveLine) -> bool:
    if ambient_dim(X) != 2 or dimension(X) > 1:
        raise UnsupportedSet("condition (*) needs a curve in K^2")
    return all(canonical_direction(d, V.p)[0] != V.v for d in _line_directions(X, x))


def _germ_terms(X, x, V: ProjectiveLine) -> list[tuple]:
    """(P_L class key of the image parameter, L, multiplicity) for the germ
    of X at x pushed to K by p_V (image centred at p_V(x) = 0)."""
    x = _vec(x)
    pv = ProjectionMap(V)
    out = []
    if isinstance(X, UnionSet):
        for m in X.members:
            out += _germ_terms(m, x, V)
        return out
    if isinstance(X, (RayCone, MonomialGraph)):
        germs, _ = X.line_germs(x)
        for g in germs:
            f = pv(g.direction)
            if f == 0:
                if isinstance(X, MonomialGraph) and X.coeff != 0:
                    raise UnsupportedSet("projection along the tangent of a curved branch")
                raise ConditionStarViolated("a branch lies inside the fiber")
            pc = power_classes(V.p, g.L)
            fk = pc.key(f)
            out += [(pc.mul(k, fk), g.L, Fraction(1)) for k in g.keys]
        return out
    raise UnsupportedSet("direct images are implemented for curves in K^2")


def direct_image(phi, x, V: ProjectiveLine) -> StepFunction:
    """Germ at 0 of p_V!(phi) as a step function on K."""
    phi = phi if isinstance(phi, StepFunction) else StepFunction.indicator(phi, 1)
    x = _vec(x)
    p = V.p
    acc: dict = {}
    for w, X in phi.active_terms():
        if not check_condition_star(X, x, V):
            raise ConditionStarViolated(f"fiber along {V.v} meets the germ")
        for key, L, mult in _germ_terms(X, x, V):
            acc[(L, key)] = acc.get((L, key), Fraction(0)) + w * mult
    return _image_step(p, acc)


def _image_step(p: int, acc: dict) -> StepFunction:
    if not acc:
        return StepFunction((), 1)
    L = math.lcm(*[L for L, _ in acc])
    pc = power_classes(p, L)
    fine: dict = {}
    for (l, key), w in acc.items():
        for k2 in refine_keys(p, [key], l, L):
            fine[k2] = fine.get(k2, Fraction(0)) + w
    by_weight: dict = {}
    for k, w in fine.items():
        if w:
            by_weight.setdefault(w, []).append(k)
    terms = []
    for w, keys in sorted(by_weight.items()):
        cells = tuple(Cell1D(p, 0, pc.rep(k), L) for k in sorted(keys))
        terms.append((w, Set1D(p, cells, verify=False)))
    return StepFunction(tuple(terms), 1)


# ---------------------------------------------------------------------------
# Crofton integral
# ---------------------------------------------------------------------------

@dataclass
class CroftonReport:
    value: Fraction
    depth_used: int = 0
    cells_evaluated: int = 0
    bad_directions: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": fraction_str(self.value), "depth_used": self.depth_used,
                "cells_evaluated": self.cells_evaluated,
                "bad_directions": [V.to_json() for V in self.bad_directions]}


def _weighted_classes(phi: StepFunction, x) -> dict:
    """{(direction, L, key): weight} for a step function made of ray cones at x."""
    x = _vec(x)
    out: dict = {}
    for w, X in phi.active_terms():
        members = X.members if isinstance(X, UnionSet) else (X,)
        for m in members:
            if not isinstance(m, RayCone) or m.origin != x:
                raise UnsupportedSet("crofton_integral takes ray cones with origin x; "
                                     "use verify_crofton for other germs")
            for g in m.lines:
                for key in g.keys:
                    out[(g.direction, g.L, key)] = out.get((g.direction, g.L, key), Fraction(0)) + w
    return out


def _coord_fn(chart: int, u) -> tuple:
    """p_V(u) = A + B * c for V at chart coordinate c, as (A, B)."""
    if chart == 0:
        # v = (1, t), w = (0, 1): det(v|u) = u2 - t u1, det(v|w) = 1
        return u[1], -u[0]
    # v = (s, 1), w = (1, 0): det(v|u) = s u2 - u1, det(v|w) = -1
    return u[0], -u[1]


def _integrand(p: int, classes: dict, chart: int, c) -> Fraction:
    acc: dict = {}
    for (u, L, key), w in classes.items():
        A, B = _coord_fn(chart, u)
        f = A + B * c
        pc = power_classes(p, L)
        k2 = pc.mul(key, pc.key(f))
        acc[(L, k2)] = acc.get((L, k2), Fraction(0)) + w
    return _image_density(p, frozenset(acc.items()))


@lru_cache(maxsize=4096)
def _image_density(p: int, acc: frozenset) -> Fraction:
    phi = _image_step(p, dict(acc))
    if not phi.terms:
        return Fraction(0)
    return density(phi, 0)


def crofton_integral(phi, x, max_depth: int = 40) -> CroftonReport:
    """Exact integral over lines V of Theta_1(p_V!(phi))(0) d mu(V)."""
    phi = phi if isinstance(phi, StepFunction) else StepFunction.indicator(phi, 1)
    x = _vec(x)
    if phi.dim != 1:
        raise UnsupportedSet("the Crofton integral is implemented for curves in K^2")
    classes = _weighted_classes(phi, x)
    report = CroftonReport(Fraction(0))
    if not classes:
        return report
    p = phi.p
    dirs = sorted({u for u, _, _ in classes})
    report.bad_directions = [ProjectiveLine(p, u) for u in dirs]
    margins = {u: max(hensel_margin(L, p) for v, L, _ in classes if v == u) for u in dirs}

    def status(cell: DiscCell):
        """('good'|'bad'|'split', bad direction or None)."""
        bad = None
        for u in dirs:
            A, B = _coord_fn(cell.chart, u)
            f0 = A + B * cell.a
            if B == 0:
                continue
            if f0 == 0 or valuation(f0, p) >= cell.k + valuation(B, p):
                # the zero of c -> A + Bc lies in this cell
                if bad is not None:
                    return "split", None
                bad = u
                continue
            if cell.k + valuation(B, p) - valuation(f0, p) < margins[u]:
                return "split", None
        return ("bad", bad) if bad is not None else ("good", None)

    total = Fraction(0)
    stack = top_cells(p)
    while stack:
        cell = stack.pop()
        if cell.k > max_depth:
            raise RuntimeError("partition refinement exceeded the depth bound")
        kind, u0 = status(cell)
        report.depth_used = max(report.depth_used, cell.k)
        if kind == "split":
            stack.extend(cell.children())
        elif kind == "good":
            report.cells_evaluated += 1
            total += cell.measure * _integrand(p, classes, cell.chart, Fraction(cell.a))
        else:
            total += _bad_disc(p, classes, cell, u0, report)
    report.value = total
    return report


def _bad_disc(p: int, classes: dict, cell: DiscCell, u0, report: CroftonReport) -> Fraction:
    """Integral over a disc holding exactly one bad direction c0: split into
    annuli ord(c - c0) = j >= k, P_L0 classes of c - c0, and sum the series
    (the integrand depends on j only through j mod L0)."""
    A, B = _coord_fn(cell.chart, u0)
    c0 = -A / B
    L0 = math.lcm(*[L for u, L, _ in classes if u == u0])
    pc = power_classes(p, L0)
    q = Fraction(p)
    # invariant measure on a chart disc is p/(p+1) times Haar measure
    scale = q / (q + 1) * (1 - 1 / q) / pc.unit_count
    total = Fraction(0)
    for key in pc.keys():
        j = cell.k + (key[0] - cell.k) % L0
        h = pc.rep(key) * q ** (j - key[0])
        report.cells_evaluated += 1
        val = _integrand(p, classes, cell.chart, c0 + h)
        total += val * scale * q ** (-j) / (1 - q ** (-L0))
    return total


def crofton_monte_carlo(phi, x, samples: int = 200, depth: int = 8, seed: int = 0) -> float:
    """Approximate diagnostic only: average of the integrand at random lines."""
    phi = phi if isinstance(phi, StepFunction) else StepFunction.indicator(phi, 1)
    classes = _weighted_classes(phi, _vec(x))
    if not classes:
        return 0.0
    p = phi.p
    rng = random.Random(seed)
    acc, n = Fraction(0), 0
    for _ in range(samples):
        if rng.random() < p / (p + 1):
            chart, c = 0, rng.randrange(p ** depth)
        else:
            chart, c = 1, p * rng.randrange(p ** (depth - 1))
        try:
            acc += _integrand(p, classes, chart, Fraction(c))
            n += 1
        except (ValueError, PadicError):
            continue
    return float(acc / n) if n else 0.0


@dataclass(frozen=True)
class CroftonCheck:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    report: CroftonReport

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.equal))

    def to_json(self) -> dict:
        out = {"lhs": fraction_str(self.lhs), "rhs": fraction_str(self.rhs), "equal": self.equal}
        out.update({k: v for k, v in self.report.to_json().items() if k != "value"})
        return out


def verify_crofton(X, x, group: Subgroup | None = None) -> CroftonCheck:
    """Density of X at x against the Crofton integral of its weighted tangent cone."""
    if ambient_dim(X) != 2 or dimension(X) != 1:
        raise UnsupportedSet("Crofton verification needs a curve in K^2")
    x = _vec(x)
    lhs = density(X, x, 1)
    if group is None:
        group = Subgroup.P(X.p, math.lcm(1, *exponents(X)))
    cone = sc_multiplicity(X, x, group)
    report = crofton_integral(cone.step_function(), x)
    return CroftonCheck(lhs, report.value, lhs == report.value, report)
