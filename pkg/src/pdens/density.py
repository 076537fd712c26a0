"""Exact ball and sphere volumes, the normalized volume sequences and the
local density of step functions over supported sets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cells import Set1D
from .epseq import EPSequence, ball_to_sphere, fraction_str
from .padic import PadicError
from .sets import (RayCone, UnsupportedSet, _vec, ambient_dim, ball_volume, dimension,
                   merge_line_germs, onset_data)


class InternalInconsistency(PadicError, RuntimeError):
    """Two routes to the same quantity disagreed."""


@dataclass(frozen=True)
class StepFunction:
    """sum of weight * indicator(set), measured with the dim-dimensional measure."""

    terms: tuple
    dim: int

    def __post_init__(self):
        terms = tuple((Fraction(w), X) for w, X in self.terms if Fraction(w) != 0)
        object.__setattr__(self, "terms", terms)
        if len({ambient_dim(X) for _, X in terms}) > 1:
            raise ValueError("step function terms live in different spaces")
        for _, X in terms:
            if dimension(X) > self.dim:
                raise ValueError("a term has dimension above the declared one")

    @classmethod
    def indicator(cls, X, dim: int | None = None) -> "StepFunction":
        return cls(((1, X),), dimension(X) if dim is None else dim)

    @property
    def p(self) -> int:
        return self.terms[0][1].p if self.terms else 0

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return StepFunction(self.terms + other.terms, self.dim)

    def scale(self, k) -> "StepFunction":
        return StepFunction(tuple((w * Fraction(k), X) for w, X in self.terms), self.dim)

    def active_terms(self):
        """Terms of full dimension; lower-dimensional ones carry no d-measure."""
        return [(w, X) for w, X in self.terms if dimension(X) == self.dim]

    def ball_volume(self, x, n: int) -> Fraction:
        return sum((w * ball_volume(X, x, n) for w, X in self.active_terms()), Fraction(0))

    def sphere_volume(self, x, n: int) -> Fraction:
        return self.ball_volume(x, n) - self.ball_volume(x, n + 1)

    def onset_data(self, x) -> tuple[int, int]:
        data = [onset_data(X, x) for _, X in self.active_terms()]
        if not data:
            return 0, 1
        return max(r for r, _ in data), math.lcm(*[e for _, e in data])


def volume_on_ball(X, x, n: int) -> Fraction:
    return ball_volume(X, x, n)


def volume_on_sphere(X, x, n: int) -> Fraction:
    """mu_d(X cap S(x, n)) with d = dim X."""
    return ball_volume(X, x, n) - ball_volume(X, x, n + 1)


def _as_step(phi, dim=None) -> StepFunction:
    if isinstance(phi, StepFunction):
        return phi
    return StepFunction.indicator(phi, dim)


def _periodic_from_samples(q: int, values: list, onset: int, e: int, what: str) -> EPSequence:
    for n in range(onset, onset + e):
        if values[n] != values[n + e]:
            raise InternalInconsistency(
                f"{what} sequence is not {e}-periodic from level {onset}")
    branch = [values[onset + (r - onset) % e] for r in range(e)]
    return EPSequence.periodic(q, branch, onset=onset, head=values[:onset])


def _p_of(phi: StepFunction) -> int:
    if not phi.terms:
        raise UnsupportedSet("empty step function has no residue field")
    return phi.p


def theta_ball_sequence(phi, x, dim=None) -> EPSequence:
    """n -> gamma_ball(phi)(x, n) / q^(-n d)."""
    phi = _as_step(phi, dim)
    if not phi.terms:
        return EPSequence.zero(3)
    q, d = _p_of(phi), phi.dim
    R, e = phi.onset_data(x)
    vals = [phi.ball_volume(x, n) * Fraction(q) ** (n * d) for n in range(R + 2 * e)]
    return _periodic_from_samples(q, vals, R, e, "ball-normalized")


def theta_sequence(phi, x, dim=None) -> EPSequence:
    """n -> gamma(phi)(x, n) / ((1 - q^-d) q^(-n d))."""
    phi = _as_step(phi, dim)
    if not phi.terms:
        return EPSequence.zero(3)
    q, d = _p_of(phi), phi.dim
    R, e = phi.onset_data(x)
    norm = 1 - Fraction(1, q ** d)
    vals = [phi.sphere_volume(x, n) * Fraction(q) ** (n * d) / norm for n in range(R + 2 * e)]
    return _periodic_from_samples(q, vals, R, e, "sphere-normalized")


@dataclass(frozen=True)
class DensityReport:
    point: tuple
    dim: int
    theta_sequence: EPSequence
    theta_ball_sequence: EPSequence
    density: Fraction
    modulus: int

    def to_json(self) -> dict:
        return {
            "point": [fraction_str(c) for c in self.point],
            "dim": self.dim,
            "density": fraction_str(self.density),
            "modulus": self.modulus,
            "sphere_branch_limits": [fraction_str(v) for v in self.theta_sequence.branch_limits()],
            "ball_branch_limits": [fraction_str(v) for v in self.theta_ball_sequence.branch_limits()],
        }


def local_density(phi, x, dim=None) -> DensityReport:
    phi = _as_step(phi, dim)
    if phi.dim < 1:
        raise UnsupportedSet("densities are defined for positive dimension only")
    x = _vec(x)
    if not phi.terms:
        z = EPSequence.zero(3)
        return DensityReport(x, phi.dim, z, z, Fraction(0), 1)
    sphere = theta_sequence(phi, x)
    ball = theta_ball_sequence(phi, x)
    if not ball_to_sphere(ball, phi.dim).equals(sphere):
        raise InternalInconsistency("ball and sphere normalizations give different sequences")
    dens = sphere.mean_value_at_infinity()
    if ball.mean_value_at_infinity() != dens:
        raise InternalInconsistency("ball and sphere normalizations give different densities")
    return DensityReport(x, phi.dim, sphere, ball, dens, sphere.modulus)


def density(phi, x, dim=None) -> Fraction:
    return local_density(phi, x, dim).density


def _union_and_intersection(X, Y):
    if isinstance(X, Set1D) and isinstance(Y, Set1D):
        return X.union(Y), X.intersection(Y)
    if isinstance(X, RayCone) and isinstance(Y, RayCone) and X.origin == Y.origin:
        p = X.p
        union = X.union(Y)
        inter = []
        for a in X.lines:
            for b in Y.lines:
                if a.direction == b.direction:
                    L = math.lcm(a.L, b.L)
                    keys = a.refined(p, L).keys & b.refined(p, L).keys
                    if keys:
                        inter.append(type(a)(a.direction, L, keys))
        return union, RayCone.from_lines(p, X.origin, merge_line_germs(p, inter),
                                         X.include_origin and Y.include_origin)
    raise UnsupportedSet("union and intersection are not available for these set kinds")


def density_additivity_check(X, Y, x, dim=None) -> bool:
    """Theta(X) + Theta(Y) == Theta(X u Y) + Theta(X n Y)."""
    d = dim if dim is not None else max(dimension(X), dimension(Y))
    union, inter = _union_and_intersection(X, Y)

    def th(S):
        if dimension(S) < d:
            return Fraction(0)
        return density(S, x, d)
    return th(X) + th(Y) == th(union) + th(inter)
