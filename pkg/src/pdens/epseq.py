"""Eventually periodic exponential-polynomial sequences and their mean value
at infinity.

For ``n >= onset`` with ``n = r mod modulus`` the value is the sum over the
terms ``(c, l, a)`` of branch ``r`` of ``c * n**l * q**(a*n)``.  Values for
``n < onset`` are stored in ``head``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class Unbounded(ValueError):
    """Mean value requested for a sequence that is not bounded."""


@dataclass(frozen=True, order=True)
class EPTerm:
    l: int
    a: int
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c == 0:
            raise ValueError("EPTerm coefficient must be nonzero")
        if self.l < 0:
            raise ValueError("polynomial degree must be nonnegative")

    def value(self, n: int, q: int) -> Fraction:
        return self.c * Fraction(n) ** self.l * Fraction(q) ** (self.a * n)


def _collect(terms: Iterable[EPTerm]) -> tuple:
    acc: dict = {}
    for t in terms:
        acc[(t.l, t.a)] = acc.get((t.l, t.a), Fraction(0)) + t.c
    return tuple(EPTerm(l, a, c) for (l, a), c in sorted(acc.items()) if c != 0)


@dataclass(frozen=True)
class EPSequence:
    q: int
    modulus: int
    onset: int
    branches: tuple
    head: tuple = field(default=())

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.onset < 0:
            raise ValueError("onset must be nonnegative")
        if len(self.branches) != self.modulus:
            raise ValueError("one branch per residue class is required")
        object.__setattr__(self, "branches", tuple(_collect(b) for b in self.branches))
        head = tuple(Fraction(v) for v in self.head)
        if len(head) != self.onset:
            raise ValueError("head must list the values below the onset")
        object.__setattr__(self, "head", head)

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, q: int, value) -> "EPSequence":
        value = Fraction(value)
        return cls(q, 1, 0, ((EPTerm(0, 0, value),) if value else (),))

    @classmethod
    def periodic(cls, q: int, values: Sequence, onset: int = 0, head: Sequence = ()) -> "EPSequence":
        """Branch r is the constant values[r]."""
        br = tuple(((EPTerm(0, 0, Fraction(v)),) if v else ()) for v in values)
        return cls(q, len(values), onset, br, tuple(head))

    @classmethod
    def term(cls, q: int, c, l: int = 0, a: int = 0) -> "EPSequence":
        return cls(q, 1, 0, ((EPTerm(l, a, c),),))

    @classmethod
    def zero(cls, q: int) -> "EPSequence":
        return cls(q, 1, 0, ((),))

    # -- evaluation ---------------------------------------------------------
    def __call__(self, n: int) -> Fraction:
        return self.eval(n)

    def eval(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("sequences are indexed by nonnegative integers")
        if n < self.onset:
            return self.head[n]
        return sum((t.value(n, self.q) for t in self.branches[n % self.modulus]), Fraction(0))

    def is_bounded(self) -> bool:
        return all(t.a < 0 or (t.a == 0 and t.l == 0) for b in self.branches for t in b)

    def branch_limits(self) -> list[Fraction]:
        """Limit along each residue class (the constant term of each branch)."""
        if not self.is_bounded():
            raise Unbounded("sequence is not bounded")
        return [sum((t.c for t in b if t.l == 0 and t.a == 0), Fraction(0)) for b in self.branches]

    def mean_value_at_infinity(self) -> Fraction:
        lim = self.branch_limits()
        return sum(lim, Fraction(0)) / self.modulus

    def is_nonnegative(self) -> bool:
        """Sufficient check: nonnegative head and every branch eventually and
        from the onset nonnegative, decided by comparing the constant term
        against a bound on the decaying terms."""
        if any(v < 0 for v in self.head):
            return False
        for r, b in enumerate(self.branches):
            n = self.onset + (r - self.onset) % self.modulus
            const = sum((t.c for t in b if t.l == 0 and t.a == 0), Fraction(0))
            rest = [t for t in b if not (t.l == 0 and t.a == 0)]
            if not rest:
                if const < 0:
                    return False
                continue
            if any(t.a > 0 or (t.a == 0 and t.l > 0) for t in rest):
                # growing terms: sign decided by the dominant one
                dom = max(rest, key=lambda t: (t.a, t.l))
                if dom.c < 0:
                    return False
            # check a long stretch explicitly, then the tail crudely
            for k in range(64):
                if self.eval(n + k * self.modulus) < 0:
                    return False
        return True

    # -- algebra ------------------------------------------------------------
    def rebase_modulus(self, e: int) -> "EPSequence":
        if e % self.modulus:
            raise ValueError("new modulus must be a multiple of the old one")
        return EPSequence(self.q, e, self.onset,
                          tuple(self.branches[r % self.modulus] for r in range(e)), self.head)

    def with_onset(self, b: int) -> "EPSequence":
        """Same sequence with a later onset (head extended by evaluation)."""
        if b <= self.onset:
            return self
        head = tuple(self.eval(n) for n in range(b))
        return EPSequence(self.q, self.modulus, b, self.branches, head)

    def _align(self, other: "EPSequence"):
        if self.q != other.q:
            raise ValueError("sequences over different residue field sizes")
        e = math.lcm(self.modulus, other.modulus)
        b = max(self.onset, other.onset)
        return (self.rebase_modulus(e).with_onset(b), other.rebase_modulus(e).with_onset(b))

    def __add__(self, other: "EPSequence") -> "EPSequence":
        a, b = self._align(other)
        br = tuple(a.branches[r] + b.branches[r] for r in range(a.modulus))
        head = tuple(x + y for x, y in zip(a.head, b.head))
        return EPSequence(a.q, a.modulus, a.onset, br, head)

    def scale(self, k) -> "EPSequence":
        k = Fraction(k)
        if k == 0:
            return EPSequence.zero(self.q)
        br = tuple(tuple(EPTerm(t.l, t.a, t.c * k) for t in b) for b in self.branches)
        return EPSequence(self.q, self.modulus, self.onset, br, tuple(v * k for v in self.head))

    def __neg__(self) -> "EPSequence":
        return self.scale(-1)

    def __sub__(self, other: "EPSequence") -> "EPSequence":
        return self + (-other)

    def shift(self, k: int) -> "EPSequence":
        """n -> s(n + k)."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        if k == 0:
            return self
        onset = max(self.onset - k, 0)
        head = tuple(self.eval(n + k) for n in range(onset))
        br = []
        for r in range(self.modulus):
            terms = []
            for t in self.branches[(r + k) % self.modulus]:
                # c (n+k)^l q^{a(n+k)} expanded in powers of n
                base = t.c * Fraction(self.q) ** (t.a * k)
                for i in range(t.l + 1):
                    coef = base * math.comb(t.l, i) * Fraction(k) ** (t.l - i)
                    if coef:
                        terms.append(EPTerm(i, t.a, coef))
            br.append(tuple(terms))
        return EPSequence(self.q, self.modulus, onset, tuple(br), head)

    def is_zero(self) -> bool:
        return all(not b for b in self.branches) and all(v == 0 for v in self.head)

    def equals(self, other: "EPSequence") -> bool:
        """Pointwise equality."""
        return (self - other).is_zero()

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "onset": self.onset,
            "head": [fraction_str(v) for v in self.head],
            "branches": [[{"c": fraction_str(t.c), "l": t.l, "a": t.a} for t in b]
                         for b in self.branches],
        }

    @classmethod
    def from_json(cls, q: int, data: dict) -> "EPSequence":
        br = tuple(tuple(EPTerm(t["l"], t["a"], Fraction(t["c"])) for t in b)
                   for b in data["branches"])
        return cls(q, data["modulus"], data["onset"], br,
                   tuple(Fraction(v) for v in data["head"]))


def fraction_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def ball_to_sphere(s_ball: EPSequence, d: int) -> EPSequence:
    """Sphere-normalized sequence from the ball-normalized one:
    (s(n) - q^-d s(n+1)) / (1 - q^-d)."""
    b = Fraction(1, s_ball.q ** d)
    return (s_ball - s_ball.shift(1).scale(b)).scale(1 / (1 - b))


def sphere_to_ball_limits(s_sphere: EPSequence, d: int) -> list[Fraction]:
    """Branch limits of the ball-normalized sequence determined by a
    periodic sphere-normalized one (geometric tail sum)."""
    lim = s_sphere.branch_limits()
    e = s_sphere.modulus
    b = Fraction(1, s_sphere.q ** d)
    out = []
    for r in range(e):
        tot = sum((lim[(r + j) % e] * b ** j for j in range(e)), Fraction(0))
        out.append((1 - b) * tot / (1 - b ** e))
    return out


def mean_value_at_infinity(s: EPSequence) -> Fraction:
    return s.mean_value_at_infinity()


def is_bounded(s: EPSequence) -> bool:
    return s.is_bounded()


def add(s: EPSequence, t: EPSequence) -> EPSequence:
    return s + t


def scale(s: EPSequence, k) -> EPSequence:
    return s.scale(k)


def shift(s: EPSequence, k: int) -> EPSequence:
    return s.shift(k)


def rebase_modulus(s: EPSequence, e: int) -> EPSequence:
    return s.rebase_modulus(e)


def neg(s: EPSequence) -> EPSequence:
    return -s
