"""Exact arithmetic in Q_p: valuations, power classes, balls and spheres.

Two kinds of scalars flow through the library:

* exact rationals (``int`` / ``Fraction``), which embed into Q_p with
  infinite precision, and
* :class:`PadicNumber`, a finite-precision element given by its valuation
  and a string of base-p unit digits.

Every predicate below accepts either.  Finite precision only matters for
membership tests, which raise :class:`PrecisionExhausted` instead of
answering from too few digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Union

INF = math.inf
DEFAULT_PRECISION = 32


class PadicError(Exception):
    """Base class for the library's domain errors."""


class PrecisionExhausted(PadicError):
    pass


class DivisionByZero(PadicError, ZeroDivisionError):
    pass


class InvalidSubgroup(PadicError, ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def check_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or p < 3 or not is_prime(p):
        raise ValueError(f"residue characteristic must be an odd prime, got {p!r}")
    return p


@dataclass(frozen=True)
class Prime:
    p: int

    def __post_init__(self):
        check_prime(self.p)

    @property
    def q(self) -> int:
        # residue field cardinality; equal to p since K = Q_p
        return self.p

    def __int__(self):
        return self.p


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def hensel_margin(n: int, p: int) -> int:
    """Number of unit digits that decide whether a unit is an n-th power."""
    return 2 * vp_int(n, p) + 1 if n % p == 0 else 1


# ---------------------------------------------------------------------------
# Finite-precision p-adic numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PadicNumber:
    """x = p^valuation * sum(unit_digits[i] * p^i), known to len(unit_digits) digits."""

    p: int
    valuation: Union[int, float]
    unit_digits: tuple[int, ...]

    def __post_init__(self):
        if self.valuation == INF:
            if self.unit_digits:
                raise ValueError("zero carries no unit digits")
            return
        if not self.unit_digits:
            raise ValueError("nonzero p-adic number needs at least one digit")
        if not 0 < self.unit_digits[0] < self.p:
            raise ValueError("leading unit digit must be nonzero")
        if any(not 0 <= d < self.p for d in self.unit_digits):
            raise ValueError("digits must lie in 0..p-1")

    # construction ----------------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "PadicNumber":
        return cls(p, INF, ())

    @classmethod
    def from_unit(cls, p: int, valuation: int, unit: int, precision: int) -> "PadicNumber":
        unit %= p ** precision
        digits = []
        for _ in range(precision):
            unit, d = divmod(unit, p)
            digits.append(d)
        return cls(p, valuation, tuple(digits))

    @classmethod
    def from_rational(cls, p: int, r, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        if precision < 1:
            raise ValueError("precision must be at least one digit")
        r = Fraction(r)
        if r == 0:
            return cls.zero(p)
        v = valuation(r, p)
        return cls.from_unit(p, v, unit_residue(r, p, precision), precision)

    # accessors -------------------------------------------------------------
    @property
    def precision(self) -> int:
        return len(self.unit_digits)

    @property
    def unit(self) -> int:
        return sum(d * self.p ** i for i, d in enumerate(self.unit_digits))

    @property
    def absolute_precision(self):
        """The number is known modulo p**absolute_precision."""
        return self.valuation + self.precision

    def is_zero(self) -> bool:
        return self.valuation == INF

    def abs(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.p) ** (-self.valuation)

    def ac(self) -> int:
        """Angular component: the leading unit digit."""
        if self.is_zero():
            return 0
        return self.unit_digits[0]

    def to_fraction(self) -> Fraction:
        """The truncated expansion as a rational (exact only up to precision)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        return PadicNumber.from_rational(self.p, other, max(self.precision, 1) + 1)

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber.from_unit(self.p, self.valuation, -self.unit, self.precision)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        p = self.p
        v = min(self.valuation, other.valuation)
        top = min(self.absolute_precision, other.absolute_precision)
        a = self.unit * p ** (self.valuation - v)
        b = other.unit * p ** (other.valuation - v)
        s = (a + b) % p ** (top - v)
        if s == 0:
            raise PrecisionExhausted("cancellation consumed every known digit")
        w = vp_int(s, p)
        return PadicNumber.from_unit(p, v + w, s // p ** w, top - v - w)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return PadicNumber.zero(self.p)
        k = min(self.precision, other.precision)
        return PadicNumber.from_unit(self.p, self.valuation + other.valuation,
                                     self.unit * other.unit, k)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise DivisionByZero("0 has no inverse")
        k = self.precision
        return PadicNumber.from_unit(self.p, -self.valuation,
                                     pow(self.unit, -1, self.p ** k), k)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __str__(self):
        if self.is_zero():
            return "0"
        digits = "".join(str(d) for d in reversed(self.unit_digits))
        return f"...{digits} * {self.p}^{self.valuation}"


def padic_from_rational(p: int, r, precision: int = DEFAULT_PRECISION) -> PadicNumber:
    return PadicNumber.from_rational(p, r, precision)


add = PadicNumber.__add__
mul = PadicNumber.__mul__
neg = PadicNumber.__neg__
inv = PadicNumber.inverse


# ---------------------------------------------------------------------------
# Valuation helpers working on both exact rationals and PadicNumbers
# ---------------------------------------------------------------------------

Scalar = Union[int, Fraction, PadicNumber]


def valuation(x, p: int):
    """ord_p(x); math.inf for zero."""
    if isinstance(x, PadicNumber):
        return x.valuation
    x = Fraction(x)
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def vector_valuation(v: Iterable, p: int):
    """Valuation of the sup norm: min of coordinate valuations."""
    return min((valuation(c, p) for c in v), default=INF)


def unit_residue(x, p: int, k: int) -> int:
    """x * p^(-ord x) reduced mod p^k."""
    if isinstance(x, PadicNumber):
        if x.is_zero():
            raise ValueError("zero has no unit part")
        if x.precision < k:
            raise PrecisionExhausted(
                f"need {k} unit digits, only {x.precision} known")
        return x.unit % p ** k
    x = Fraction(x)
    v = valuation(x, p)
    u = x / Fraction(p) ** v
    m = p ** k
    return u.numerator * pow(u.denominator, -1, m) % m


def is_zero(x) -> bool:
    if isinstance(x, PadicNumber):
        return x.is_zero()
    return x == 0


def sub(a, b):
    """a - b, staying exact when both inputs are rationals."""
    if isinstance(a, PadicNumber) or isinstance(b, PadicNumber):
        pa = a if isinstance(a, PadicNumber) else None
        pb = b if isinstance(b, PadicNumber) else None
        ref = pa or pb
        if pa is None:
            a = PadicNumber.from_rational(ref.p, a, ref.precision + 2 * _shift(ref, a))
        if pb is None:
            b = PadicNumber.from_rational(ref.p, b, ref.precision + 2 * _shift(ref, b))
        if a.is_zero():
            return -b
        if b.is_zero():
            return a
        return a - b
    return Fraction(a) - Fraction(b)


def _shift(ref: PadicNumber, r) -> int:
    # extra digits for an exact rational so alignment never costs precision
    if ref.is_zero() or Fraction(r) == 0:
        return 0
    return abs(int(valuation(r, ref.p) - ref.valuation))


# ---------------------------------------------------------------------------
# n-th powers
# ---------------------------------------------------------------------------

def _lift_roots(u: int, n: int, p: int, k: int) -> list[int]:
    """All y mod p^k with y^n = u mod p^k, grown digit by digit from roots mod p."""
    roots = [y for y in range(1, p) if (pow(y, n, p) - u) % p == 0]
    for j in range(1, k):
        mod = p ** (j + 1)
        roots = [y + t * p ** j for y in roots for t in range(p)
                 if (pow(y + t * p ** j, n, mod) - u) % mod == 0]
        if not roots:
            break
    return roots


def is_nth_power(x, n: int, p: int | None = None) -> bool:
    """Decide x in P_n (nonzero n-th powers of Q_p)."""
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(x, PadicNumber):
        p = x.p
    if p is None:
        raise ValueError("prime required for rational input")
    if is_zero(x):
        raise ValueError("0 is not in K^x")
    if valuation(x, p) % n:
        return False
    k = hensel_margin(n, p)
    u = unit_residue(x, p, k)
    return bool(_lift_roots(u, n, p, k))


class PowerClasses:
    """The finite group K^x / P_n, enumerated by brute force.

    A class is keyed by (ord(x) mod n, r) where r is the least positive
    integer in the unit class of x modulo p^margin.
    """

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n
        self.k = hensel_margin(n, p)
        self.mod = p ** self.k
        units = [u for u in range(1, self.mod) if u % p]
        self.powers = frozenset(pow(u, n, self.mod) for u in units)
        canon = {}
        for u in units:
            if u not in canon:
                for h in self.powers:
                    canon[u * h % self.mod] = u
        self._canon = canon
        self.unit_reps = tuple(sorted(set(canon.values())))

    @property
    def unit_count(self) -> int:
        """[R^x : (R^x)^n]."""
        return len(self.unit_reps)

    @property
    def index(self) -> int:
        """[K^x : P_n]."""
        return self.n * self.unit_count

    def key(self, x) -> tuple[int, int]:
        v = valuation(x, self.p)
        if v == INF:
            raise ValueError("0 has no power class")
        return (int(v) % self.n, self._canon[unit_residue(x, self.p, self.k)])

    def keys(self) -> list[tuple[int, int]]:
        return [(a, r) for a, r in product(range(self.n), self.unit_reps)]

    def rep(self, key) -> Fraction:
        a, r = key
        return Fraction(r) * Fraction(self.p) ** a

    def mul(self, k1, k2):
        return self.key(self.rep(k1) * self.rep(k2))

    def inverse(self, key):
        return self.key(1 / self.rep(key))

    def canonical_rep(self, x) -> Fraction:
        """The canonical representative of the class of x (same valuation kept mod n)."""
        return self.rep(self.key(x))


@lru_cache(maxsize=None)
def power_classes(p: int, n: int) -> PowerClasses:
    return PowerClasses(p, n)


@lru_cache(maxsize=None)
def _projection_table(p: int, big: int, small: int) -> dict:
    pb, ps = power_classes(p, big), power_classes(p, small)
    return {k: ps.key(pb.rep(k)) for k in pb.keys()}


def project_key(p: int, key, big: int, small: int):
    """Image of a P_big class in K^x / P_small (small must divide big)."""
    return _projection_table(p, big, small)[key]


@lru_cache(maxsize=65536)
def _refine(p: int, keys: frozenset, n: int, m: int) -> frozenset:
    table = _projection_table(p, m, n)
    return frozenset(k for k, v in table.items() if v in keys)


def refine_keys(p: int, keys: Iterable, n: int, m: int) -> frozenset:
    """P_m classes (n | m) making up the given P_n classes."""
    return _refine(p, frozenset(keys), n, m)


# ---------------------------------------------------------------------------
# Cosets, subgroups, balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerCoset:
    """lam * P_n; lam = 0 stands for the singleton {0}."""

    p: int
    lam: Fraction
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("coset exponent must be positive")
        object.__setattr__(self, "lam", Fraction(self.lam))

    def contains(self, x) -> bool:
        return membership(x, self)


def membership(x, c: PowerCoset) -> bool:
    if c.lam == 0:
        return is_zero(x)
    if is_zero(x):
        return False
    if isinstance(x, PadicNumber):
        q = x / c.lam
    else:
        q = Fraction(x) / c.lam
    return is_nth_power(q, c.n, c.p)


class Subgroup:
    """An open finite-index subgroup of K^x given as a union of P_N cosets."""

    def __init__(self, p: int, N: int, coset_reps: Iterable = (1,)):
        check_prime(p)
        if N < 1:
            raise InvalidSubgroup("exponent must be positive")
        self.p = p
        self.N = N
        pc = power_classes(p, N)
        keys = frozenset(pc.key(Fraction(r)) for r in coset_reps)
        one = pc.key(1)
        if one not in keys:
            raise InvalidSubgroup("the trivial coset P_N must be represented")
        for a in keys:
            for b in keys:
                if pc.mul(a, b) not in keys:
                    raise InvalidSubgroup("coset representatives are not closed under products")
        self.keys = keys

    @classmethod
    def P(cls, p: int, n: int) -> "Subgroup":
        return cls(p, n, (1,))

    def __repr__(self):
        return f"Subgroup(p={self.p}, N={self.N}, cosets={len(self.keys)})"

    def __eq__(self, other):
        if not isinstance(other, Subgroup) or other.p != self.p:
            return NotImplemented
        L = math.lcm(self.N, other.N)
        return self.keys_at(L) == other.keys_at(L)

    def __hash__(self):
        return hash((self.p, self.index))

    def keys_at(self, L: int) -> frozenset:
        if L % self.N:
            raise ValueError("refinement exponent must be a multiple of N")
        return refine_keys(self.p, self.keys, self.N, L)

    @property
    def index(self) -> int:
        return subgroup_index(self)

    def contains(self, x) -> bool:
        return power_classes(self.p, self.N).key(x) in self.keys

    def issubset(self, other: "Subgroup") -> bool:
        L = math.lcm(self.N, other.N)
        return self.keys_at(L) <= other.keys_at(L)

    def intersect(self, other: "Subgroup") -> "Subgroup":
        L = math.lcm(self.N, other.N)
        keys = self.keys_at(L) & other.keys_at(L)
        pc = power_classes(self.p, L)
        return Subgroup(self.p, L, [pc.rep(k) for k in keys])

    def refined(self, L: int) -> "Subgroup":
        """Same group presented with cosets of P_L."""
        pc = power_classes(self.p, L)
        return Subgroup(self.p, L, [pc.rep(k) for k in self.keys_at(L)])


def subgroup_index(group: Subgroup) -> int:
    return power_classes(group.p, group.N).index // len(group.keys)


@dataclass(frozen=True)
class Ball:
    """B(x, n) = {z : ord(z_i - x_i) >= n for all i}."""

    p: int
    center: tuple
    level: int

    def contains(self, z) -> bool:
        return all(valuation(sub(a, b), self.p) >= self.level
                   for a, b in zip(z, self.center))

    def volume(self) -> Fraction:
        return Fraction(self.p) ** (-self.level * len(self.center))


@dataclass(frozen=True)
class Sphere:
    """S(x, n) = B(x, n) minus B(x, n+1) in the sup norm."""

    p: int
    center: tuple
    level: int

    def contains(self, z) -> bool:
        d = vector_valuation([sub(a, b) for a, b in zip(z, self.center)], self.p)
        return d == self.level

    def volume(self) -> Fraction:
        m = len(self.center)
        q = Fraction(self.p)
        return (1 - q ** -m) * q ** (-self.level * m)
