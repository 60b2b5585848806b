"""Exact arithmetic in real quadratic fields Q(sqrt(d)).

Elements of the maximal order are stored on the basis {1, omega_d} with
omega_d = (1 + sqrt(d))/2 for d = 1 mod 4 and omega_d = sqrt(d) otherwise.
Fundamental units come from the PQa continued-fraction recurrence applied
directly to omega_d, so the unit of the maximal order is produced without
an index correction.  Signs are decided exactly with integer arithmetic,
never through floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import isqrt


def is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    if d % 4 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 2
    return True


def sign_plus_root(x: Fraction, y: Fraction, d: int) -> int:
    """Exact sign of x + y*sqrt(d) under the embedding sqrt(d) -> +sqrt(d)."""
    if x == 0 and y == 0:
        return 0
    if x >= 0 and y >= 0:
        return 1
    if x <= 0 and y <= 0:
        return -1
    # Opposite signs: compare x^2 with d*y^2; equality is impossible
    # because sqrt(d) is irrational.
    if x > 0:
        return 1 if x * x > d * y * y else -1
    return 1 if x * x < d * y * y else -1


@dataclass(frozen=True)
class QuadInt:
    """a + b*omega_d in the maximal order of Q(sqrt(d))."""

    d: int
    a: int
    b: int

    def _check(self, other: "QuadInt") -> None:
        if self.d != other.d:
            raise ValueError(f"mixed fields: sqrt({self.d}) vs sqrt({other.d})")

    @classmethod
    def from_int(cls, d: int, n: int) -> "QuadInt":
        return cls(d, n, 0)

    @property
    def half_integral_basis(self) -> bool:
        return self.d % 4 == 1

    def sqrt_coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates (x, y) with self = x + y*sqrt(d)."""
        if self.half_integral_basis:
            return Fraction(2 * self.a + self.b, 2), Fraction(self.b, 2)
        return Fraction(self.a), Fraction(self.b)

    @classmethod
    def from_sqrt_coords(cls, d: int, x: Fraction, y: Fraction) -> "QuadInt":
        if d % 4 == 1:
            b = 2 * y
            a = x - y
        else:
            b = y
            a = x
        if a.denominator != 1 or b.denominator != 1:
            raise ValueError(f"{x} + {y}*sqrt({d}) is not in the maximal order")
        return cls(d, int(a), int(b))

    def __add__(self, other: "QuadInt") -> "QuadInt":
        self._check(other)
        return QuadInt(self.d, self.a + other.a, self.b + other.b)

    def __sub__(self, other: "QuadInt") -> "QuadInt":
        self._check(other)
        return QuadInt(self.d, self.a - other.a, self.b - other.b)

    def __neg__(self) -> "QuadInt":
        return QuadInt(self.d, -self.a, -self.b)

    def __mul__(self, other: "QuadInt") -> "QuadInt":
        self._check(other)
        a, b, c, e = self.a, self.b, other.a, other.b
        if self.half_integral_basis:
            # omega^2 = omega + (d-1)/4
            m = (self.d - 1) // 4
            return QuadInt(self.d, a * c + b * e * m, a * e + b * c + b * e)
        return QuadInt(self.d, a * c + b * e * self.d, a * e + b * c)

    def __pow__(self, n: int) -> "QuadInt":
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadInt.from_int(self.d, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "QuadInt":
        """Image under sqrt(d) -> -sqrt(d)."""
        if self.half_integral_basis:
            return QuadInt(self.d, self.a + self.b, -self.b)
        return QuadInt(self.d, self.a, -self.b)

    def norm(self) -> int:
        if self.half_integral_basis:
            return self.a * self.a + self.a * self.b - self.b * self.b * (self.d - 1) // 4
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> int:
        if self.half_integral_basis:
            return 2 * self.a + self.b
        return 2 * self.a

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def inverse(self) -> "QuadInt":
        n = self.norm()
        if abs(n) != 1:
            raise ValueError("only units are invertible in the order")
        conj = self.conjugate()
        return conj if n == 1 else -conj

    def sign_at_positive_root(self) -> int:
        x, y = self.sqrt_coords()
        return sign_plus_root(x, y, self.d)

    def compare_one(self) -> int:
        """Exact sign of self - 1 at the positive embedding."""
        x, y = self.sqrt_coords()
        return sign_plus_root(x - 1, y, self.d)

    def __str__(self) -> str:
        x, y = self.sqrt_coords()
        return f"{x} + {y}*sqrt({self.d})"


@dataclass(frozen=True)
class FundamentalUnitRecord:
    d: int
    unit: QuadInt
    norm: int
    cf_period: int


def _pqa_cycle(d: int, p0: int, q0: int) -> tuple[list[int], int, int, int]:
    """Partial quotients around the first cycle of (p0 + sqrt(d))/q0.

    Returns (cycle quotients, P, Q, cycle length) where (P + sqrt(d))/Q is
    the complete quotient at which the expansion first re-enters itself.
    """
    r = isqrt(d)
    seen: dict[tuple[int, int], int] = {}
    quots: list[int] = []
    p, q = p0, q0
    while (p, q) not in seen:
        seen[(p, q)] = len(quots)
        a = (p + r) // q
        quots.append(a)
        p = a * q - p
        q = (d - p * p) // q
        assert q > 0
    j = seen[(p, q)]
    return quots[j:], p, q, len(quots) - j


def _fundamental_unit_core(d: int) -> FundamentalUnitRecord:
    if d % 4 == 1:
        p0, q0 = 1, 2
    else:
        p0, q0 = 0, 1
    cycle, pj, qj, period = _pqa_cycle(d, p0, q0)
    # Multiply the cycle matrices [[a,1],[1,0]]; one pass around the
    # primitive cycle is the fundamental automorphism of the lattice
    # Z + Z*(pj + sqrt(d))/qj, whose multiplier ring is the maximal order.
    m00, m01, m10, m11 = 1, 0, 0, 1
    for a in cycle:
        m00, m01, m10, m11 = m00 * a + m01, m00, m10 * a + m11, m10
    # unit = m10 * (pj + sqrt(d))/qj + m11
    x = Fraction(m10 * pj + m11 * qj, qj)
    y = Fraction(m10, qj)
    unit = QuadInt.from_sqrt_coords(d, x, y)
    n = unit.norm()
    if abs(n) != 1:
        raise AssertionError(f"continued fraction of sqrt({d}) produced a non-unit")
    assert unit.compare_one() > 0
    assert n == (-1) ** period
    return FundamentalUnitRecord(d=d, unit=unit, norm=n, cf_period=period)


@cache
def fundamental_unit(d: int) -> FundamentalUnitRecord:
    """Fundamental unit of the maximal order of Q(sqrt(d)), normalized > 1."""
    if d < 2 or not is_squarefree(d):
        raise ValueError(f"{d} is not a squarefree integer >= 2")
    return _fundamental_unit_core(d)


def normalize_at_least_one_positive(e: QuadInt) -> QuadInt:
    """Flip the sign of a unit so its positive-root embedding is positive."""
    if not e.is_unit():
        raise ValueError("sign normalization applies to units")
    return e if e.sign_at_positive_root() > 0 else -e


def canonical_unit(e: QuadInt) -> QuadInt:
    """The representative of {+-e, +-1/e} that exceeds 1 at the positive root.

    Fundamental units are only pinned down up to sign and inversion; all
    pipeline arithmetic goes through this normalization so the output is
    independent of which representative a unit routine happened to yield.
    """
    e = normalize_at_least_one_positive(e)
    if e.compare_one() < 0:
        e = normalize_at_least_one_positive(e.inverse())
    if e.compare_one() <= 0:
        raise ValueError("unit has no representative exceeding 1")
    return e


def unit_mod_prime(e: QuadInt, beta: int, r: int) -> int:
    """Reduce e = a + b*omega_d at a prime r where beta^2 = d mod r.

    Sends sqrt(d) to beta, so omega_d maps to (1 + beta)/2 when the basis
    is half-integral.  r must be odd so 2 is invertible.
    """
    if r % 2 == 0:
        raise ValueError("reduction modulus must be odd")
    if (beta * beta - e.d) % r != 0:
        raise ValueError(f"{beta}^2 != {e.d} mod {r}")
    if e.half_integral_basis:
        inv2 = pow(2, -1, r)
        return (e.a + e.b * (1 + beta) * inv2) % r
    return (e.a + e.b * beta) % r
