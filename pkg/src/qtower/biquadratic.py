"""Exact arithmetic in biquadratic fields L = Q(sqrt(p), sqrt(q)).

Elements live on the basis {1, sqrt(p), sqrt(q), sqrt(pq)} with exact
rational coordinates (p < q is enforced so mirrored constructions agree).
The module provides certified real embeddings through interval
arithmetic, integrality tests against the integral basis of O_L,
recovery of unit square roots by rounding high-precision embeddings to
the quarter-integer lattice and verifying by exact squaring, the four
ring homomorphisms O_L -> Z/8 at the split prime 2, and a squareness
test in L* with exact certificates for squares and residue-character
witnesses for nonsquares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from typing import Iterator

import mpmath
from mpmath import iv

from .arith import is_prime, legendre_symbol, sqrt_mod_p, two_adic_sqrt
from .quadratic import QuadInt, is_squarefree

SIGN_PATTERNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class SquareRootRecoveryError(RuntimeError):
    """No integral square root was found at maximum working precision."""


@dataclass(frozen=True)
class BiquadElem:
    """x0 + x1*sqrt(p) + x2*sqrt(q) + x3*sqrt(pq) with rational xi."""

    p: int
    q: int
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError("radicands must be distinct")
        if self.p > self.q:
            c = self.coords
            object.__setattr__(self, "p", self.q)
            object.__setattr__(self, "q", self.p)
            object.__setattr__(self, "coords", (c[0], c[2], c[1], c[3]))
        if not (is_squarefree(self.p) and is_squarefree(self.q)):
            raise ValueError("radicands must be squarefree")
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def rational(cls, p: int, q: int, x: Fraction | int) -> "BiquadElem":
        zero = Fraction(0)
        return cls(p, q, (Fraction(x), zero, zero, zero))

    @classmethod
    def from_quadint(cls, p: int, q: int, e: QuadInt) -> "BiquadElem":
        """Coerce an element of Q(sqrt(d)) for d in {p, q, pq} into L."""
        x, y = e.sqrt_coords()
        zero = Fraction(0)
        if e.d == p:
            coords = (x, y, zero, zero)
        elif e.d == q:
            coords = (x, zero, y, zero)
        elif e.d == p * q:
            coords = (x, zero, zero, y)
        else:
            raise ValueError(f"sqrt({e.d}) does not lie in Q(sqrt({p}), sqrt({q}))")
        return cls(p, q, coords)

    def _check(self, other: "BiquadElem") -> None:
        if (self.p, self.q) != (other.p, other.q):
            raise ValueError("mixed biquadratic fields")

    def __add__(self, other: "BiquadElem") -> "BiquadElem":
        self._check(other)
        return BiquadElem(self.p, self.q, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "BiquadElem") -> "BiquadElem":
        self._check(other)
        return BiquadElem(self.p, self.q, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "BiquadElem":
        return BiquadElem(self.p, self.q, tuple(-a for a in self.coords))

    def __mul__(self, other: "BiquadElem") -> "BiquadElem":
        self._check(other)
        p, q = self.p, self.q
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return BiquadElem(
            p,
            q,
            (
                x0 * y0 + p * x1 * y1 + q * x2 * y2 + p * q * x3 * y3,
                x0 * y1 + x1 * y0 + q * (x2 * y3 + x3 * y2),
                x0 * y2 + x2 * y0 + p * (x1 * y3 + x3 * y1),
                x0 * y3 + x3 * y0 + x1 * y2 + x2 * y1,
            ),
        )

    def scale(self, r: Fraction | int) -> "BiquadElem":
        r = Fraction(r)
        return BiquadElem(self.p, self.q, tuple(r * c for c in self.coords))

    def __pow__(self, n: int) -> "BiquadElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = BiquadElem.rational(self.p, self.q, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self, signs: tuple[int, int]) -> "BiquadElem":
        """Field automorphism sqrt(p) -> signs[0]*sqrt(p), sqrt(q) -> signs[1]*sqrt(q)."""
        s, t = signs
        x0, x1, x2, x3 = self.coords
        return BiquadElem(self.p, self.q, (x0, s * x1, t * x2, s * t * x3))

    def norm(self) -> Fraction:
        """Product of the four conjugates (a rational number)."""
        prod = BiquadElem.rational(self.p, self.q, 1)
        for signs in SIGN_PATTERNS:
            prod = prod * self.conjugate(signs)
        assert prod.coords[1] == prod.coords[2] == prod.coords[3] == 0
        return prod.coords[0]

    def inverse(self) -> "BiquadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("element is zero")
        cof = BiquadElem.rational(self.p, self.q, 1)
        for signs in SIGN_PATTERNS[1:]:
            cof = cof * self.conjugate(signs)
        return cof.scale(1 / n)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return self.coords[1] == self.coords[2] == self.coords[3] == 0

    def __str__(self) -> str:
        x0, x1, x2, x3 = self.coords
        return (
            f"{x0} + {x1}*sqrt({self.p}) + {x2}*sqrt({self.q}) "
            f"+ {x3}*sqrt({self.p * self.q})"
        )


def _iv_fraction(f: Fraction):
    return iv.mpf(f.numerator) / iv.mpf(f.denominator)


def embed(e: BiquadElem, signs: tuple[int, int] = (1, 1), precision: int = 64):
    """Certified enclosure of the real embedding of e fixed by ``signs``.

    Returns an interval (mpmath.iv) that provably contains
    x0 + s*x1*sqrt(p) + t*x2*sqrt(q) + s*t*x3*sqrt(pq).
    """
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    s, t = signs
    old = iv.prec
    try:
        iv.prec = precision
        rp = iv.sqrt(iv.mpf(e.p))
        rq = iv.sqrt(iv.mpf(e.q))
        x0, x1, x2, x3 = (_iv_fraction(c) for c in e.coords)
        return x0 + s * x1 * rp + t * x2 * rq + s * t * x3 * rp * rq
    finally:
        iv.prec = old


def embedding_signs(e: BiquadElem) -> tuple[int, int, int, int]:
    """Certified signs of the four real embeddings (order: ++, +-, -+, --)."""
    if e.is_zero():
        raise ValueError("zero has no sign")
    precision = max(96, _max_numerator_bits(e) + 64)
    for _ in range(24):
        out = []
        for signs in SIGN_PATTERNS:
            box = embed(e, signs, precision)
            if box.a > 0:
                out.append(1)
            elif box.b < 0:
                out.append(-1)
            else:
                break
        else:
            return tuple(out)
        precision *= 2
    raise RuntimeError("could not certify embedding signs (is the element zero?)")


def total_positivity(e: BiquadElem) -> str:
    """Classify e as totally_positive, totally_negative, or mixed."""
    signs = embedding_signs(e)
    if all(s > 0 for s in signs):
        return "totally_positive"
    if all(s < 0 for s in signs):
        return "totally_negative"
    return "mixed"


def _integral_basis(p: int, q: int) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
    """Integral basis of O_L on the {1, sqrt(p), sqrt(q), sqrt(pq)} coordinates.

    p, q odd, coprime, squarefree.  The three cases by residues mod 4:
      1,1 -> 1, (1+sqrt(p))/2, (1+sqrt(q))/2, (1+sqrt(p))(1+sqrt(q))/4
      3,1 -> 1, sqrt(p), (1+sqrt(q))/2, (sqrt(p)+sqrt(pq))/2
      3,3 -> 1, sqrt(p), (sqrt(p)+sqrt(q))/2, (1+sqrt(pq))/2
    """
    F = Fraction
    one = (F(1), F(0), F(0), F(0))
    if p % 2 == 0 or q % 2 == 0:
        raise ValueError("even radicands are not supported")
    from math import gcd

    if gcd(p, q) != 1:
        raise ValueError("radicands must be coprime")
    pm, qm = p % 4, q % 4
    if pm == 1 and qm == 1:
        return [
            one,
            (F(1, 2), F(1, 2), F(0), F(0)),
            (F(1, 2), F(0), F(1, 2), F(0)),
            (F(1, 4), F(1, 4), F(1, 4), F(1, 4)),
        ]
    if pm == 3 and qm == 1:
        return [
            one,
            (F(0), F(1), F(0), F(0)),
            (F(1, 2), F(0), F(1, 2), F(0)),
            (F(0), F(1, 2), F(0), F(1, 2)),
        ]
    if pm == 1 and qm == 3:
        return [
            one,
            (F(0), F(0), F(1), F(0)),
            (F(1, 2), F(1, 2), F(0), F(0)),
            (F(0), F(0), F(1, 2), F(1, 2)),
        ]
    return [
        one,
        (F(0), F(1), F(0), F(0)),
        (F(0), F(1, 2), F(1, 2), F(0)),
        (F(1, 2), F(0), F(0), F(1, 2)),
    ]


def integral_coordinates(e: BiquadElem) -> tuple[Fraction, ...]:
    """Exact coordinates of e over the integral basis of O_L."""
    basis = _integral_basis(e.p, e.q)
    # Solve sum_k m_k * basis[k] = e by Gaussian elimination over Q.
    rows = [[basis[k][i] for k in range(4)] + [e.coords[i]] for i in range(4)]
    for col in range(4):
        piv = next(r for r in range(col, 4) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pivval = rows[col][col]
        rows[col] = [v / pivval for v in rows[col]]
        for r in range(4):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
    return tuple(rows[i][4] for i in range(4))


def is_integral(e: BiquadElem) -> bool:
    """True iff e lies in the ring of integers O_L."""
    return all(c.denominator == 1 for c in integral_coordinates(e))


def _max_numerator_bits(e: BiquadElem) -> int:
    return max(abs(c.numerator).bit_length() for c in e.coords)


def _round_quarter(x) -> Fraction:
    """Nearest rational with denominator dividing 4 to a real value."""
    return Fraction(int(mpmath.nint(4 * x)), 4)


def recover_square_root(w0: BiquadElem) -> BiquadElem | None:
    """Exact square root of w0 in O_L, or None.

    w0 must be totally positive.  Candidate embeddings of the root are
    +-sqrt of the embeddings of w0 (the global sign is fixed by
    positivity at the ++ embedding); each of the 8 sign patterns is
    inverted to coordinates, rounded to the lattice of denominators
    dividing 4, and accepted only when exact squaring reproduces w0 and
    the result is integral.  Starts at twice the coordinate bit length
    plus a guard, doubling on failure up to 8 times.
    """
    p, q = w0.p, w0.q
    precision = 2 * _max_numerator_bits(w0) + 128
    for _ in range(9):
        with mpmath.mp.workprec(precision):
            rp = mpmath.sqrt(p)
            rq = mpmath.sqrt(q)
            targets = []
            for signs in SIGN_PATTERNS:
                x0, x1, x2, x3 = (
                    mpmath.mpf(c.numerator) / c.denominator for c in w0.coords
                )
                s, t = signs
                val = x0 + s * x1 * rp + t * x2 * rq + s * t * x3 * rp * rq
                if val <= 0:
                    # Tiny positive embedding lost to rounding; escalate.
                    targets = None
                    break
                targets.append(mpmath.sqrt(val))
            if targets is None:
                precision *= 2
                continue
            for mask in range(8):
                r = [
                    targets[0],
                    targets[1] * (1 - 2 * (mask & 1)),
                    targets[2] * (1 - 2 * ((mask >> 1) & 1)),
                    targets[3] * (1 - 2 * ((mask >> 2) & 1)),
                ]
                u = BiquadElem(
                    p,
                    q,
                    (
                        _round_quarter((r[0] + r[1] + r[2] + r[3]) / 4),
                        _round_quarter((r[0] + r[1] - r[2] - r[3]) / (4 * rp)) ,
                        _round_quarter((r[0] - r[1] + r[2] - r[3]) / (4 * rq)),
                        _round_quarter((r[0] - r[1] - r[2] + r[3]) / (4 * rp * rq)),
                    ),
                )
                if u * u == w0 and is_integral(u):
                    return u
        precision *= 2
    return None


def unit_square_root(
    p: int, q: int, e_i: QuadInt, e_j: QuadInt, e_ij: QuadInt
) -> tuple[int | None, BiquadElem]:
    """The unit u in O_L with u^2 = e_ij, or u^2 = s*e_i*e_j*e_ij.

    If e_ij is totally positive the target is e_ij itself and s is None;
    otherwise s in {+1, -1} is the unique sign making s*e_i*e_j*e_ij
    totally positive.  u is normalized positive at the ++ embedding.
    Raises SquareRootRecoveryError if no integral root verifies, which
    contradicts the existence guarantee for pairs that reach this stage.
    """
    if e_i.norm() != -1 or e_j.norm() != -1:
        raise ValueError("component units must have norm -1")
    bi = BiquadElem.from_quadint(p, q, e_i)
    bj = BiquadElem.from_quadint(p, q, e_j)
    bij = BiquadElem.from_quadint(p, q, e_ij)
    if total_positivity(bij) == "totally_positive":
        s, w0 = None, bij
    else:
        prod = bi * bj * bij
        if total_positivity(prod) == "totally_positive":
            s, w0 = 1, prod
        elif total_positivity(-prod) == "totally_positive":
            s, w0 = -1, -prod
        else:
            raise SquareRootRecoveryError(
                f"no totally positive square target for ({p}, {q})"
            )
    u = recover_square_root(w0)
    if u is None:
        raise SquareRootRecoveryError(
            f"no integral square root found at maximum precision for ({p}, {q})"
        )
    return s, u


@dataclass(frozen=True)
class PsiHom:
    """One of the four ring homomorphisms O_L -> Z/8 over the split prime 2.

    s_p, s_q are residues mod 32 squaring to p and q at the precision of
    two_adic_sqrt; the four homomorphisms are the sign choices.
    """

    p: int
    q: int
    s_p: int
    s_q: int

    def __call__(self, e: BiquadElem) -> int:
        if (e.p, e.q) != (self.p, self.q):
            raise ValueError("element from a different field")
        scaled = [4 * c for c in e.coords]
        if any(c.denominator != 1 for c in scaled):
            raise ValueError("element not integral at 2")
        n0, n1, n2, n3 = (int(c) for c in scaled)
        n = (n0 + n1 * self.s_p + n2 * self.s_q + n3 * self.s_p * self.s_q) % 32
        if n % 4 != 0:
            raise ValueError("element not integral at 2")
        return (n // 4) % 8


@cache
def psi_homs(p: int, q: int) -> tuple[PsiHom, PsiHom, PsiHom, PsiHom]:
    """The four homomorphisms O_L -> Z/8 for p = q = 1 mod 8.

    Ordered by sign pattern (+,+), (+,-), (-,+), (-,-) applied to the
    canonical roots, which are taken = 1 mod 4.
    """
    if p % 8 != 1 or q % 8 != 1:
        raise ValueError("2 splits in L only when p = q = 1 mod 8")
    if p > q:
        p, q = q, p
    sp = two_adic_sqrt(p, 5).root
    sq = two_adic_sqrt(q, 5).root
    return tuple(
        PsiHom(p=p, q=q, s_p=s * sp % 32, s_q=t * sq % 32) for s, t in SIGN_PATTERNS
    )


def _split_prime_witnesses(p: int, q: int, skip: frozenset[int]) -> Iterator[int]:
    r = 3
    while True:
        if (
            r not in skip
            and r % 2 == 1
            and p % r != 0
            and q % r != 0
            and is_prime(r)
            and legendre_symbol(p, r) == 1
            and legendre_symbol(q, r) == 1
        ):
            yield r
        r += 2


def is_square_in_field(e: BiquadElem, witnesses: int = 20) -> str:
    """Decide squareness of e in L* with a certificate.

    Returns "square_certified" only when an exact square root has been
    recovered and verified by squaring, and "nonsquare_witnessed" when
    some real embedding is negative or some residue-field quadratic
    character at a split prime evaluates to -1.  At least ``witnesses``
    split primes are consulted before the exact-root attempt; if that
    also fails, raises RuntimeError("inconclusive").
    """
    if e.is_zero():
        raise ValueError("squareness of zero is not tested")
    if any(s < 0 for s in embedding_signs(e)):
        return "nonsquare_witnessed"
    # Clear denominators: e and den^2*e have the same square class.
    den = math.lcm(*(c.denominator for c in e.coords))
    scaled = e.scale(den * den)
    ints = tuple(int(c) for c in scaled.coords)
    tried = 0
    for r in _split_prime_witnesses(e.p, e.q, frozenset()):
        if tried >= witnesses:
            break
        bp = sqrt_mod_p(e.p, r)
        bq = sqrt_mod_p(e.q, r)
        saw_unit = False
        for s, t in SIGN_PATTERNS:
            val = (
                ints[0]
                + ints[1] * s * bp
                + ints[2] * t * bq
                + ints[3] * s * t * bp * bq
            ) % r
            if val == 0:
                continue
            saw_unit = True
            if legendre_symbol(val, r) == -1:
                return "nonsquare_witnessed"
        if saw_unit:
            tried += 1
    root = recover_square_root(scaled)
    if root is not None:
        return "square_certified"
    raise RuntimeError("inconclusive: no witness and no exact root found")
