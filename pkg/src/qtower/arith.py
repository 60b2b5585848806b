"""Big-integer modular arithmetic kernel.

Sieve for primes in the residue class 1 mod 8, quadratic residue symbols,
square roots modulo odd primes (Tonelli-Shanks) and modulo powers of two
(Hensel lifting), and the logarithmic integral Li(x) = int_2^x dt/log(t).

All functions are pure and deterministic; tie-breaks are fixed so that
downstream consumers can reproduce results bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

# Witness set making Miller-Rabin deterministic for all n < 3.3e24,
# which covers every 64-bit input.  Desk-scale sieving stays far below.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality check (valid for n < 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimePool:
    """All primes p <= budget with p = 1 mod 8, in increasing order."""

    budget: int
    primes: tuple[int, ...]

    def __iter__(self):
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)


def sieve_primes_1_mod_8(x: int) -> PrimePool:
    """Sieve of Eratosthenes restricted to the class 1 mod 8.

    Returns the empty pool for x < 17.
    """
    if x < 2:
        raise ValueError("budget must be >= 2")
    flags = bytearray([1]) * (x + 1)
    flags[0:2] = b"\x00\x00"
    i = 2
    while i * i <= x:
        if flags[i]:
            flags[i * i :: i] = b"\x00" * len(range(i * i, x + 1, i))
        i += 1
    primes = tuple(n for n in range(17, x + 1, 8) if flags[n])
    return PrimePool(budget=x, primes=primes)


def legendre_symbol(a: int, p: int) -> int:
    """Quadratic residue symbol (a/p) in {-1, 0, +1} for an odd prime p."""
    if p == 2 or p % 2 == 0:
        raise ValueError(f"modulus {p} is even")
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    a %= p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return -1 if s == p - 1 else 1


def sqrt_mod_p(a: int, p: int) -> int:
    """Least square root of a modulo the odd prime p (Tonelli-Shanks).

    Requires (a/p) = +1.  Of the two roots s and p - s, returns the
    smaller one.
    """
    if legendre_symbol(a, p) != 1:
        raise ValueError(f"{a} is not a nonzero square mod {p}")
    a %= p
    if p % 4 == 3:
        s = pow(a, (p + 1) // 4, p)
    else:
        q, e = p - 1, 0
        while q % 2 == 0:
            q //= 2
            e += 1
        z = 2
        while legendre_symbol(z, p) != -1:
            z += 1
        c = pow(z, q, p)
        s = pow(a, (q + 1) // 2, p)
        t = pow(a, q, p)
        m = e
        while t != 1:
            t2i = t
            i = 0
            for i in range(1, m):
                t2i = t2i * t2i % p
                if t2i == 1:
                    break
            b = pow(c, 1 << (m - i - 1), p)
            s = s * b % p
            c = b * b % p
            t = t * c % p
            m = i
    assert s * s % p == a % p
    return min(s, p - s)


@dataclass(frozen=True)
class TwoAdicRoot:
    """A square root of ``radicand`` in the 2-adic integers, known mod 2^k.

    ``lift`` solves x^2 = radicand mod 2^(k+2); ``root`` is its reduction
    mod 2^k.  Solving two levels higher guarantees that {root, 2^k - root}
    are exactly the reductions of the two genuine 2-adic roots, with none
    of the spurious solutions that x^2 = a mod 2^k itself admits.
    """

    radicand: int
    precision_exponent: int
    root: int
    lift: int


def two_adic_sqrt(a: int, k: int = 3) -> TwoAdicRoot:
    """2-adic square root of a = 1 mod 8, reduced mod 2^k (k >= 3).

    The returned root satisfies root = 1 mod 4; the other reduction is
    2^k - root.
    """
    if a % 8 != 1:
        raise ValueError(f"{a} is not 1 mod 8, no 2-adic square root")
    if k < 3:
        raise ValueError("precision exponent must be >= 3")
    # Hensel lifting: from a solution mod 2^m (m >= 3), exactly one of
    # x, x + 2^(m-1) solves mod 2^(m+1).
    x = 1
    for m in range(3, k + 2):
        if (x * x - a) % (1 << (m + 1)) != 0:
            x += 1 << (m - 1)
    mod = 1 << (k + 2)
    assert (x * x - a) % mod == 0
    s = x % (1 << k)
    if s % 4 != 1:
        s = (1 << k) - s
        x = mod - x
    return TwoAdicRoot(radicand=a, precision_exponent=k, root=s, lift=x % mod)


def log_integral(x: float) -> float:
    """Li(x) = int_2^x dt/log(t), by adaptive quadrature (rel. error <= 1e-9)."""
    if x < 2:
        raise ValueError("Li is defined for x >= 2")
    if x == 2:
        return 0.0
    with mpmath.mp.workdps(30):
        val = mpmath.quad(lambda t: 1 / mpmath.log(t), [2, x])
        return float(val)
