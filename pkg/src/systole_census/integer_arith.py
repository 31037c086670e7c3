"""Exact integer utilities: factorization, squarefree test, Kronecker symbol.

Everything here is exact; no floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .errors import DomainError

__all__ = [
    "Factorization",
    "factorize",
    "is_squarefree",
    "kronecker",
    "omega",
    "is_prime",
    "is_perfect_square",
]


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of a positive integer.

    ``factors`` is a tuple of (prime, exponent) pairs with ascending primes
    and exponents >= 1.  ``factorize(1)`` has an empty factor tuple.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def reconstruct(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


# Deterministic Miller-Rabin witnesses, valid for all n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin with fixed witness set)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> Factorization:
    """Factor a positive integer by trial division.

    Trial division runs to the cube root; the remaining cofactor is either
    prime (checked deterministically) or a product of two primes, which is
    split by continued trial division.  Exact at any size we ever feed it.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise DomainError(f"factorize expects an integer, got {n!r}")
    if n <= 0:
        raise DomainError(f"factorize requires n >= 1, got {n}")
    original = n
    factors: list[tuple[int, int]] = []
    d = 2
    while d * d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        if is_prime(n):
            factors.append((n, 1))
        else:
            # cofactor is a semiprime p*q with cbrt < p <= sqrt(n)
            while d * d <= n:
                if n % d == 0:
                    e = 0
                    while n % d == 0:
                        n //= d
                        e += 1
                    factors.append((d, e))
                d += 1 if d == 2 else 2
            if n > 1:
                factors.append((n, 1))
    factors.sort()
    result = Factorization(original, tuple(factors))
    assert result.reconstruct() == original
    return result


def is_squarefree(n: int) -> bool:
    """True iff no prime divides n more than once."""
    return all(e == 1 for _, e in factorize(n).factors)


def omega(n: int) -> int:
    """Number of distinct prime divisors of n; omega(1) = 0."""
    return len(factorize(n).factors)


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 0.

    Completely multiplicative in n (for n >= 1) and zero exactly when
    gcd(D, n) > 1.  At n = 0 the standard convention applies: 1 iff
    D = +-1, else 0.
    """
    if n < 0:
        raise DomainError(f"kronecker requires n >= 0, got {n}")
    if n == 0:
        return 1 if D in (1, -1) else 0
    if D % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    # pull out the even part of n; (D/2) = +-1 by the mod 8 rule
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t % 2 == 1 and D % 8 in (3, 5):
        result = -result
    # now n is odd and positive: Jacobi symbol via reciprocity
    a = D % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0
