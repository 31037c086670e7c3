"""Exact invariants of the principal congruence surfaces X(N).

The level-N principal congruence subgroup consists of the integer matrices
congruent to the identity mod N.  Everything here follows elementary exact
formulas:

    index   [G(1):G(N)] = N^3 * prod_{p|N} (1 - p^-2)
    genus   g = 1 + index * (1/24 - 1/(4N))          (N > 2)
    cusps   index / (2N)                             (N > 2)

and the systoles of X(N) are the closed geodesics of trace +-(N^2 - 2),
of length 2*arccosh((N^2-2)/2), counted by index * h(N^2 - 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .integer_arith import factorize, is_squarefree, omega
from .quad_forms import IDENTITY, Mat2, class_number

__all__ = [
    "SurfaceInvariants",
    "IndexExponentReport",
    "index",
    "genus",
    "cusps",
    "systole_trace",
    "systole_length",
    "systole_count",
    "schmutz_schaller_lift",
    "index_exponent_check",
    "surface_invariants",
    "sl2_bruteforce_order",
]


def index(N: int) -> int:
    """[G(1):G(N)] = N^3 * prod(1 - p^-2), computed with exact cancellation."""
    if N < 1:
        raise DomainError(f"index requires N >= 1, got {N}")
    out = N**3
    for p, _ in factorize(N).factors:
        assert out % (p * p) == 0
        out = out // (p * p) * (p * p - 1)
    return out


def genus(N: int) -> int:
    """Genus of X(N) for N > 2; the rational formula always clears to an integer."""
    if N <= 2:
        raise DomainError(f"genus requires N > 2, got {N}")
    g = 1 + index(N) * (Fraction(1, 24) - Fraction(1, 4 * N))
    if g.denominator != 1:
        raise AssertionError(f"genus formula did not clear denominators at N={N}: {g}")
    if g < 0:
        raise AssertionError(f"negative genus at N={N}: {g}")
    return int(g)


def cusps(N: int) -> int:
    """Cusp count index/(2N), exact; the 2 accounts for -I acting trivially."""
    if N <= 2:
        raise DomainError(f"cusps requires N > 2, got {N}")
    idx = index(N)
    if idx % (2 * N) != 0:
        raise AssertionError(f"cusp divisibility failed at N={N}")
    return idx // (2 * N)


def systole_trace(N: int) -> int:
    return N * N - 2


def systole_length(N: int) -> float:
    """Length of a systole: 2*arccosh((N^2 - 2)/2)."""
    if N <= 2:
        raise DomainError(f"systole_length requires N > 2, got {N}")
    return 2.0 * math.acosh((N * N - 2) / 2.0)


def systole_count(N: int) -> int:
    """index(N) * h(N^2 - 4).

    This is the systole count of X(N) up to a fixed multiplicative constant
    inherent in the trace correspondence; the raw product is reported and
    the constant is never folded in.
    """
    if N <= 2:
        raise DomainError(f"systole_count requires N > 2, got {N}")
    return index(N) * class_number(N * N - 4)


def schmutz_schaller_lift(B: Mat2, N: int) -> Mat2:
    """Lift a trace-N element to the level-N systole class: A = I - N*B.

    Verifies the package of identities that make the correspondence work:
    A = I (mod N), det(A) = 1, trace(A) = 2 - N^2, and A = -B^2 (which is
    Cayley-Hamilton for trace-N, det-1 matrices).
    """
    if N < 3:
        raise DomainError(f"schmutz_schaller_lift requires N >= 3, got {N}")
    B = Mat2(*B)
    if B.det != 1:
        raise DomainError(f"schmutz_schaller_lift: det(B) = {B.det}, expected 1")
    if B.trace != N:
        raise DomainError(f"schmutz_schaller_lift: trace(B) = {B.trace}, expected {N}")
    A = Mat2(1 - N * B.a, -N * B.b, -N * B.c, 1 - N * B.d)
    assert all((x - y) % N == 0 for x, y in zip(A, IDENTITY))
    assert A.det == 1
    assert A.trace == 2 - N * N
    B2 = B @ B
    assert A == Mat2(-B2.a, -B2.b, -B2.c, -B2.d)
    return A


@dataclass(frozen=True)
class IndexExponentReport:
    """Bracketing of log(index) between 3*log(N) - log(4/3)*omega(N) and 3*log(N)."""

    N: int
    log_index: float
    lower: float
    upper: float
    slack: float

    @property
    def ok(self) -> bool:
        return self.lower - self.slack <= self.log_index <= self.upper + self.slack


def index_exponent_check(N: int, slack: float = 1e-9) -> IndexExponentReport:
    """Check the exponent band for the index.

    Each local factor satisfies |log(1 - p^-2)| <= log(4/3) (worst at p=2),
    so log(index) >= 3 log N - log(4/3) * omega(N); the upper bound 3 log N
    is trivial.
    """
    if N < 2:
        raise DomainError(f"index_exponent_check requires N >= 2, got {N}")
    log_index = math.log(index(N))
    upper = 3 * math.log(N)
    lower = upper - math.log(4.0 / 3.0) * omega(N)
    return IndexExponentReport(N, log_index, lower, upper, slack)


@dataclass(frozen=True)
class SurfaceInvariants:
    """Per-level record of the exact invariants of X(N)."""

    N: int
    index: int
    genus: int
    cusps: int
    systole_trace: int
    systole_length: float
    class_number: int
    systole_count: int
    squarefree: bool


def sl2_bruteforce_order(N: int) -> int:
    """|SL2(Z/N)| by enumerating all N^4 matrices; verification oracle only."""
    if N < 1:
        raise DomainError(f"sl2_bruteforce_order requires N >= 1, got {N}")
    if N == 1:
        return 1
    import numpy as np

    r = np.arange(N)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij", sparse=True)
    return int(np.count_nonzero((a * d - b * c) % N == 1))


def surface_invariants(N: int) -> SurfaceInvariants:
    if N <= 2:
        raise DomainError(f"surface_invariants requires N > 2, got {N}")
    D = N * N - 4
    h = class_number(D)
    idx = index(N)
    return SurfaceInvariants(
        N=N,
        index=idx,
        genus=genus(N),
        cusps=cusps(N),
        systole_trace=systole_trace(N),
        systole_length=systole_length(N),
        class_number=h,
        systole_count=idx * h,
        squarefree=is_squarefree(D),
    )
