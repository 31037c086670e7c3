"""Indefinite binary quadratic forms: reduction cycles and class numbers.

A form (a, b, c) stands for a*x^2 + b*x*y + c*y^2 with discriminant
D = b^2 - 4ac > 0 and not a perfect square.  A form is reduced when

    0 < b < sqrt(D)   and   sqrt(D) - b < 2|a| < sqrt(D) + b,

and the neighbor operator rho sends a reduced form (a, b, c) to
(c, b', c') where b' = -b (mod 2|c|) is chosen inside the reduced window
(sqrt(D) - 2|c|, sqrt(D)).  Iterating rho partitions the finitely many
reduced forms of discriminant D into cycles, one per (narrow) class, so
the class number h(D) is simply the number of cycles.

All comparisons against sqrt(D) are decided by sign-safe squaring; no
floating point enters any class-number computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd, isqrt
from typing import NamedTuple

from .errors import DomainError
from .integer_arith import is_perfect_square

__all__ = [
    "QuadForm",
    "FormClassCycle",
    "FundamentalUnit",
    "Mat2",
    "discriminant",
    "is_reduced",
    "reduction_step",
    "reduce_form",
    "enumerate_reduced_forms",
    "class_cycles",
    "class_number",
    "fundamental_unit",
    "automorph",
    "form_action",
    "check_discriminant",
]


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    def __neg__(self) -> "QuadForm":
        return QuadForm(-self.a, -self.b, -self.c)

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        return gcd(gcd(abs(self.a), abs(self.b)), abs(self.c))


class Mat2(NamedTuple):
    """2x2 integer matrix ((a, b), (c, d))."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse_unimodular(self) -> "Mat2":
        # adjugate; valid inverse only when det = 1
        if self.det != 1:
            raise DomainError("inverse_unimodular requires det = 1")
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)


IDENTITY = Mat2(1, 0, 0, 1)


def discriminant(f: QuadForm) -> int:
    a, b, c = f
    return b * b - 4 * a * c


def check_discriminant(D: int) -> None:
    """Reject integers that cannot be an indefinite form discriminant."""
    if D <= 0:
        raise DomainError(f"discriminant must be positive, got {D}")
    if D % 4 not in (0, 1):
        raise DomainError(f"discriminant must be 0 or 1 mod 4, got {D}")
    if is_perfect_square(D):
        raise DomainError(f"discriminant must not be a perfect square, got {D}")


def form_action(f: QuadForm, M: Mat2) -> QuadForm:
    """Right action (f o M)(x, y) = f(ax + by, cx + dy); preserves D."""
    a, b, c = f
    p, q, r, s = M
    return QuadForm(
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )


def is_reduced(f: QuadForm) -> bool:
    """Reduction test in exact integer arithmetic (squares, never sqrt)."""
    a, b, c = f
    D = b * b - 4 * a * c
    check_discriminant(D)
    if b <= 0 or b * b >= D:
        return False
    t = 2 * abs(a)
    # sqrt(D) - b < t  <=>  D < (t + b)^2
    if D >= (t + b) ** 2:
        return False
    # t < sqrt(D) + b  <=>  t - b < 0 or (t - b)^2 < D
    if t - b >= 0 and (t - b) ** 2 >= D:
        return False
    return True


def _neighbor_b(b: int, c: int, D: int) -> int:
    """Largest b' < sqrt(D) with b' = -b (mod 2|c|); assumes |c| < sqrt(D)."""
    m = 2 * abs(c)
    r = (-b) % m
    s = isqrt(D)
    k = (s - r) // m
    bp = r + m * k
    if bp * bp >= D:
        bp -= m
    assert bp >= 0 and bp * bp < D and (bp + m) ** 2 > D
    return bp


def reduction_step(f: QuadForm) -> QuadForm:
    """The neighbor rho(f) of a reduced form; same discriminant, reduced."""
    if not is_reduced(f):
        raise DomainError(f"reduction_step requires a reduced form, got {tuple(f)}")
    a, b, c = f
    D = b * b - 4 * a * c
    bp = _neighbor_b(b, c, D)
    cp = (bp * bp - D) // (4 * c)
    assert (bp * bp - D) % (4 * c) == 0
    out = QuadForm(c, bp, cp)
    assert is_reduced(out)
    return out


def reduce_form(f: QuadForm) -> QuadForm:
    """Gauss-reduce an arbitrary indefinite form to an equivalent reduced one.

    Repeatedly replaces (a, b, c) by (c, b', c'), with b' chosen in the
    reduced window once |c| drops below sqrt(D).  This is the standard
    reduction walk; it terminates because |c| strictly decreases while
    |c| > sqrt(D).
    """
    a, b, c = f
    D = b * b - 4 * a * c
    check_discriminant(D)
    if QuadForm(a, b, c).content() != 1:
        raise DomainError(f"form must be primitive, got {tuple(f)}")
    while not is_reduced(QuadForm(a, b, c)):
        if c == 0:
            raise DomainError("degenerate form (c = 0) has square discriminant")
        ac = abs(c)
        m = 2 * ac
        r = (-b) % m
        if ac * ac > D:
            # |c| > sqrt(D): normalize b' into (-|c|, |c|]
            bp = r if r <= ac else r - m
        else:
            bp = _neighbor_b(b, c, D)
        cp = (bp * bp - D) // (4 * c)
        a, b, c = c, bp, cp
    return QuadForm(a, b, c)


def enumerate_reduced_forms(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D, sorted.

    Finite: a reduced form has 0 < b < sqrt(D) and 4|ac| = D - b^2, so both
    outer coefficients divide a bounded quantity.
    """
    check_discriminant(D)
    out = []
    s = isqrt(D)
    for b in range(1, s + 1):
        if b * b >= D:
            break
        if (D - b * b) % 4 != 0:
            continue
        m = (b * b - D) // 4  # = a*c, negative
        for a in range(1, isqrt(-m) + 1):
            if m % a:
                continue
            for mag in {a, (-m) // a}:
                for aa in (mag, -mag):
                    c = m // aa
                    f = QuadForm(aa, b, c)
                    if f.content() == 1 and is_reduced(f):
                        out.append(f)
    return sorted(set(out))


@dataclass(frozen=True)
class FormClassCycle:
    """One narrow class: the rho-cycle of its reduced forms.

    ``forms[i+1] == reduction_step(forms[i])`` cyclically, starting from the
    canonical representative (the lexicographically least (a, b, c)).
    """

    discriminant: int
    forms: tuple[QuadForm, ...]

    @property
    def canonical(self) -> QuadForm:
        return self.forms[0]

    def __len__(self) -> int:
        return len(self.forms)

    def __contains__(self, f) -> bool:
        return QuadForm(*f) in self.forms


def class_cycles(D: int) -> list[FormClassCycle]:
    """Partition the reduced primitive forms of D into rho-cycles.

    Deterministic: each cycle starts at its lexicographically least form and
    cycles are sorted by that representative.
    """
    remaining = set(enumerate_reduced_forms(D))
    cycles = []
    while remaining:
        start = min(remaining)
        cyc = [start]
        remaining.discard(start)
        g = reduction_step(start)
        while g != start:
            cyc.append(g)
            remaining.discard(g)
            g = reduction_step(g)
        lo = cyc.index(min(cyc))
        cycles.append(FormClassCycle(D, tuple(cyc[lo:] + cyc[:lo])))
    return sorted(cycles, key=lambda c: c.canonical)


def class_number(D: int) -> int:
    """Narrow class number h(D) = number of reduction cycles."""
    return len(class_cycles(D))


@dataclass(frozen=True)
class FundamentalUnit:
    """The totally positive fundamental unit eps = (t + u*sqrt(D))/2.

    For D = N^2 - 4 the minimal solution of t^2 - D u^2 = 4 is (N, 1), so
    eps = (N + sqrt(D))/2.  This is the unit whose powers generate the
    automorphs of every form of discriminant D.
    """

    t: int
    u: int
    D: int

    @property
    def value(self) -> float:
        return (self.t + self.u * math.sqrt(self.D)) / 2

    @property
    def log_value(self) -> float:
        # t + u*sqrt(D) has no cancellation (both positive), so the relative
        # error is a few ulp, far below the promised 1e-12.
        return math.log((self.t + self.u * math.sqrt(self.D)) / 2)


def fundamental_unit(N: int) -> FundamentalUnit:
    """Unit (N + sqrt(N^2-4))/2 for the order of discriminant N^2 - 4."""
    if N <= 2:
        raise DomainError(f"fundamental_unit requires N >= 3, got {N}")
    D = N * N - 4
    check_discriminant(D)
    unit = FundamentalUnit(N, 1, D)
    assert unit.t**2 - D * unit.u**2 == 4
    return unit


def automorph(f: QuadForm, N: int) -> Mat2:
    """Generator of the stabilizer of f in SL2(Z), for discriminant N^2 - 4.

    Built from the Pell solution (t, u) = (N, 1):

        M = ((N - b)/2,  -c)
            (    a,  (N + b)/2)

    det(M) = 1, trace(M) = N, and f o M = f.
    """
    a, b, c = f
    D = b * b - 4 * a * c
    if D != N * N - 4:
        raise DomainError(
            f"automorph: discriminant {D} does not match N^2 - 4 = {N * N - 4}"
        )
    if (N - b) % 2 != 0:
        # b^2 = D = N^2 (mod 4) forces b = N (mod 2); a violation means the
        # form itself is corrupt, not a bad argument.
        raise AssertionError(f"parity violation: b={b}, N={N}")
    M = Mat2((N - b) // 2, -c, a, (N + b) // 2)
    assert M.det == 1 and M.trace == N
    assert form_action(f, M) == f
    return M
