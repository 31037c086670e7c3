"""Independent oracles used by the test suite.

Everything here is implemented from scratch against definitions, not by
calling the package, so that agreement is meaningful evidence.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt

import gmpy2
import mpmath as mp
import numpy as np


def trial_division(n: int) -> dict[int, int]:
    """Naive full trial division up to sqrt(n)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def kronecker_ref(D: int, n: int) -> int:
    """Reference Kronecker symbol via gmpy2."""
    return int(gmpy2.kronecker(D, n))


def squarefree_sieve(limit: int) -> np.ndarray:
    """Boolean table: squarefree[n] for 0 <= n <= limit (index 0 unused)."""
    flags = np.ones(limit + 1, dtype=bool)
    k = 2
    while k * k <= limit:
        flags[k * k :: k * k] = False
        k += 1
    return flags


def sl2_order(N: int) -> int:
    """|SL2(Z/N)| by enumerating all N^4 matrices."""
    if N == 1:
        return 1
    r = np.arange(N, dtype=np.int64)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij", sparse=True)
    return int(np.count_nonzero((a * d - b * c) % N == 1))


# ---------------------------------------------------------------------------
# bounded-orbit class number oracle


def _reduce_back(f: tuple, D: int) -> tuple:
    """Classical reduction walk, used only to pull escaped forms back in."""
    a, b, c = f
    s = isqrt(D)
    for _ in range(10_000):
        # reduced test: 0 < b < sqrt(D), |sqrt(D) - 2|a|| < b
        t = 2 * abs(a)
        if (
            0 < b
            and b * b < D
            and D < (t + b) ** 2
            and (t - b < 0 or (t - b) ** 2 < D)
        ):
            return (a, b, c)
        ac = abs(c)
        m = 2 * ac
        r = (-b) % m
        if ac * ac > D:
            bp = r if r <= ac else r - m
        else:
            k = (s - r) // m
            bp = r + m * k
            if bp * bp >= D:
                bp -= m
        a, b, c = c, bp, (bp * bp - D) // (4 * c)
    raise RuntimeError("reduction did not terminate")


def class_number_orbit_oracle(D: int) -> int:
    """Orbits of bounded primitive forms under the two substitution moves.

    Enumerates all primitive forms of discriminant D with coefficients at
    most 4*sqrt(D), closes each orbit under (x,y)->(x+y,y) and (x,y)->(-y,x)
    by BFS, reducing any escapee back inside the bound before comparison,
    and counts the orbits.
    """
    bound = 4 * isqrt(D) + 4
    forms = set()
    for a in range(-bound, bound + 1):
        if a == 0:
            continue
        for b in range(-bound, bound + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if abs(c) <= bound and gcd(gcd(abs(a), abs(b)), abs(c)) == 1:
                forms.add((a, b, c))
    remaining = set(forms)
    orbits = 0
    while remaining:
        seed = remaining.pop()
        orbits += 1
        stack = [seed]
        seen = {seed}
        while stack:
            a, b, c = stack.pop()
            for nxt in (
                # (x,y) -> (x+y, y): f(x+y, y) = (a, b+2a, a+b+c)
                (a, b + 2 * a, a + b + c),
                (a, b - 2 * a, a - b + c),
                # (x,y) -> (-y, x): f(-y, x) = (c, -b, a)
                (c, -b, a),
            ):
                if max(abs(nxt[0]), abs(nxt[1]), abs(nxt[2])) > bound:
                    nxt = _reduce_back(nxt, D)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
                    remaining.discard(nxt)
    return orbits


# ---------------------------------------------------------------------------
# L-values


def l_value_sin_product(D: int, dps: int = 40) -> mp.mpf:
    """L(chi_D, 1) for fundamental D > 0 via the Gauss-sum closed form:

        L(1, chi) = -(1/sqrt(D)) * sum_a chi(a) * log(2 sin(pi a / D)).
    """
    with mp.workdps(dps):
        total = mp.mpf(0)
        for a in range(1, D):
            chi = kronecker_ref(D, a)
            if chi:
                total += chi * mp.log(2 * mp.sin(mp.pi * a / D))
        return -total / mp.sqrt(D)


# ---------------------------------------------------------------------------
# subfamily averaging


def exhaustive_subfamily_mean(entries, k: int) -> Fraction:
    """Exact mean crossing number over all size-k subsets."""
    n = len(entries)
    total = Fraction(0)
    count = 0
    for subset in combinations(range(n), k):
        cr = sum(
            entries[i][j] for x, i in enumerate(subset) for j in subset[x + 1 :]
        )
        total += cr
        count += 1
    return total / count


# ---------------------------------------------------------------------------
# interlacing by explicit root location (50-digit floats)


def interlace_float(f, g, dps: int = 50) -> bool:
    """Exactly one root of g strictly inside the root interval of f."""
    with mp.workdps(dps):
        a, b, c = f
        A, B, C = g
        Df = b * b - 4 * a * c
        Dg = B * B - 4 * A * C
        rf = sorted(
            [(-b - mp.sqrt(Df)) / (2 * a), (-b + mp.sqrt(Df)) / (2 * a)]
        )
        rg = [(-B - mp.sqrt(Dg)) / (2 * A), (-B + mp.sqrt(Dg)) / (2 * A)]
        inside = sum(1 for r in rg if rf[0] < r < rf[1])
        return inside == 1


def random_sl2_word(rng, length: int = 6):
    """Random element of SL2(Z) as a word in the standard generators."""
    S = (0, -1, 1, 0)
    T = (1, 1, 0, 1)
    Tinv = (1, -1, 0, 1)
    m = (1, 0, 0, 1)
    for _ in range(length):
        g = rng.choice((S, T, Tinv))
        m = (
            m[0] * g[0] + m[1] * g[2],
            m[0] * g[1] + m[1] * g[3],
            m[2] * g[0] + m[3] * g[2],
            m[2] * g[1] + m[3] * g[3],
        )
    return m
