"""Intersection numbers of the modular geodesics of discriminant D = N^2 - 4.

Every primitive form f of discriminant D has an oriented geodesic axis in
the upper half plane, the semicircle over its two real roots traversed
toward the attracting fixed point of its automorph, and the axis descends
to an oriented closed geodesic on the modular surface.  The intersection
count of two classes is the number of crossing configurations of
representative pairs up to simultaneous conjugation: fix a base form f,
then count the forms of the second class whose axis crosses the axis of f,
modulo the automorph of f (which translates the base axis by one period).
The module computes this count two independent ways:

* combinatorially: enumerate equivalent forms inside a coefficient ball,
  keep the interlacing ones, and canonicalize each under the automorph
  action.  Completeness is certified by doubling the ball until the orbit
  count stabilizes.

* by unfolding: compute each crossing point on the base axis to 50 digits,
  pair its axis parameter modulo the period 2*log(eps) with the oriented
  direction of traversal, and count the distinct pairs.

The count is symmetric in the two classes.  A class that coincides with
its negative (its axis runs through an order-2 orbifold point, e.g. at
D = 5 or D = 221) carries both orientations of each translate axis, so
every unoriented crossing with such a class is counted once per
co-orientation.  Diagonal entries (a class against itself) exclude the
base axis and halve the count, since each self-crossing configuration is
reached from its two branches.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath as mp

from .errors import DomainError, IncompleteEnumerationError
from .integer_arith import is_squarefree
from .quad_forms import (
    FormClassCycle,
    Mat2,
    QuadForm,
    automorph,
    check_discriminant,
    class_cycles,
    discriminant,
    form_action,
    reduce_form,
)

__all__ = [
    "QuadSurd",
    "GeodesicAxis",
    "IntersectionMatrix",
    "EntryCertificate",
    "axis",
    "interlace",
    "same_axis",
    "class_orbit",
    "intersection_entry",
    "intersection_number",
    "unfolding_intersection_number",
    "intersection_matrix",
    "total_intersections",
    "INTERSECTION_ALGORITHM_VERSION",
]

# Bump whenever the counting algorithm changes; cached matrices keyed on it.
INTERSECTION_ALGORITHM_VERSION = "1"

# Walk/enumeration safety margins (see _canonical_orbit_key).
_WALK_GROWTH_MARGIN = 16
_WALK_STEP_CAP = 500


class QuadSurd(NamedTuple):
    """Exact element p + q*sqrt(D) of the real quadratic field, p and q rational."""

    p: Fraction
    q: Fraction
    D: int

    @classmethod
    def make(cls, p, q, D: int) -> "QuadSurd":
        return cls(Fraction(p), Fraction(q), D)

    def sign(self) -> int:
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq if sp == 0 else sp
        # opposite signs: compare p^2 against q^2 * D; equality would force
        # D to be a rational square, which check_discriminant excludes
        t = self.p * self.p - self.q * self.q * self.D
        assert t != 0
        return sp if t > 0 else sq

    def __add__(self, other):
        other = self._coerce(other)
        return QuadSurd(self.p + other.p, self.q + other.q, self.D)

    def __sub__(self, other):
        other = self._coerce(other)
        return QuadSurd(self.p - other.p, self.q - other.q, self.D)

    def __mul__(self, other):
        other = self._coerce(other)
        return QuadSurd(
            self.p * other.p + self.q * other.q * self.D,
            self.p * other.q + self.q * other.p,
            self.D,
        )

    def inverse(self) -> "QuadSurd":
        norm = self.p * self.p - self.q * self.q * self.D
        if norm == 0:
            raise ZeroDivisionError("inverse of zero surd")
        return QuadSurd(self.p / norm, -self.q / norm, self.D)

    def _coerce(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            if other.D != self.D:
                raise DomainError("mixed discriminants in surd arithmetic")
            return other
        return QuadSurd(Fraction(other), Fraction(0), self.D)

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def to_mpf(self) -> mp.mpf:
        return (
            mp.mpf(self.p.numerator) / self.p.denominator
            + mp.mpf(self.q.numerator) / self.q.denominator * mp.sqrt(self.D)
        )

    def mobius(self, M: Mat2) -> "QuadSurd":
        """(a*z + b) / (c*z + d), exact."""
        num = self * M.a + M.b
        den = self * M.c + M.d
        return num * den.inverse()


@dataclass(frozen=True)
class GeodesicAxis:
    """Axis of a form: the geodesic over its ordered pair of real roots."""

    form: QuadForm
    roots: tuple[QuadSurd, QuadSurd]

    @property
    def discriminant(self) -> int:
        return self.roots[0].D


def axis(f: QuadForm) -> GeodesicAxis:
    """Exact axis endpoints ((-b - sqrt(D))/(2a), (-b + sqrt(D))/(2a))."""
    f = QuadForm(*f)
    D = discriminant(f)
    check_discriminant(D)
    a, b, _ = f
    r_minus = QuadSurd(Fraction(-b, 2 * a), Fraction(-1, 2 * a), D)
    r_plus = QuadSurd(Fraction(-b, 2 * a), Fraction(1, 2 * a), D)
    for r in (r_minus, r_plus):
        value = (r * r) * f.a + r * f.b + f.c
        assert value.p == 0 and value.q == 0
    return GeodesicAxis(f, (r_minus, r_plus))


def same_axis(f: QuadForm, g: QuadForm) -> bool:
    """Proportional forms carry the same axis; primitive case means g = +-f."""
    a, b, c = f
    A, B, C = g
    return a * B == A * b and a * C == A * c and b * C == B * c


def interlace(f: QuadForm, g: QuadForm) -> bool:
    """True iff the axes of f and g cross transversally.

    Exactly one root of g lies strictly between the roots of f; decided by
    the sign of g at the roots of f, reduced to pure integer arithmetic:
    with P = aB - Ab and Q = aC - Ac,

        g(r-) * g(r+) = (P^2 c - P Q b + Q^2 a) / a^3,

    so the axes cross iff (P^2 c - P Q b + Q^2 a) * a < 0.  Same-axis pairs
    make the expression vanish and are reported as not crossing.
    """
    f = QuadForm(*f)
    g = QuadForm(*g)
    Df = discriminant(f)
    Dg = discriminant(g)
    if Df != Dg:
        raise DomainError(f"interlace requires equal discriminants, got {Df} != {Dg}")
    check_discriminant(Df)
    return _crosses(f, g)


def _crosses(f, g) -> bool:
    a, b, c = f
    A, B, C = g
    P = a * B - A * b
    Q = a * C - A * c
    return (P * P * c - P * Q * b + Q * Q * a) * a < 0


# ---------------------------------------------------------------------------
# orbit enumeration


def _orbit_ball(g: tuple, bound: int, working_bound: int) -> frozenset:
    """Forms equivalent to g with max coefficient <= bound.

    BFS over the substitutions S: (a,b,c) -> (c,-b,a) and T^{+-1}, pruned at
    working_bound; the margin lets reduction paths pass over the output
    bound without disconnecting the ball.
    """
    seen = {g}
    out = set()
    if max(abs(g[0]), abs(g[1]), abs(g[2])) <= bound:
        out.add(g)
    frontier = [g]
    while frontier:
        next_frontier = []
        for a, b, c in frontier:
            for f2 in (
                (c, -b, a),
                (a, b + 2 * a, a + b + c),
                (a, b - 2 * a, a - b + c),
            ):
                if f2 in seen:
                    continue
                m = max(abs(f2[0]), abs(f2[1]), abs(f2[2]))
                if m > working_bound:
                    continue
                seen.add(f2)
                next_frontier.append(f2)
                if m <= bound:
                    out.add(f2)
        frontier = next_frontier
    return frozenset(out)


_ball_cache: dict[tuple, frozenset] = {}


def _cached_ball(g: tuple, bound: int) -> frozenset:
    key = (g, bound)
    if key not in _ball_cache:
        if len(_ball_cache) > 48:
            _ball_cache.clear()
        _ball_cache[key] = _orbit_ball(g, bound, 2 * bound)
    return _ball_cache[key]


def class_orbit(g: QuadForm, bound: int) -> list[QuadForm]:
    """All forms equivalent to g with max(|a|,|b|,|c|) <= bound, sorted.

    Warns when the bound cannot even hold the reduced cycle of g's class,
    since the result is then unlikely to be useful.
    """
    g = QuadForm(*g)
    if bound < 1:
        raise DomainError(f"class_orbit requires bound >= 1, got {bound}")
    D = discriminant(g)
    check_discriminant(D)
    if g.content() != 1:
        raise DomainError(f"class_orbit requires a primitive form, got {tuple(g)}")
    rep = reduce_form(g)
    cycle_max = max(max(abs(x) for x in h) for h in _full_cycle(rep))
    if cycle_max > bound:
        warnings.warn(
            f"class_orbit bound {bound} below the reduced cycle size {cycle_max}",
            stacklevel=2,
        )
    ball = _orbit_ball(tuple(g), bound, 2 * bound)
    return sorted(QuadForm(*t) for t in ball)


def _full_cycle(rep: QuadForm) -> list[QuadForm]:
    from .quad_forms import reduction_step

    cyc = [rep]
    h = reduction_step(rep)
    while h != rep:
        cyc.append(h)
        h = reduction_step(h)
    return cyc


# ---------------------------------------------------------------------------
# automorph quotient


def _act_tuple(f: tuple, M: Mat2) -> tuple:
    a, b, c = f
    p, q, r, s = M
    return (
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )


def _canonical_orbit_key(g: tuple, M: Mat2, Minv: Mat2, D: int) -> tuple:
    """Canonical label of the orbit of g under the automorph action.

    Walks the orbit in both directions, minimizing (|a|, |b|, |c|, a, b, c).
    Coefficients grow like powers of the unit once the walk leaves the
    minimum window, so a direction stops after its max coefficient exceeds
    _WALK_GROWTH_MARGIN * (best max seen + D); the additive D covers dips
    where a single coefficient passes near zero.
    """

    def key(t):
        return (abs(t[0]), abs(t[1]), abs(t[2]), t[0], t[1], t[2])

    best = key(g)
    for direction in (M, Minv):
        cur = g
        best_max = max(abs(g[0]), abs(g[1]), abs(g[2]))
        steps = 0
        while True:
            cur = _act_tuple(cur, direction)
            steps += 1
            if steps > _WALK_STEP_CAP:
                raise AssertionError("orbit canonicalization walk did not terminate")
            m = max(abs(cur[0]), abs(cur[1]), abs(cur[2]))
            k = key(cur)
            if k < best:
                best = k
            if m < best_max:
                best_max = m
            if m > _WALK_GROWTH_MARGIN * (best_max + D):
                break
    return best


@dataclass(frozen=True)
class EntryCertificate:
    """An intersection count together with its stabilization certificate."""

    count: int
    final_bound: int
    doublings: int


def _resolve_representative(A: FormClassCycle, representative) -> QuadForm:
    if representative is None:
        return A.canonical
    f = QuadForm(*representative)
    if discriminant(f) != A.discriminant:
        raise DomainError("representative has the wrong discriminant")
    if reduce_form(f) not in A.forms:
        raise DomainError(f"{tuple(f)} does not represent the given class")
    return f


def intersection_entry(
    A: FormClassCycle,
    B: FormClassCycle,
    N: int,
    *,
    representative: QuadForm | None = None,
    initial_bound: int | None = None,
    max_doublings: int = 8,
) -> EntryCertificate:
    """Crossing count of the closed geodesics of classes A and B, certified.

    Doubles the enumeration ball until two consecutive passes agree; raises
    IncompleteEnumerationError when max_doublings passes cannot certify.
    """
    D = N * N - 4
    check_discriminant(D)
    if A.discriminant != D or B.discriminant != D:
        raise DomainError(
            f"cycles have discriminants {A.discriminant}, {B.discriminant}; "
            f"expected {D}"
        )
    f = _resolve_representative(A, representative)
    M = automorph(f, N)
    Minv = M.inverse_unimodular()
    g0 = tuple(B.canonical)
    diagonal = A.canonical == B.canonical
    ft = tuple(f)

    bound = initial_bound if initial_bound is not None else 8 * D
    previous = None
    for pass_index in range(max_doublings + 1):
        ball = _cached_ball(g0, bound)
        reps = {
            _canonical_orbit_key(g, M, Minv, D)
            for g in ball
            if _crosses(ft, g)
        }
        count = len(reps)
        if previous is not None and count == previous:
            if diagonal:
                assert count % 2 == 0, f"odd diagonal crossing count {count}"
                count //= 2
            return EntryCertificate(count, bound, pass_index)
        previous = count
        bound *= 2
    raise IncompleteEnumerationError(
        f"intersection count for D={D} did not stabilize within "
        f"{max_doublings} doublings (last bound {bound // 2})",
        limit_name="max_doublings",
        limit_value=max_doublings,
    )


def intersection_number(
    A: FormClassCycle,
    B: FormClassCycle,
    N: int,
    *,
    representative: QuadForm | None = None,
    initial_bound: int | None = None,
    max_doublings: int = 8,
) -> int:
    return intersection_entry(
        A,
        B,
        N,
        representative=representative,
        initial_bound=initial_bound,
        max_doublings=max_doublings,
    ).count


# ---------------------------------------------------------------------------
# floating-point unfolding oracle


def unfolding_intersection_number(
    A: FormClassCycle,
    B: FormClassCycle,
    N: int,
    bound: int,
    *,
    representative: QuadForm | None = None,
    dps: int = 50,
) -> int:
    """Count crossings by bucketing (parameter, direction) pairs on the axis.

    Lifts every crossing inside the coefficient ball to the base axis and
    computes its axis parameter t = log(|z - r-|^2 / |z - r+|^2) / 2 to
    ``dps`` digits, reduced modulo the period 2*log(eps), together with the
    oriented direction in which the crossing geodesic traverses the point
    (toward the attracting fixed point of its automorph).  Distinct
    residue/direction buckets correspond one-to-one to the crossing forms
    modulo the automorph action: translates through a shared point differ
    in tangent line (two distinct geodesics cannot be tangent at an
    interior point, though shared points do occur at orbifold cone points,
    e.g. the level-4 geodesic runs through the order-3 point), and the two
    orientations of one axis differ by pi.

    This shares the enumeration with the combinatorial count but replaces
    the exact automorph quotient with metric bucketing, so agreement of the
    two is a strong consistency check.
    """
    D = N * N - 4
    check_discriminant(D)
    if A.discriminant != D or B.discriminant != D:
        raise DomainError("cycles do not match level N")
    f = _resolve_representative(A, representative)
    diagonal = A.canonical == B.canonical
    ball = _cached_ball(tuple(B.canonical), bound)
    crossing = [g for g in ball if _crosses(tuple(f), g)]

    for precision in (dps, 2 * dps):
        # clustering must run at the same precision as the parameters, or
        # the gap arithmetic collapses 1e-50 agreements into default-dps noise
        with mp.workdps(precision):
            pairs, period = _crossing_parameters(f, crossing, N, D)
            count = _count_buckets(pairs, period, mp.mpf("1e-20"))
        if count is not None:
            if diagonal:
                assert count % 2 == 0, f"odd diagonal bucket count {count}"
                count //= 2
            return count
    raise AssertionError("bucket separation stayed ambiguous at doubled precision")


def _crossing_parameters(f: QuadForm, crossing, N: int, D: int):
    """(tau, direction) per crossing form.

    tau is the axis parameter of the crossing point modulo the period, and
    direction is the oriented angle of the crossing geodesic's traversal at
    that point.  A form is traversed toward the attracting fixed point
    (-b + sqrt(D))/(2a) of its automorph, which is the right endpoint of
    its semicircle when a > 0 and the left one when a < 0.
    """
    a, b, _ = f
    sqrt_d = mp.sqrt(D)
    center_f = mp.mpf(-b) / (2 * a)
    radius_f = sqrt_d / (2 * abs(a))
    w_minus, w_plus = center_f - radius_f, center_f + radius_f
    eps = (N + sqrt_d) / 2
    period = 2 * mp.log(eps)
    pairs = []
    for (A_, B_, _C) in crossing:
        center_g = mp.mpf(-B_) / (2 * A_)
        radius_g = sqrt_d / (2 * abs(A_))
        assert center_g != center_f, "concentric axes cannot cross"
        x = (
            center_f**2 - center_g**2 - radius_f**2 + radius_g**2
        ) / (2 * (center_f - center_g))
        y2 = radius_f**2 - (x - center_f) ** 2
        assert y2 > 0, "crossing predicate and lift disagree"
        y = mp.sqrt(y2)
        t = mp.log(((x - w_minus) ** 2 + y2) / ((x - w_plus) ** 2 + y2)) / 2
        tau = mp.fmod(t, period)
        if tau < 0:
            tau += period
        # tangent (y, m - x) moves rightward along the circle; flip it when
        # the attracting endpoint sits on the left (a < 0)
        sign_g = 1 if A_ > 0 else -1
        sign_f = 1 if a > 0 else -1
        direction = mp.fmod(
            mp.atan2(sign_g * (center_g - x), sign_g * y)
            - mp.atan2(sign_f * (center_f - x), sign_f * y),
            2 * mp.pi,
        )
        if direction < 0:
            direction += 2 * mp.pi
        pairs.append((tau, direction))
    return sorted(pairs), period


def _count_buckets(pairs, period, tol):
    """Distinct (tau, direction) buckets; None when any gap is ambiguous."""
    groups = _cluster(pairs, period, tol)
    if groups is None:
        return None
    count = 0
    for group in groups:
        angles = sorted(angle for _, angle in group)
        # directions live on a circle; merge the 0 / 2*pi seam
        clusters = _cluster(angles, 2 * mp.pi, tol)
        if clusters is None:
            return None
        count += len(clusters)
    return count


def _cluster(values, period, tol):
    """Group sorted values with gap < tol; None when a gap is ambiguous.

    ``values`` may be scalars or (key, payload) tuples sorted by key; the
    optional period merges the wraparound pair of clusters.
    """
    ambiguous_lo, ambiguous_hi = mp.mpf("1e-30"), mp.mpf("1e-10")

    def key(v):
        return v[0] if isinstance(v, tuple) else v

    buckets = []
    for v in values:
        if buckets and key(v) - key(buckets[-1][-1]) < tol:
            buckets[-1].append(v)
        elif buckets and ambiguous_lo < key(v) - key(buckets[-1][-1]) < ambiguous_hi:
            return None
        else:
            buckets.append([v])
    if period is not None and len(buckets) > 1:
        wrap = key(values[0]) + period - key(values[-1])
        if wrap < tol:
            buckets[0] = buckets.pop() + buckets[0]
        elif ambiguous_lo < wrap < ambiguous_hi:
            return None
    return buckets


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntersectionMatrix:
    """Symmetric h x h crossing-count matrix for discriminant D = N^2 - 4.

    The diagonal holds self-intersection counts; enumeration_bound and
    doubling_passes record the stabilization certificate (largest final
    ball and most doubling passes over all entries).
    """

    N: int
    D: int
    squarefree: bool
    classes: tuple[QuadForm, ...]
    entries: tuple[tuple[int, ...], ...]
    enumeration_bound: int
    doubling_passes: int

    @property
    def h(self) -> int:
        return len(self.classes)

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(self.h))

    @property
    def total(self) -> int:
        """Distinct unordered pairs plus self-intersections."""
        off = sum(
            self.entries[i][j] for i in range(self.h) for j in range(i + 1, self.h)
        )
        return off + sum(self.diagonal)

    def to_jsonable(self) -> dict:
        return {
            "N": self.N,
            "D": self.D,
            "squarefree": self.squarefree,
            "classes": [list(c) for c in self.classes],
            "entries": [list(row) for row in self.entries],
            "enumeration_bound": self.enumeration_bound,
            "doubling_passes": self.doubling_passes,
            "algorithm_version": INTERSECTION_ALGORITHM_VERSION,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "IntersectionMatrix":
        return cls(
            N=data["N"],
            D=data["D"],
            squarefree=data["squarefree"],
            classes=tuple(QuadForm(*c) for c in data["classes"]),
            entries=tuple(tuple(row) for row in data["entries"]),
            enumeration_bound=data["enumeration_bound"],
            doubling_passes=data["doubling_passes"],
        )


def intersection_matrix(
    N: int,
    *,
    initial_bound: int | None = None,
    max_doublings: int = 8,
) -> IntersectionMatrix:
    """Full crossing-count matrix over the h classes of discriminant N^2 - 4."""
    if N < 3:
        raise DomainError(f"intersection_matrix requires N >= 3, got {N}")
    D = N * N - 4
    check_discriminant(D)
    cycles = class_cycles(D)
    h = len(cycles)
    entries = [[0] * h for _ in range(h)]
    worst_bound = 0
    worst_passes = 0
    for i in range(h):
        for j in range(i, h):
            cert = intersection_entry(
                cycles[i],
                cycles[j],
                N,
                initial_bound=initial_bound,
                max_doublings=max_doublings,
            )
            entries[i][j] = entries[j][i] = cert.count
            worst_bound = max(worst_bound, cert.final_bound)
            worst_passes = max(worst_passes, cert.doublings)
    return IntersectionMatrix(
        N=N,
        D=D,
        squarefree=is_squarefree(D),
        classes=tuple(c.canonical for c in cycles),
        entries=tuple(tuple(row) for row in entries),
        enumeration_bound=worst_bound,
        doubling_passes=worst_passes,
    )


def total_intersections(N: int, *, matrix: IntersectionMatrix | None = None) -> int:
    """Sum over unordered class pairs plus the diagonal."""
    if matrix is None:
        matrix = intersection_matrix(N)
    elif matrix.N != N:
        raise DomainError(f"matrix is for N={matrix.N}, not N={N}")
    return matrix.total
