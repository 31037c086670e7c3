"""The real character chi_D, its partial sums, and L(chi_D, 1) with a
certified elementary tail bound.

For a discriminant D > 0 the Kronecker symbol chi_D(n) = (D/n) is a real
non-principal character of period D, so its partial sums s_Delta satisfy
the uniform bound |s_Delta| <= D.  Abel summation then bounds the tail of
L(chi_D, 1) = sum chi_D(n)/n beyond a cutoff Delta by 2*D/Delta, which is
the error this module certifies (floating-point rounding is bounded
separately and reported alongside).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimitError
from .integer_arith import is_squarefree, kronecker
from .quad_forms import check_discriminant, class_number, fundamental_unit

__all__ = [
    "LValueEstimate",
    "ClassNumberFormulaReport",
    "character_table",
    "char_partial_sum",
    "l_value",
    "verify_class_number_formula",
    "DEFAULT_DELTA_LIMIT",
]

DEFAULT_DELTA_LIMIT = 50_000_000

_table_cache: dict[int, np.ndarray] = {}
_prefix_cache: dict[int, list[int]] = {}


def character_table(D: int) -> np.ndarray:
    """chi_D(r) for r = 0 .. D-1, as a float array (values in {-1, 0, 1})."""
    check_discriminant(D)
    if D not in _table_cache:
        _table_cache[D] = np.array([kronecker(D, r) for r in range(D)], dtype=float)
    return _table_cache[D]


def _prefix_sums(D: int) -> list[int]:
    # prefix[r] = sum_{n=1}^{r} chi_D(n), exact integers, r = 0 .. D
    if D not in _prefix_cache:
        table = character_table(D)
        acc = [0]
        for r in range(1, D + 1):
            acc.append(acc[-1] + int(table[r % D]))
        _prefix_cache[D] = acc
    return _prefix_cache[D]


def char_partial_sum(D: int, delta: int) -> int:
    """s_Delta = sum_{n <= Delta} chi_D(n), exact.

    The full-period sum vanishes (the character is non-principal), so only
    the residual block of length Delta mod D contributes.
    """
    if delta < 0:
        raise DomainError(f"char_partial_sum requires Delta >= 0, got {delta}")
    if delta == 0:
        return 0
    prefix = _prefix_sums(D)
    full, rem = divmod(delta, D)
    return full * prefix[D] + prefix[rem]


@dataclass(frozen=True)
class LValueEstimate:
    """Partial sum of L(chi_D, 1) with a rigorous error certificate.

    The truth lies in [value - total_error, value + total_error] where
    total_error = tail_bound + rounding_bound; tail_bound = 2*D/Delta is the
    Abel-summation tail and rounding_bound covers floating-point effects.
    """

    D: int
    delta: int
    value: float
    tail_bound: float
    rounding_bound: float

    @property
    def total_error(self) -> float:
        return self.tail_bound + self.rounding_bound


def l_value(D: int, tol: float, *, delta_limit: int = DEFAULT_DELTA_LIMIT) -> LValueEstimate:
    """Estimate L(chi_D, 1) with certified tail bound <= tol.

    Takes Delta = ceil(2*D/tol) so that the Abel tail 2*D/Delta is at most
    tol.  The partial sum itself is evaluated with exact (fsum) summation of
    correctly rounded terms; the certified rounding budget covers one ulp
    per division plus the final rounding, all below (2 + ln Delta)*2^-52.
    """
    check_discriminant(D)
    if tol <= 0:
        raise DomainError(f"l_value requires tol > 0, got {tol}")
    delta = math.ceil(2 * D / tol)
    if delta > delta_limit:
        raise ResourceLimitError(
            f"l_value needs Delta = {delta} terms for D={D}, tol={tol}, "
            f"above delta_limit = {delta_limit}",
            limit_name="delta_limit",
            limit_value=delta_limit,
        )
    table = character_table(D)
    n = np.arange(1, delta + 1, dtype=np.int64)
    terms = table[n % D] / n
    value = math.fsum(terms.tolist())
    tail_bound = 2 * D / delta
    rounding_bound = (2.0 + math.log(delta)) * 2.0**-52
    assert tail_bound <= tol * (1 + 1e-12)
    assert abs(value) <= 1 + math.log(delta)  # the trivial partial-sum bound
    return LValueEstimate(D, delta, value, tail_bound, rounding_bound)


@dataclass(frozen=True)
class ClassNumberFormulaReport:
    """Two-sided check of h(D) * log(eps) = sqrt(D) * L(chi_D, 1).

    The left side comes from form reduction cycles, the right side from
    character sums; the two computations share no code path.
    """

    N: int
    D: int
    squarefree: bool
    status: str  # "pass" | "fail" | "skipped"
    h: int | None = None
    log_eps: float | None = None
    lhs: float | None = None
    rhs: float | None = None
    residual: float | None = None
    threshold: float | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def verify_class_number_formula(
    N: int, tol: float, *, delta_limit: int = DEFAULT_DELTA_LIMIT
) -> ClassNumberFormulaReport:
    """Check the class number formula at discriminant D = N^2 - 4.

    Skipped (not failed) when D is not squarefree, since only fundamental
    discriminants satisfy the identity in this raw form.  Passes when

        | h(D) log(eps_D)  -  sqrt(D) * L(chi_D, 1) |
            <= sqrt(D) * (tol + rounding) + slack.
    """
    if N < 3:
        raise DomainError(f"verify_class_number_formula requires N >= 3, got {N}")
    D = N * N - 4
    if not is_squarefree(D):
        return ClassNumberFormulaReport(N, D, False, "skipped")
    h = class_number(D)
    log_eps = fundamental_unit(N).log_value
    lhs = h * log_eps
    est = l_value(D, tol, delta_limit=delta_limit)
    sqrt_d = math.sqrt(D)
    rhs = sqrt_d * est.value
    residual = abs(lhs - rhs)
    threshold = sqrt_d * (est.tail_bound + est.rounding_bound) + 1e-9
    status = "pass" if residual <= threshold else "fail"
    return ClassNumberFormulaReport(
        N, D, True, status, h, log_eps, lhs, rhs, residual, threshold
    )
