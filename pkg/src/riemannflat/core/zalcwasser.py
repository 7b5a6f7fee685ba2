"""
Zalcwasser - L^p norms of quadratic Gauss sums against the psi_p(N) law
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from riemannflat.core.errors import InvalidArgumentError
from riemannflat.core.intermittency import Axis, ScalingTable
from riemannflat.core.norms import l4_fourth, lp_power_grid, validate_exponent
from riemannflat.core.series_core import gauss_sum_coefficients

logger = logging.getLogger(__name__)


class PsiBranch(str, Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class PsiLaw:
    """Growth law of int |D_N|^p: N^{p/2} below p = 4, N^2 log N at 4, N^{p-2} above"""
    p: float
    branch: PsiBranch

    def __call__(self, n_terms: int) -> float:
        if isinstance(n_terms, bool) or int(n_terms) != n_terms or n_terms < 2:
            raise InvalidArgumentError(f"psi_p(N) needs an integer N >= 2, got {n_terms!r}")
        return self.growth(n_terms)

    @property
    def min_terms(self) -> int:
        """Smallest N at which the law is positive"""
        return 2 if self.branch is PsiBranch.CRITICAL else 1

    def growth(self, n_terms: int) -> float:
        """The law without the N >= 2 guard"""
        n = float(n_terms)
        if self.branch is PsiBranch.SUBCRITICAL:
            return n ** (self.p / 2.0)
        if self.branch is PsiBranch.CRITICAL:
            return n * n * math.log(n)
        return n ** (self.p - 2.0)

    def describe(self) -> str:
        if self.branch is PsiBranch.SUBCRITICAL:
            return f"N^{self.p / 2:g}"
        if self.branch is PsiBranch.CRITICAL:
            return "N^2 log N"
        return f"N^{self.p - 2:g}"


def psi_law(p: float) -> PsiLaw:
    p = float(p)
    if not p > 0:
        raise InvalidArgumentError(f"psi_p needs p > 0, got {p}")
    if p < 4:
        return PsiLaw(p, PsiBranch.SUBCRITICAL)
    if p == 4:
        return PsiLaw(p, PsiBranch.CRITICAL)
    return PsiLaw(p, PsiBranch.SUPERCRITICAL)


def psi(p: float, n_terms: int) -> float:
    """psi_p(N) with the natural logarithm"""
    return psi_law(p)(n_terms)


def gauss_sum_lp_power(n_terms: int, p: float, grid_size: Optional[int] = None) -> float:
    """
    int_0^1 |D_N(x)|^p dx

    p = 2 is N by Parseval; p = 4 uses the self-convolution and falls back to
    exact grid quadrature past the pair budget; other even p are integrated
    exactly on the grid and the rest with a refinement check.

    Raises:
        BudgetExceededError: the required grid is too large; lower N
    """
    p = validate_exponent(p)
    gauss = gauss_sum_coefficients(n_terms)
    if p == 2:
        return float(n_terms)
    if p == 4:
        return l4_fourth(gauss)
    logger.debug(f"Grid quadrature for int |D_{n_terms}|^{p:g}")
    return lp_power_grid(gauss, p, grid_size)


def representation_counts(n_terms: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    r_N(k) = #{(a, b) in [1, N]^2 : a^2 + b^2 = k}

    Returns:
        The represented k in increasing order and their counts; the sum of
        the squared counts equals int |D_N|^4
    """
    if isinstance(n_terms, bool) or int(n_terms) != n_terms or n_terms < 1:
        raise InvalidArgumentError(f"N must be a positive integer, got {n_terms!r}")
    squares = np.arange(1, int(n_terms) + 1, dtype=np.int64) ** 2
    sums = (squares[:, None] + squares[None, :]).ravel()
    return np.unique(sums, return_counts=True)


def ratio_sweep(p: float, ns: Sequence[int], threads: Optional[int] = None) -> ScalingTable:
    """
    Rows (N, int |D_N|^p / psi_p(N)) over a sweep of N

    N = 1 is accepted off the critical exponent, where psi_p(1) = 1.
    """
    law = psi_law(p)
    for n in ns:
        if isinstance(n, bool) or int(n) != n or n < law.min_terms:
            raise InvalidArgumentError(
                f"Gauss-sum sweep at p={p:g} needs integers N >= {law.min_terms}, got {n!r}"
            )

    logger.info(f"Zalcwasser sweep p={p:g} against {law.describe()} over {len(ns)} values of N")
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as pool:
        powers = list(pool.map(lambda n: gauss_sum_lp_power(int(n), p), ns))
    laws = [law.growth(int(n)) for n in ns]

    return ScalingTable(
        rows=tuple((float(n), v / w) for n, v, w in zip(ns, powers, laws)),
        axis=Axis.FILTER_CUTOFF,
        quantity=f"zalcwasser_p{p:g}",
        metadata={
            "p": float(p),
            "branch": law.branch.value,
            "law": law.describe(),
            "powers": powers,
            "psi": laws,
        },
    )


def ratio_bracket(table: ScalingTable) -> Tuple[float, float]:
    """Empirical [min, max] of a ratio sweep, the measured stand-in for [c_p, C_p]"""
    if len(table) == 0:
        raise InvalidArgumentError("Bracket of an empty sweep is undefined")
    values = table.values
    return float(values.min()), float(values.max())
