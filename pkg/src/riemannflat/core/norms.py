"""
Norms - L^p norms of trigonometric polynomials and structure functions
Exact Parseval and self-convolution paths for p = 2 and p = 4, grid quadrature otherwise
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from riemannflat.core.errors import (
    BudgetExceededError,
    ConvergenceError,
    InvalidArgumentError,
    TruncationError,
)
from riemannflat.core.series_core import TrigPolynomial, increment_coefficients
from riemannflat.core.spectral import (
    BandSpec,
    GridSignal,
    band_filter,
    circular_shift,
    littlewood_paley_square_function,
    synthesize,
)
from riemannflat.utils.precision import compensated_sum, is_power_of_two, zeta_tail

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 1 << 20
DEFAULT_PAIR_BUDGET = 1 << 24
DEFAULT_TAIL_TOLERANCE = 1e-3
P_MIN = 1.0
P_MAX = 12.0

# Largest frequency span accumulated in a dense array by the self-convolution
_DENSE_SPAN_LIMIT = 1 << 23
# Pairs materialized per convolution chunk
_PAIR_CHUNK = 1 << 22
# Relative change accepted between grids M and 2M
_CONVERGENCE_RTOL = 1e-6
_MAX_REFINEMENTS = 4
_MAX_GRID_SIZE = 1 << 25


class NormMethod(str, Enum):
    """How an L^p norm is evaluated"""
    EXACT_PARSEVAL = "parseval"
    EXACT_CONVOLUTION = "convolution"
    GRID_QUADRATURE = "grid"


@dataclass(frozen=True)
class NormRequest:
    """An L^p evaluation: exponent, method and (for grid quadrature) a grid size"""
    p: float
    method: NormMethod = NormMethod.GRID_QUADRATURE
    grid_size: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "method", NormMethod(self.method))
        validate_exponent(self.p)
        if self.method is NormMethod.EXACT_PARSEVAL and self.p != 2:
            raise InvalidArgumentError(f"Parseval path only computes p=2, got p={self.p}")
        if self.method is NormMethod.EXACT_CONVOLUTION and self.p != 4:
            raise InvalidArgumentError(f"Convolution path only computes p=4, got p={self.p}")
        if self.method is NormMethod.GRID_QUADRATURE:
            if self.grid_size is not None and not is_power_of_two(self.grid_size):
                raise InvalidArgumentError(f"Grid size must be a power of two, got {self.grid_size}")
        elif self.grid_size is not None:
            raise InvalidArgumentError(f"Grid size only applies to grid quadrature, not {self.method.value}")

    @classmethod
    def default_for(cls, p: float) -> "NormRequest":
        """Exact method where one exists, grid quadrature otherwise"""
        if p == 2:
            return cls(p, NormMethod.EXACT_PARSEVAL)
        if p == 4:
            return cls(p, NormMethod.EXACT_CONVOLUTION)
        return cls(p, NormMethod.GRID_QUADRATURE)

    def compute(self, poly: TrigPolynomial) -> float:
        """Return ||poly||_p^p by the requested method"""
        if self.method is NormMethod.EXACT_PARSEVAL:
            return l2_squared_exact(poly)
        if self.method is NormMethod.EXACT_CONVOLUTION:
            return l4_fourth_exact(poly)
        return lp_power_grid(poly, self.p, self.grid_size)


def validate_exponent(p: float) -> float:
    p = float(p)
    if not P_MIN <= p <= P_MAX:
        raise InvalidArgumentError(f"Exponent p must lie in [{P_MIN:g}, {P_MAX:g}], got {p}")
    return p


def _is_even_integer(p: float) -> bool:
    return float(p).is_integer() and int(p) % 2 == 0


def l2_squared_exact(poly: TrigPolynomial) -> float:
    """||f||_2^2 = sum |c_n|^2 by Parseval, compensated"""
    c = poly.coefficients
    return compensated_sum(c.real * c.real + c.imag * c.imag)


def l4_fourth_exact(poly: TrigPolynomial, pair_budget: int = DEFAULT_PAIR_BUDGET) -> float:
    """
    ||f||_4^4 = ||f^2||_2^2 through the sparse self-convolution of the coefficients

    Unordered pairs (i <= j) are enumerated in chunks; off-diagonal products
    count twice. Small frequency spans accumulate into a dense array, wide
    ones through np.unique.

    Args:
        poly: Polynomial to measure
        pair_budget: Largest number of coefficient pairs allowed

    Returns:
        sum_k |sum_n c_n c_{k-n}|^2
    """
    size = poly.support_size
    if size == 0:
        return 0.0
    pairs = size * (size + 1) // 2
    if pairs > pair_budget:
        raise BudgetExceededError(
            f"Self-convolution of {size} modes needs {pairs} pairs (budget {pair_budget}); "
            f"use grid quadrature instead"
        )

    freqs = poly.frequencies
    coeffs = poly.coefficients
    offset = 2 * int(freqs[0])
    span = 2 * (int(freqs[-1]) - int(freqs[0])) + 1
    dense = span <= _DENSE_SPAN_LIMIT
    logger.debug(f"Self-convolution of {size} modes, {pairs} pairs, {'dense' if dense else 'sparse'} accumulator")

    if dense:
        acc_re = np.zeros(span, dtype=np.float64)
        acc_im = np.zeros(span, dtype=np.float64)
    partial: List[Tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    rows_per_chunk = max(1, _PAIR_CHUNK // size)
    for i0 in range(0, size, rows_per_chunk):
        i1 = min(size, i0 + rows_per_chunk)
        rows = np.arange(i0, i1)
        cols = np.arange(i0, size)
        r_idx, c_idx = np.nonzero(rows[:, None] <= cols[None, :])
        ii = rows[r_idx]
        jj = cols[c_idx]

        weight = np.where(ii == jj, 1.0, 2.0)
        products = coeffs[ii] * coeffs[jj] * weight
        keys = freqs[ii] + freqs[jj] - offset

        if dense:
            acc_re += np.bincount(keys, weights=products.real, minlength=span)
            acc_im += np.bincount(keys, weights=products.imag, minlength=span)
        else:
            partial.append(_reduce_by_key(keys, products.real, products.imag))

    if not dense:
        keys = np.concatenate([k for k, _, _ in partial])
        _, acc_re, acc_im = _reduce_by_key(
            keys,
            np.concatenate([re for _, re, _ in partial]),
            np.concatenate([im for _, _, im in partial]),
        )

    return compensated_sum(acc_re * acc_re + acc_im * acc_im)


def l4_fourth(poly: TrigPolynomial) -> float:
    """||f||_4^4 by self-convolution, or by exact grid quadrature past the pair budget"""
    try:
        return l4_fourth_exact(poly)
    except BudgetExceededError as e:
        logger.debug(f"Falling back to grid quadrature: {e}")
        return lp_power_grid(poly, 4.0)


def _reduce_by_key(keys: np.ndarray, re: np.ndarray, im: np.ndarray):
    unique, inverse = np.unique(keys, return_inverse=True)
    inverse = inverse.ravel()
    return (
        unique,
        np.bincount(inverse, weights=re, minlength=unique.size),
        np.bincount(inverse, weights=im, minlength=unique.size),
    )


def exact_grid_size(poly: TrigPolynomial, p: float) -> int:
    """
    Smallest power of two M that synthesizes poly and integrates |poly|^p exactly

    For even p, |f|^p = (f conj(f))^{p/2} has frequencies up to (p/2)(max - min),
    so the uniform rule is exact once M exceeds that and 2 * max_freq.
    """
    if not _is_even_integer(p):
        raise InvalidArgumentError(f"Exact quadrature needs an even integer p, got {p}")
    width = (int(p) // 2) * (int(poly.frequencies[-1]) - int(poly.frequencies[0])) if poly.support_size else 0
    need = max(2 * poly.max_freq, width)
    return max(2, 1 << need.bit_length())


def _mean_abs_power(samples: np.ndarray, p: float) -> float:
    squared = samples.real * samples.real + samples.imag * samples.imag
    if _is_even_integer(p):
        values = squared ** (int(p) // 2)
    else:
        values = np.sqrt(squared) ** p
    return compensated_sum(values) / samples.size


def lp_norm_grid(signal: GridSignal, p: float) -> float:
    """
    ((1/M) sum_j |samples_j|^p)^{1/p}

    Exact for even integer p once M resolves |f|^p (see exact_grid_size).
    """
    p = float(p)
    if p < 1:
        raise InvalidArgumentError(f"Exponent p must be >= 1, got {p}")
    return _mean_abs_power(signal.samples, p) ** (1.0 / p)


def lp_power_grid(poly: TrigPolynomial, p: float, grid_size: Optional[int] = None) -> float:
    """
    ||poly||_p^p by grid quadrature

    Even p is integrated exactly on max(grid_size, exact_grid_size). Other
    exponents are refined from M to 2M until the relative change drops below
    1e-6.

    Args:
        poly: Polynomial to measure
        p: Exponent >= 1
        grid_size: Optional starting grid

    Returns:
        (1/M) sum_j |f(j/M)|^p on the final grid
    """
    p = float(p)
    if p < 1:
        raise InvalidArgumentError(f"Exponent p must be >= 1, got {p}")
    if poly.is_empty():
        return 0.0

    if _is_even_integer(p):
        size = max(grid_size or 0, exact_grid_size(poly, p))
        if size > _MAX_GRID_SIZE:
            raise BudgetExceededError(
                f"Exact quadrature of |f|^{p:g} needs M={size} (limit {_MAX_GRID_SIZE}); "
                f"reduce the truncation or use the convolution path"
            )
        logger.debug(f"Exact grid quadrature p={p:g} on M={size}")
        return _mean_abs_power(synthesize(poly, size).samples, p)

    size = max(grid_size or 0, exact_grid_size(poly, 2 * math.ceil(p / 2)))
    coarse = _mean_abs_power(synthesize(poly, size).samples, p)
    for _ in range(_MAX_REFINEMENTS):
        if 2 * size > _MAX_GRID_SIZE:
            break
        size *= 2
        fine = _mean_abs_power(synthesize(poly, size).samples, p)
        change = abs(fine - coarse) / max(abs(fine), np.finfo(float).tiny)
        logger.debug(f"Grid refinement p={p:g} M={size}: relative change {change:.3e}")
        if change < _CONVERGENCE_RTOL:
            return fine
        coarse = fine
    raise ConvergenceError(f"Quadrature of |f|^{p:g} did not settle up to M={size}")


def snap_to_grid(ell: float, grid_size: int) -> Tuple[int, float]:
    """
    Nearest grid fraction m/M to ell, with 1 <= m <= M - 1

    Returns:
        (m, m / M)
    """
    ell = float(ell)
    if not 0.0 < ell < 1.0:
        raise InvalidArgumentError(f"Scale must lie in (0, 1), got {ell}")
    if not is_power_of_two(grid_size) or grid_size < 2:
        raise InvalidArgumentError(f"Grid size must be a power of two >= 2, got {grid_size}")
    m = int(math.floor(ell * grid_size + 0.5))
    m = min(max(m, 1), grid_size - 1)
    return m, m / grid_size


def structure_function(
    poly: TrigPolynomial,
    p: float,
    ell: float,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> float:
    """
    S_p(l) = ||f(. + l/2) - f(. - l/2)||_p^p at the grid-snapped scale

    p = 2 runs through Parseval on the increment, p = 4 through the
    self-convolution (grid quadrature past the pair budget), other p through
    grid quadrature. grid_size fixes the snapping lattice m/M.
    """
    p = validate_exponent(p)
    _, snapped = snap_to_grid(ell, grid_size)
    increment = increment_coefficients(poly, snapped)

    if p == 2:
        return l2_squared_exact(increment)
    if p == 4:
        return l4_fourth(increment)
    return lp_power_grid(increment, p)


def structure_function_shifted(
    poly: TrigPolynomial,
    p: float,
    ell: float,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> float:
    """
    S_p(l) as (1/M) sum_j |f(x_j + m/M) - f(x_j)|^p from synthesized samples

    The shift is an exact circular rotation of the grid.
    """
    p = validate_exponent(p)
    m, _ = snap_to_grid(ell, grid_size)
    signal = synthesize(poly, grid_size)
    difference = circular_shift(signal, m).samples - signal.samples
    return _mean_abs_power(difference, p)


@dataclass(frozen=True)
class StructureRow:
    """One S_p(l) value with the scale as requested and as snapped"""
    ell_requested: float
    ell: float
    p: float
    value: float


@dataclass(frozen=True)
class StructureFunctionTable:
    """S_p(l) rows sorted by (p, l)"""
    rows: Tuple[StructureRow, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        rows = tuple(sorted(self.rows, key=lambda r: (r.p, r.ell)))
        for row in rows:
            if not 0.0 < row.ell < 1.0:
                raise InvalidArgumentError(f"Scale {row.ell} outside (0, 1)")
            if row.value < 0:
                raise InvalidArgumentError(f"Negative structure function value {row.value} at l={row.ell}")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def for_exponent(self, p: float) -> List[StructureRow]:
        return [row for row in self.rows if row.p == p]


def structure_table(
    poly: TrigPolynomial,
    ps: Sequence[float],
    ells: Sequence[float],
    grid_size: int = DEFAULT_GRID_SIZE,
    threads: Optional[int] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> StructureFunctionTable:
    """
    S_p(l) over the Cartesian product of ps and ells

    Pairs are evaluated on a thread pool; rows come back in (p, l) order.
    """
    jobs = [(float(p), float(ell)) for p in ps for ell in ells]
    meta = dict(metadata or {})
    meta.setdefault("grid_size", grid_size)
    if not jobs:
        return StructureFunctionTable(rows=(), metadata=meta)

    def evaluate(job: Tuple[float, float]) -> StructureRow:
        p, ell = job
        _, snapped = snap_to_grid(ell, grid_size)
        value = structure_function(poly, p, ell, grid_size)
        return StructureRow(ell_requested=ell, ell=snapped, p=p, value=value)

    logger.info(f"Evaluating {len(jobs)} structure-function entries")
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as pool:
        rows = list(pool.map(evaluate, jobs))
    return StructureFunctionTable(rows=tuple(rows), metadata=meta)


@dataclass(frozen=True)
class IncrementSplit:
    """L^4 fourth powers of the low (k <= 1/(2l)) and high parts of an increment"""
    ell: float
    cutoff: int
    low: float
    high: float
    total: float

    def triangle_holds(self, rtol: float = 1e-9) -> bool:
        lo4, hi4, tot4 = self.low ** 0.25, self.high ** 0.25, self.total ** 0.25
        slack = rtol * max(lo4 + hi4, 1.0)
        return abs(lo4 - hi4) <= tot4 + slack and tot4 <= lo4 + hi4 + slack


def increment_split_l4(poly: TrigPolynomial, ell: float) -> IncrementSplit:
    """Split the increment at k = 1/(2l) and measure both halves in L^4"""
    increment = increment_coefficients(poly, ell)
    cutoff = int(math.floor(1.0 / (2.0 * float(ell))))
    low = band_filter(increment, BandSpec.low_pass(cutoff, inclusive=True))
    high = band_filter(increment, BandSpec.high_pass(cutoff, inclusive=False))
    return IncrementSplit(
        ell=float(ell),
        cutoff=cutoff,
        low=l4_fourth_exact(low),
        high=l4_fourth_exact(high),
        total=l4_fourth_exact(increment),
    )


@dataclass(frozen=True)
class TruncationCheck:
    """Whether K_max resolves the requested scales and the omitted tail is negligible"""
    k_max: int
    required_k_max: int
    tail_bound: float
    reference: float
    tolerance: float

    @property
    def resolves_scales(self) -> bool:
        return self.k_max >= self.required_k_max

    @property
    def tail_ratio(self) -> float:
        if self.reference <= 0:
            return math.inf
        return self.tail_bound / self.reference

    @property
    def adequate(self) -> bool:
        return self.resolves_scales and self.tail_ratio < self.tolerance

    def raise_if_inadequate(self) -> None:
        if not self.resolves_scales:
            raise TruncationError(
                f"K_max={self.k_max} is below the required {self.required_k_max} for the requested scales"
            )
        if not self.tail_ratio < self.tolerance:
            raise TruncationError(
                f"Truncation tail {self.tail_bound:.3e} is {self.tail_ratio:.3e} of the measured "
                f"quantity {self.reference:.3e} (tolerance {self.tolerance:g})"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k_max": self.k_max,
            "required_k_max": self.required_k_max,
            "tail_bound": self.tail_bound,
            "reference": self.reference,
            "tail_ratio": self.tail_ratio,
            "tolerance": self.tolerance,
            "adequate": self.adequate,
        }


def check_truncation(
    k_max: int,
    reference: float,
    ell_min: Optional[float] = None,
    n_max: Optional[int] = None,
    tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> TruncationCheck:
    """
    Truncation adequacy of a Riemann-type series

    Scales down to ell_min need K_max >= 16/ell_min, filter cutoffs up to n_max
    need K_max >= 16 * n_max, and the L^2 tail sum_{n > sqrt(K_max)} n^-4 must
    stay below tolerance * reference.
    """
    required = 1
    if ell_min is not None:
        required = max(required, int(math.ceil(16.0 / float(ell_min))))
    if n_max is not None:
        required = max(required, 16 * int(n_max))
    return TruncationCheck(
        k_max=int(k_max),
        required_k_max=required,
        tail_bound=zeta_tail(4.0, math.isqrt(int(k_max)) + 1),
        reference=float(reference),
        tolerance=float(tolerance),
    )


def square_function_ratio(
    poly: TrigPolynomial,
    base: float = 2.0,
    p: float = 4.0,
    grid_size: Optional[int] = None,
) -> float:
    """
    ||(sum_j |Delta_j f|^2)^{1/2}||_p / ||f||_p on a common grid

    The Littlewood-Paley theorem keeps this ratio inside fixed bounds for each p.
    """
    p = validate_exponent(p)
    if poly.is_empty():
        raise InvalidArgumentError("Square-function ratio of the zero polynomial is undefined")
    if grid_size is None:
        grid_size = exact_grid_size(poly, 2 * math.ceil(p / 2))
    square = littlewood_paley_square_function(poly, base, grid_size)
    return lp_norm_grid(square, p) / lp_norm_grid(synthesize(poly, grid_size), p)
