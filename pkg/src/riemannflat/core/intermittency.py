"""
Intermittency - Flatness in both senses, scaling-law fits and multifractal formulas
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from riemannflat.core.errors import InvalidArgumentError, UndefinedFlatnessError
from riemannflat.core.norms import (
    DEFAULT_GRID_SIZE,
    l2_squared_exact,
    l4_fourth,
    snap_to_grid,
    structure_function,
)
from riemannflat.core.series_core import TrigPolynomial
from riemannflat.core.spectral import BandSpec, band_filter

logger = logging.getLogger(__name__)

DEFAULT_LOG_MARGIN = 0.2
STABILITY_TOLERANCE = 0.1
CURVATURE_THRESHOLD = 1e-3


class Axis(str, Enum):
    """What the scale column of a sweep measures"""
    FILTER_CUTOFF = "N"
    INCREMENT_SCALE = "l"


class Quantity(str, Enum):
    """Quantities a sweep can tabulate"""
    L2 = "l2"
    L4 = "l4"
    FLATNESS_F = "F"
    S2 = "S2"
    S4 = "S4"
    FLATNESS_G = "G"

    @property
    def axis(self) -> Axis:
        if self in (Quantity.L2, Quantity.L4, Quantity.FLATNESS_F):
            return Axis.FILTER_CUTOFF
        return Axis.INCREMENT_SCALE


@dataclass(frozen=True)
class ScalingTable:
    """
    (scale, value) rows of an N-sweep or an l-sweep

    Scales are strictly positive and strictly monotone. Values must be
    positive unless positive_values is switched off.
    """
    rows: Tuple[Tuple[float, float], ...]
    axis: Axis
    quantity: str
    metadata: Dict[str, Any] = field(default_factory=dict)
    positive_values: bool = True

    def __post_init__(self):
        rows = tuple((float(s), float(v)) for s, v in self.rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "axis", Axis(self.axis))

        scales = np.array([s for s, _ in rows], dtype=np.float64)
        if np.any(scales <= 0):
            raise InvalidArgumentError(f"Scales must be positive in {self.quantity} table")
        if scales.size > 1:
            steps = np.diff(scales)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise InvalidArgumentError(f"Scales must be strictly monotone in {self.quantity} table")
        if self.positive_values and any(not v > 0 for _, v in rows):
            raise InvalidArgumentError(f"Values must be positive in {self.quantity} table")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def scales(self) -> np.ndarray:
        return np.array([s for s, _ in self.rows], dtype=np.float64)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.rows], dtype=np.float64)

    def window(self, bounds: Optional[Tuple[float, float]]) -> "ScalingTable":
        """Rows whose scale lies in [lo, hi]; None keeps every row"""
        if bounds is None:
            return self
        lo, hi = min(bounds), max(bounds)
        kept = tuple((s, v) for s, v in self.rows if lo <= s <= hi)
        return replace(self, rows=kept)

    def reciprocal(self) -> "ScalingTable":
        """Same rows against 1/scale, the N^-1 <-> l identification"""
        return replace(self, rows=tuple((1.0 / s, v) for s, v in self.rows))

    def normalized(self, weights: Sequence[float], label: str) -> "ScalingTable":
        """Values divided row by row by weights"""
        return replace(
            self,
            rows=tuple((s, v / w) for (s, v), w in zip(self.rows, weights)),
            quantity=label,
        )

    def spread(self) -> float:
        """max/min of the values"""
        values = self.values
        return float(values.max() / values.min())


@dataclass(frozen=True)
class LogCorrection:
    """Outcome of testing value / scale^exponent for a log(1/scale) factor"""
    enabled: bool
    exponent: float
    r2_power_only: float
    r2_with_log: float
    log_coefficient: float
    margin: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "enabled": self.enabled,
            "exponent": self.exponent,
            "r2_power_only": self.r2_power_only,
            "r2_with_log": self.r2_with_log,
            "log_coefficient": self.log_coefficient,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class FitResult:
    """Least-squares power law over a window of a ScalingTable"""
    exponent: float
    exponent_stderr: float
    intercept: float
    r_squared: float
    window: Tuple[float, float]
    residuals: Tuple[float, ...]
    half_window_exponents: Tuple[float, float]
    residual_curvature: float
    log_correction: Optional[LogCorrection] = None

    @property
    def stable(self) -> bool:
        first, second = self.half_window_exponents
        return abs(first - second) < STABILITY_TOLERANCE

    @property
    def curvature_flagged(self) -> bool:
        return abs(self.residual_curvature) > CURVATURE_THRESHOLD

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "exponent_stderr": self.exponent_stderr,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "residuals": list(self.residuals),
            "half_window_exponents": list(self.half_window_exponents),
            "stable": self.stable,
            "residual_curvature": self.residual_curvature,
            "curvature_flagged": self.curvature_flagged,
            "log_correction": self.log_correction.to_dict() if self.log_correction else None,
        }


def _require_cutoff(cutoff: float) -> int:
    if isinstance(cutoff, bool) or float(cutoff) != int(cutoff) or int(cutoff) < 1:
        raise InvalidArgumentError(f"Filter cutoff N must be a positive integer, got {cutoff!r}")
    return int(cutoff)


def high_pass_part(poly: TrigPolynomial, cutoff: int) -> TrigPolynomial:
    """f_{>=N}"""
    return band_filter(poly, BandSpec.high_pass(_require_cutoff(cutoff)))


def flatness_filter(poly: TrigPolynomial, cutoff: int) -> float:
    """
    F_f(N) = ||f_{>=N}||_4^4 / ||f_{>=N}||_2^4

    Raises:
        UndefinedFlatnessError: f_{>=N} has no modes
    """
    part = high_pass_part(poly, cutoff)
    if part.is_empty():
        raise UndefinedFlatnessError(f"High-pass part above N={cutoff} is empty (max_freq={poly.max_freq})")
    l2 = l2_squared_exact(part)
    return l4_fourth(part) / (l2 * l2)


def flatness_structure(poly: TrigPolynomial, ell: float, grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """
    G_f(l) = S_4(l) / S_2(l)^2 at the grid-snapped scale

    Raises:
        UndefinedFlatnessError: the increment vanishes identically
    """
    s2 = structure_function(poly, 2.0, ell, grid_size)
    if s2 == 0:
        raise UndefinedFlatnessError(f"Increment at l={ell} vanishes identically")
    return structure_function(poly, 4.0, ell, grid_size) / (s2 * s2)


def _evaluate(poly: TrigPolynomial, quantity: Quantity, scale: float, grid_size: int) -> float:
    if quantity is Quantity.L2:
        return l2_squared_exact(high_pass_part(poly, int(scale)))
    if quantity is Quantity.L4:
        return l4_fourth(high_pass_part(poly, int(scale)))
    if quantity is Quantity.FLATNESS_F:
        return flatness_filter(poly, int(scale))
    if quantity is Quantity.S2:
        return structure_function(poly, 2.0, scale, grid_size)
    if quantity is Quantity.S4:
        return structure_function(poly, 4.0, scale, grid_size)
    return flatness_structure(poly, scale, grid_size)


def sweep(
    poly: TrigPolynomial,
    axis: Axis,
    scales: Sequence[float],
    quantity: Quantity,
    grid_size: int = DEFAULT_GRID_SIZE,
    threads: Optional[int] = None,
) -> ScalingTable:
    """
    Tabulate a quantity over a sweep of cutoffs N or scales l

    Scales are evaluated on a thread pool and returned in input order. On the
    l axis the table records the grid-snapped scale.
    """
    axis = Axis(axis)
    quantity = Quantity(quantity)
    if quantity.axis is not axis:
        raise InvalidArgumentError(f"Quantity {quantity.value} is not defined on axis {axis.value}")

    if axis is Axis.FILTER_CUTOFF:
        points = [float(_require_cutoff(s)) for s in scales]
    else:
        points = [snap_to_grid(s, grid_size)[1] for s in scales]

    logger.info(f"Sweeping {quantity.value} over {len(points)} {axis.value}-scales")
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as pool:
        values = list(pool.map(lambda s: _evaluate(poly, quantity, s, grid_size), points))

    return ScalingTable(
        rows=tuple(zip(points, values)),
        axis=axis,
        quantity=quantity.value,
        metadata={"requested_scales": [float(s) for s in scales], "grid_size": grid_size},
    )


def fit_power_law(table: ScalingTable, window: Optional[Tuple[float, float]] = None) -> FitResult:
    """
    Ordinary least squares of log(value) on log(scale)

    Besides the slope and its standard error, the result carries the slopes of
    the two half-windows and the quadratic coefficient of a degree-2 fit scaled
    to the window, which exposes a hidden log factor.

    Args:
        table: Scaling table with positive values
        window: Optional (scale_min, scale_max)

    Returns:
        FitResult without log-correction diagnostics
    """
    sub = table.window(window)
    if len(sub) < 4:
        raise InvalidArgumentError(f"Power-law fit needs at least 4 rows in the window, got {len(sub)}")
    if np.any(sub.values <= 0):
        raise InvalidArgumentError("Power-law fit needs positive values")

    order = np.argsort(sub.scales)
    x = np.log(sub.scales[order])
    y = np.log(sub.values[order])

    fit = stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)

    half = x.size // 2
    first = stats.linregress(x[:half], y[:half]).slope
    second = stats.linregress(x[half:], y[half:]).slope

    quadratic = np.polyfit(x, y, 2)[0]
    half_range = (x[-1] - x[0]) / 2.0
    curvature = float(quadratic * half_range * half_range)

    result = FitResult(
        exponent=float(fit.slope),
        exponent_stderr=float(fit.stderr),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue ** 2),
        window=(float(np.exp(x[0])), float(np.exp(x[-1]))),
        residuals=tuple(float(r) for r in residuals),
        half_window_exponents=(float(first), float(second)),
        residual_curvature=curvature,
    )
    logger.debug(
        f"Fit {table.quantity}: exponent {result.exponent:.6f} +- {result.exponent_stderr:.2e}, "
        f"halves {first:.4f}/{second:.4f}, curvature {curvature:.3e}"
    )
    return result


def detect_log_correction(
    table: ScalingTable,
    exponent: float,
    margin: float = DEFAULT_LOG_MARGIN,
    window: Optional[Tuple[float, float]] = None,
) -> FitResult:
    """
    Test whether value / scale^exponent grows like log(1/scale)

    The compensated values y are compared under two models: a constant, and
    y = b * |log scale| through the origin. The correction is enabled when the
    log model gains at least margin in r^2 and y rises with |log scale|.

    Returns:
        The power-law fit of the same window with log_correction filled in
    """
    sub = table.window(window)
    base = fit_power_law(sub)

    scales = sub.scales
    y = sub.values / scales ** float(exponent)
    big_l = np.abs(np.log(scales))

    centered = y - y.mean()
    tss = float(np.dot(centered, centered))
    r2_const = 1.0 if tss == 0 else 0.0

    b = float(np.dot(y, big_l) / np.dot(big_l, big_l))
    rss = float(np.sum((y - b * big_l) ** 2))
    if tss == 0:
        r2_log = 1.0 if rss == 0 else 0.0
    else:
        r2_log = max(0.0, 1.0 - rss / tss)

    coefficient = float(stats.linregress(big_l, y).slope / y.mean())
    enabled = (r2_log - r2_const) >= margin and coefficient > 0

    correction = LogCorrection(
        enabled=bool(enabled),
        exponent=float(exponent),
        r2_power_only=r2_const,
        r2_with_log=r2_log,
        log_coefficient=coefficient,
        margin=float(margin),
    )
    logger.info(
        f"Log correction for {table.quantity} at exponent {exponent:g}: "
        f"enabled={correction.enabled}, r2 {r2_const:.3f} -> {r2_log:.3f}, coefficient {coefficient:.3e}"
    )
    return replace(base, log_correction=correction)


def jaffard_zeta(p: float) -> float:
    """Scaling exponents of Riemann's function: 3p/4 for p <= 4, 1 + p/2 beyond"""
    p = float(p)
    if p < 1:
        raise InvalidArgumentError(f"Exponent p must be >= 1, got {p}")
    return 0.75 * p if p <= 4 else 1.0 + 0.5 * p


def jaffard_spectrum(alpha: float) -> float:
    """Spectrum of singularities: 4a - 2 on [1/2, 3/4], 0 at a = 3/2, -inf elsewhere"""
    if 0.5 <= alpha <= 0.75:
        return 4.0 * alpha - 2.0
    if alpha == 1.5:
        return 0.0
    return -math.inf


def default_p_grid(p_max: float = 12.0, step: float = 0.01) -> np.ndarray:
    """Uniform grid on [1, p_max] that always contains p = 4"""
    if p_max < 1 or step <= 0:
        raise InvalidArgumentError(f"Bad p-grid: p_max={p_max}, step={step}")
    count = int(round((p_max - 1.0) / step)) + 1
    return np.union1d(np.linspace(1.0, p_max, count), [4.0])


def legendre_spectrum(
    zeta: Callable[[float], float],
    alpha: float,
    p_grid: Optional[Sequence[float]] = None,
) -> float:
    """
    Multifractal formalism d(a) = min over p of (a p - zeta(p) + 1)

    p = 4 is always added to the grid.
    """
    grid = default_p_grid() if p_grid is None else np.asarray(p_grid, dtype=np.float64)
    if grid.size == 0:
        raise InvalidArgumentError("Legendre transform needs a nonempty p-grid")
    grid = np.union1d(grid, [4.0])
    values = [alpha * p - zeta(p) + 1.0 for p in grid.tolist()]
    return float(min(values))


def spectrum_rows(
    alphas: Sequence[float],
    p_grid: Optional[Sequence[float]] = None,
) -> List[Tuple[float, float, float]]:
    """(alpha, Legendre value, closed form) for each alpha"""
    grid = default_p_grid() if p_grid is None else p_grid
    return [
        (float(a), legendre_spectrum(jaffard_zeta, float(a), grid), jaffard_spectrum(float(a)))
        for a in alphas
    ]
