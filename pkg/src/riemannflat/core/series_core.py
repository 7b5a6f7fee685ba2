"""
Series Core - Coefficient sequences of Riemann's function and its relatives
Builds Riemann's series, quadratic Gauss sums, increments and the corner trajectory
as finite trigonometric polynomials
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np

from riemannflat.core.errors import InvalidArgumentError
from riemannflat.utils.precision import sin_pi, zeta_tail

logger = logging.getLogger(__name__)

# Evaluation chunk for direct summation (points x modes per block)
_EVAL_BLOCK = 1 << 22


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """
    Finite complex Fourier series sum_n c_n e^{2 pi i n x}

    Frequencies are stored sorted and unique next to their coefficients.
    Exactly-zero coefficients are dropped on construction; both arrays are
    read-only afterwards.
    """
    frequencies: np.ndarray
    coefficients: np.ndarray
    _max_freq: int = field(init=False, repr=False)

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=np.int64).ravel()
        coeffs = np.asarray(self.coefficients, dtype=np.complex128).ravel()
        if freqs.shape != coeffs.shape:
            raise InvalidArgumentError(
                f"Frequency and coefficient arrays differ in length: {freqs.size} != {coeffs.size}"
            )

        order = np.argsort(freqs, kind="stable")
        freqs = freqs[order]
        coeffs = coeffs[order]
        if freqs.size > 1 and np.any(freqs[1:] == freqs[:-1]):
            raise InvalidArgumentError("Duplicate frequencies in trigonometric polynomial")

        keep = coeffs != 0
        freqs = freqs[keep].copy()
        coeffs = coeffs[keep].copy()
        freqs.setflags(write=False)
        coeffs.setflags(write=False)

        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "_max_freq", int(np.max(np.abs(freqs))) if freqs.size else 0)

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, complex]) -> "TrigPolynomial":
        """Create a polynomial from a frequency -> coefficient mapping"""
        items = sorted(coeffs.items())
        return cls(
            frequencies=np.array([n for n, _ in items], dtype=np.int64),
            coefficients=np.array([c for _, c in items], dtype=np.complex128),
        )

    @classmethod
    def empty(cls) -> "TrigPolynomial":
        """The zero polynomial"""
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128))

    @property
    def max_freq(self) -> int:
        """Largest |n| with a stored coefficient (0 for the zero polynomial)"""
        return self._max_freq

    @property
    def min_freq(self) -> int:
        """Smallest stored frequency (0 for the zero polynomial)"""
        return int(self.frequencies[0]) if self.frequencies.size else 0

    @property
    def support_size(self) -> int:
        return int(self.frequencies.size)

    @property
    def coeffs(self) -> Dict[int, complex]:
        """Coefficients as a plain frequency -> value mapping"""
        return {int(n): complex(c) for n, c in zip(self.frequencies, self.coefficients)}

    def is_empty(self) -> bool:
        return self.frequencies.size == 0

    def has_nonnegative_support(self) -> bool:
        return self.frequencies.size == 0 or int(self.frequencies[0]) >= 0

    def coefficient(self, n: int) -> complex:
        """Coefficient of frequency n (0 when n is outside the support)"""
        idx = int(np.searchsorted(self.frequencies, n))
        if idx < self.frequencies.size and int(self.frequencies[idx]) == n:
            return complex(self.coefficients[idx])
        return 0j

    def scaled(self, factor: complex) -> "TrigPolynomial":
        """Multiply every coefficient by a complex constant"""
        return TrigPolynomial(self.frequencies, self.coefficients * complex(factor))

    def translated(self, shift: float) -> "TrigPolynomial":
        """The polynomial x -> f(x + shift), coefficients c_n e^{2 pi i n shift}"""
        phase = np.remainder(self.frequencies * float(shift), 1.0)
        return TrigPolynomial(self.frequencies, self.coefficients * np.exp(2j * np.pi * phase))

    def restricted(self, mask: np.ndarray) -> "TrigPolynomial":
        """Keep the coefficients selected by a boolean mask over the support"""
        return TrigPolynomial(self.frequencies[mask], self.coefficients[mask])

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        freqs = np.union1d(self.frequencies, other.frequencies)
        coeffs = np.zeros(freqs.size, dtype=np.complex128)
        coeffs[np.searchsorted(freqs, self.frequencies)] += self.coefficients
        coeffs[np.searchsorted(freqs, other.frequencies)] += other.coefficients
        return TrigPolynomial(freqs, coeffs)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + other.scaled(-1.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return (
            np.array_equal(self.frequencies, other.frequencies)
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def __hash__(self) -> int:
        return hash((self.frequencies.tobytes(), self.coefficients.tobytes()))

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        """
        Direct summation of the series at arbitrary points

        Args:
            x: Evaluation points on the circle

        Returns:
            Complex values sum_n c_n e^{2 pi i n x}
        """
        points = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.zeros(points.size, dtype=np.complex128)
        if self.is_empty() or points.size == 0:
            return out

        rows = max(1, _EVAL_BLOCK // self.support_size)
        for start in range(0, points.size, rows):
            block = points[start:start + rows]
            phase = np.remainder(np.outer(block, self.frequencies.astype(np.float64)), 1.0)
            out[start:start + rows] = np.exp(2j * np.pi * phase) @ self.coefficients
        return out

    def __repr__(self) -> str:
        return f"TrigPolynomial(support_size={self.support_size}, max_freq={self.max_freq})"


class SeriesKind(str, Enum):
    """Families of series the toolkit constructs"""
    RIEMANN = "riemann"
    GAUSS_SUM = "gauss"
    INCREMENT = "increment"
    TRAJECTORY = "trajectory"


@dataclass(frozen=True)
class SeriesSpec:
    """
    Which series to build and where to truncate it

    truncation is the frequency cutoff K_max for Riemann, increment and
    trajectory series, and the number of terms N for Gauss sums.
    """
    kind: SeriesKind = SeriesKind.RIEMANN
    truncation: int = 1 << 20
    shift: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SeriesKind(self.kind))
        if isinstance(self.truncation, bool) or int(self.truncation) != self.truncation:
            raise InvalidArgumentError(f"Truncation must be an integer, got {self.truncation!r}")
        object.__setattr__(self, "truncation", int(self.truncation))
        if self.truncation < 1:
            raise InvalidArgumentError(f"Truncation must be >= 1, got {self.truncation}")
        if self.kind is SeriesKind.INCREMENT:
            if self.shift is None:
                raise InvalidArgumentError("Increment series needs a shift")
            if not 0.0 <= float(self.shift) <= 1.0:
                raise InvalidArgumentError(f"Shift must lie in [0, 1], got {self.shift}")
        elif self.shift is not None:
            raise InvalidArgumentError(f"Shift is only meaningful for increment series, not {self.kind.value}")

    def build(self) -> TrigPolynomial:
        """
        Construct the polynomial this spec describes

        For TRAJECTORY the periodic part P of phi(t) = 2 pi i t + P(t) is returned.
        """
        if self.kind is SeriesKind.RIEMANN:
            return riemann_coefficients(self.truncation)
        if self.kind is SeriesKind.GAUSS_SUM:
            return gauss_sum_coefficients(self.truncation)
        if self.kind is SeriesKind.INCREMENT:
            return increment_coefficients(riemann_coefficients(self.truncation), float(self.shift))
        return trajectory_coefficients(self.truncation)

    def tail_bound(self) -> float:
        """
        Size of what the truncation leaves out

        Sum over n > floor(sqrt(K_max)) of n^-4 for Riemann and increment series
        (the L^2 tail of the omitted modes), the sup-norm tail of phi for the
        trajectory, and 0 for the finite Gauss sums.
        """
        if self.kind is SeriesKind.GAUSS_SUM:
            return 0.0
        if self.kind is SeriesKind.TRAJECTORY:
            return phi_tail_bound(self.truncation)
        return zeta_tail(4.0, math.isqrt(self.truncation) + 1)

    def to_dict(self) -> Dict[str, object]:
        return {"kind": self.kind.value, "truncation": self.truncation, "shift": self.shift}


def _require_positive_int(value: int, name: str) -> int:
    if isinstance(value, bool) or int(value) != value or int(value) < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def riemann_coefficients(k_max: int) -> TrigPolynomial:
    """
    Riemann's series sum_k sigma_k / k e^{2 pi i k x} truncated at k <= K_max

    Args:
        k_max: Frequency cutoff, K_max >= 1

    Returns:
        Polynomial with c_{n^2} = 1/n^2 for n <= floor(sqrt(K_max))
    """
    k_max = _require_positive_int(k_max, "K_max")
    n = np.arange(1, math.isqrt(k_max) + 1, dtype=np.int64)
    squares = n * n
    logger.debug(f"Riemann series up to K_max={k_max}: {n.size} modes")
    return TrigPolynomial(squares, 1.0 / squares.astype(np.float64))


def gauss_sum_coefficients(n_terms: int) -> TrigPolynomial:
    """Quadratic Gauss sum D_N = sum_{m=1}^N e^{2 pi i m^2 x}"""
    n_terms = _require_positive_int(n_terms, "N")
    m = np.arange(1, n_terms + 1, dtype=np.int64)
    return TrigPolynomial(m * m, np.ones(n_terms, dtype=np.complex128))


def _check_shift(ell: float) -> float:
    ell = float(ell)
    if not 0.0 < ell < 1.0:
        raise InvalidArgumentError(f"Increment scale must lie in (0, 1), got {ell}")
    return ell


def increment_coefficients(base: TrigPolynomial, ell: float) -> TrigPolynomial:
    """
    Symmetric increment f(x + l/2) - f(x - l/2)

    Each coefficient is multiplied by 2i sin(pi k l). Its L^p norms equal
    those of f(x + l) - f(x).

    Args:
        base: Polynomial with nonnegative-frequency support
        ell: Increment scale in (0, 1)

    Returns:
        The increment polynomial; modes where the sine vanishes exactly are dropped
    """
    ell = _check_shift(ell)
    if not base.has_nonnegative_support():
        raise InvalidArgumentError("Increment needs a polynomial with nonnegative-frequency support")
    factor = 2j * sin_pi(base.frequencies.astype(np.float64) * ell)
    return TrigPolynomial(base.frequencies, base.coefficients * factor)


def one_sided_increment_coefficients(base: TrigPolynomial, ell: float) -> TrigPolynomial:
    """One-sided increment f(x + l) - f(x), kept to cross-check the symmetric form"""
    ell = _check_shift(ell)
    return base.translated(ell) - base


def trajectory_coefficients(k_max: int) -> TrigPolynomial:
    """
    Periodic part P of the corner trajectory phi(t) = 2 pi i t + P(t)

    P(t) = pi^2/3 - 2 sum 1/k^2 + 2 sum e^{2 pi i k^2 t}/k^2 over k^2 <= K_max.
    """
    k_max = _require_positive_int(k_max, "K_max")
    k = np.arange(1, math.isqrt(k_max) + 1, dtype=np.int64)
    weights = 2.0 / (k * k).astype(np.float64)
    mean = math.pi ** 2 / 3.0 - math.fsum(weights.tolist())
    return TrigPolynomial(
        np.concatenate(([0], k * k)),
        np.concatenate(([mean], weights)).astype(np.complex128),
    )


def phi_tail_bound(k_max: int) -> float:
    """Sup-norm tail of phi beyond the truncation: 2 sum_{k > sqrt(K_max)} 1/k^2 <= 2/floor(sqrt(K_max))"""
    k_max = _require_positive_int(k_max, "K_max")
    return 2.0 * zeta_tail(2.0, math.isqrt(k_max) + 1)


def phi_samples(t_grid: Iterable[float], k_max: int) -> np.ndarray:
    """
    Corner trajectory phi(t) = 2 pi i t + 2 sum_{k^2 <= K_max} (e^{2 pi i k^2 t} - 1)/k^2 + pi^2/3

    Args:
        t_grid: Times in [0, 1]
        k_max: Frequency cutoff, K_max >= 1

    Returns:
        Complex samples of phi; empty input gives empty output
    """
    k_max = _require_positive_int(k_max, "K_max")
    t = np.asarray(list(t_grid), dtype=np.float64)
    if t.size == 0:
        return np.zeros(0, dtype=np.complex128)

    k = np.arange(1, math.isqrt(k_max) + 1, dtype=np.int64)
    squares = (k * k).astype(np.float64)
    weights = 2.0 / squares
    out = np.empty(t.size, dtype=np.complex128)

    rows = max(1, _EVAL_BLOCK // k.size)
    for start in range(0, t.size, rows):
        block = t[start:start + rows]
        r = np.remainder(np.outer(block, squares), 1.0)
        # e^{2 pi i r} - 1 written so that r = 0 gives an exact zero
        s = sin_pi(r)
        term_re = -2.0 * s * s
        term_im = sin_pi(2.0 * r)
        out[start:start + rows] = (term_re @ weights) + 1j * (term_im @ weights)

    return out + (math.pi ** 2 / 3.0) + 2j * math.pi * t
