"""
Spectral Engine - Grid synthesis, frequency filters and Littlewood-Paley blocks
Turns trigonometric polynomials into periodic grid samples through the inverse FFT
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from scipy import fft

from riemannflat.core.errors import AliasingError, InvalidArgumentError
from riemannflat.core.series_core import TrigPolynomial
from riemannflat.utils.precision import is_power_of_two

logger = logging.getLogger(__name__)

Bound = Union[int, float]


@dataclass(frozen=True, eq=False)
class GridSignal:
    """Complex samples of a function at x_j = j/M, j = 0..M-1"""
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.complex128).ravel()
        if not is_power_of_two(samples.size) or samples.size < 2:
            raise InvalidArgumentError(f"Grid size must be a power of two >= 2, got {samples.size}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def grid_size(self) -> int:
        return int(self.samples.size)

    @property
    def points(self) -> np.ndarray:
        """Grid abscissae j/M"""
        return np.arange(self.grid_size, dtype=np.float64) / self.grid_size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSignal):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    def __hash__(self) -> int:
        return hash(self.samples.tobytes())


@dataclass(frozen=True)
class BandSpec:
    """
    A range of frequency moduli |n|

    Bounds may be real so that Littlewood-Paley edges A^j need no rounding.
    """
    lo: Bound = 0
    hi: Bound = math.inf
    lo_inclusive: bool = True
    hi_inclusive: bool = False

    def __post_init__(self):
        if self.lo < 0:
            raise InvalidArgumentError(f"Band lower edge must be >= 0, got {self.lo}")
        if self.hi < self.lo:
            raise InvalidArgumentError(f"Band edges out of order: {self.lo} > {self.hi}")
        if self.hi == self.lo and not (self.lo_inclusive and self.hi_inclusive):
            raise InvalidArgumentError(f"Band [{self.lo}, {self.hi}] is empty")
        if math.isinf(self.hi) and self.hi_inclusive:
            object.__setattr__(self, "hi_inclusive", False)

    @classmethod
    def high_pass(cls, cutoff: int, inclusive: bool = True) -> "BandSpec":
        """|n| >= N (inclusive) or |n| > N"""
        return cls(lo=cutoff, lo_inclusive=inclusive)

    @classmethod
    def low_pass(cls, cutoff: int, inclusive: bool = False) -> "BandSpec":
        """|n| < N, or |n| <= N when inclusive"""
        return cls(lo=0, hi=cutoff, hi_inclusive=inclusive)

    @classmethod
    def between(cls, lo: Bound, hi: Bound) -> "BandSpec":
        """Half-open range lo <= |n| < hi"""
        return cls(lo=lo, hi=hi)

    def contains(self, frequencies: np.ndarray) -> np.ndarray:
        """Boolean mask of the frequencies whose modulus lies in the band"""
        moduli = np.abs(np.asarray(frequencies, dtype=np.int64)).astype(np.float64)
        above = moduli >= self.lo if self.lo_inclusive else moduli > self.lo
        below = moduli <= self.hi if self.hi_inclusive else moduli < self.hi
        return above & below

    def describe(self) -> str:
        left = "[" if self.lo_inclusive else "("
        right = "]" if self.hi_inclusive else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class BlockPlan:
    """
    Littlewood-Paley partition of the frequency moduli with base A

    Block 0 is [0, A) and block j >= 1 is [A^j, A^{j+1}); blocks stop at the
    first one whose upper edge exceeds max_freq. The zero mode sits in block 0
    so that the blocks always sum back to the input.
    """
    base: float
    blocks: List[BandSpec]

    @classmethod
    def for_max_freq(cls, base: float, max_freq: int) -> "BlockPlan":
        base = float(base)
        if not base > 1.0 or math.isinf(base):
            raise InvalidArgumentError(f"Littlewood-Paley base must be a finite real > 1, got {base}")

        blocks = [BandSpec.between(0, base)]
        lo = base
        j = 1
        while lo <= max_freq:
            hi = base ** (j + 1)
            blocks.append(BandSpec.between(lo, hi))
            lo = hi
            j += 1
        return cls(base=base, blocks=blocks)

    @property
    def edges(self) -> np.ndarray:
        """Lower edges of every block followed by the final upper edge"""
        return np.array([b.lo for b in self.blocks] + [self.blocks[-1].hi], dtype=np.float64)

    def block_index(self, frequencies: np.ndarray) -> np.ndarray:
        """Index of the block holding each frequency modulus"""
        moduli = np.abs(np.asarray(frequencies, dtype=np.int64)).astype(np.float64)
        return np.searchsorted(self.edges, moduli, side="right") - 1


def synthesize(poly: TrigPolynomial, grid_size: int) -> GridSignal:
    """
    Samples of poly at x_j = j/M through a single inverse FFT

    Args:
        poly: Polynomial to synthesize
        grid_size: M, a power of two with M > 2 * max_freq

    Returns:
        GridSignal with samples[j] = sum_n c_n e^{2 pi i n j / M}
    """
    grid_size = int(grid_size)
    if not is_power_of_two(grid_size) or grid_size < 2:
        raise InvalidArgumentError(f"Grid size must be a power of two >= 2, got {grid_size}")
    if grid_size <= 2 * poly.max_freq:
        raise AliasingError(
            f"Grid size {grid_size} aliases a polynomial with max_freq {poly.max_freq}; "
            f"need M > {2 * poly.max_freq}"
        )

    spectrum = np.zeros(grid_size, dtype=np.complex128)
    # Bins are distinct because M > 2 * max_freq
    spectrum[np.remainder(poly.frequencies, grid_size)] = poly.coefficients
    samples = fft.ifft(spectrum, norm="forward")
    logger.debug(f"Synthesized {poly.support_size} modes on M={grid_size}")
    return GridSignal(samples)


def band_filter(poly: TrigPolynomial, band: BandSpec) -> TrigPolynomial:
    """Keep exactly the coefficients whose |n| lies in band"""
    return poly.restricted(band.contains(poly.frequencies))


def littlewood_paley_blocks(poly: TrigPolynomial, base: float = 2.0) -> List[TrigPolynomial]:
    """
    Split poly into Littlewood-Paley blocks Delta_j

    Args:
        poly: Polynomial with nonnegative-frequency support
        base: A > 1

    Returns:
        One polynomial per block of BlockPlan.for_max_freq(base, poly.max_freq),
        possibly empty; their sum is poly coefficient by coefficient
    """
    plan = BlockPlan.for_max_freq(base, poly.max_freq)
    if not poly.has_nonnegative_support():
        raise InvalidArgumentError("Littlewood-Paley blocks need nonnegative-frequency support")

    index = plan.block_index(poly.frequencies)
    blocks = [poly.restricted(index == j) for j in range(len(plan.blocks))]
    logger.debug(
        f"Littlewood-Paley split with A={plan.base:g}: "
        f"{len(blocks)} blocks, sizes {[b.support_size for b in blocks]}"
    )
    return blocks


def circular_shift(signal: GridSignal, m: int) -> GridSignal:
    """samples'[j] = samples[(j + m) mod M], i.e. x -> x + m/M exactly"""
    return GridSignal(np.roll(signal.samples, -int(m)))


def littlewood_paley_square_function(
    poly: TrigPolynomial,
    base: float = 2.0,
    grid_size: Optional[int] = None,
) -> GridSignal:
    """
    Samples of (sum_j |Delta_j f|^2)^{1/2} on a grid

    The grid defaults to the smallest power of two that synthesizes poly.
    """
    if grid_size is None:
        grid_size = max(2, 1 << (2 * poly.max_freq).bit_length())
    total = np.zeros(int(grid_size), dtype=np.float64)
    for block in littlewood_paley_blocks(poly, base):
        if block.is_empty():
            continue
        samples = synthesize(block, grid_size).samples
        total += samples.real ** 2 + samples.imag ** 2
    return GridSignal(np.sqrt(total))
