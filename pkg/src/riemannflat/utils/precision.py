"""
Precision helpers - compensated sums, series tails and power-of-two arithmetic
"""

import math
from typing import Iterable, Union

import numpy as np
from scipy import special


def compensated_sum(values: Union[np.ndarray, Iterable[float]]) -> float:
    """
    Correctly rounded sum of real values (Shewchuk expansion via math.fsum)

    Args:
        values: Real values in a fixed order

    Returns:
        The sum rounded once
    """
    array = np.asarray(values, dtype=np.float64).ravel()
    return math.fsum(array.tolist())


def zeta_tail(s: float, start: int) -> float:
    """
    Tail sum over n >= start of n^(-s), through the Hurwitz zeta function

    Args:
        s: Exponent, s > 1
        start: First index of the tail, start >= 1

    Returns:
        The value of the tail
    """
    return float(special.zeta(s, start))


def is_power_of_two(value: int) -> bool:
    """Check whether an integer is a positive power of two"""
    return value > 0 and (value & (value - 1)) == 0


def next_power_of_two(value: int) -> int:
    """Smallest power of two greater than or equal to value (at least 1)"""
    if value <= 1:
        return 1
    return 1 << (int(value) - 1).bit_length()


def sin_pi(x: np.ndarray) -> np.ndarray:
    """
    sin(pi * x) with exact zeros at integers

    The argument is folded into [-1/2, 1/2] before the sine is taken, so
    integer arguments give exactly 0 and half-integers exactly +-1.
    """
    r = np.remainder(np.asarray(x, dtype=np.float64), 2.0)
    r = np.where(r > 1.0, r - 2.0, r)
    r = np.where(r > 0.5, 1.0 - r, r)
    r = np.where(r < -0.5, -1.0 - r, r)
    return np.sin(np.pi * r)
