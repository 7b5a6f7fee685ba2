"""
Scale parsing - dyadic ranges, explicit lists and arithmetic ranges from CLI text
"""

import math
import re
from typing import List

import numpy as np

_POWER_TOKEN = re.compile(r"^\s*2\s*\^\s*(-?\d+)\s*$")


def parse_number(token: str) -> float:
    """A real number, or a power of two written 2^k"""
    match = _POWER_TOKEN.match(token)
    if match:
        return 2.0 ** int(match.group(1))
    try:
        return float(token)
    except ValueError:
        raise ValueError(f"Not a number: {token!r}") from None


def parse_dyadic(text: str) -> List[float]:
    """
    Expand "a:b" to the powers of two in [a, b]

    Bounds may be numbers or 2^k tokens, e.g. "16:4096" or "2^-16:2^-6".
    """
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"Dyadic range must look like a:b, got {text!r}")
    lo, hi = (parse_number(p) for p in parts)
    if not 0 < lo <= hi:
        raise ValueError(f"Dyadic range needs 0 < a <= b, got {text!r}")

    k_lo = math.ceil(math.log2(lo) - 1e-12)
    k_hi = math.floor(math.log2(hi) + 1e-12)
    values = [2.0 ** k for k in range(k_lo, k_hi + 1)]
    if not values:
        raise ValueError(f"Dyadic range {text!r} holds no power of two")
    return values


def parse_list(text: str) -> List[float]:
    """Comma-separated numbers; a single a:b token is read as a dyadic range"""
    text = text.strip()
    if not text:
        raise ValueError("Empty scale list")
    if ":" in text and "," not in text:
        return parse_dyadic(text)
    return [parse_number(t) for t in text.split(",") if t.strip()]


def parse_range(text: str) -> List[float]:
    """
    "a:b:step" as an inclusive arithmetic progression, or a comma list

    Points are a + i * step so that a and b are hit exactly.
    """
    parts = text.split(":")
    if len(parts) == 1:
        return parse_list(text)
    if len(parts) != 3:
        raise ValueError(f"Range must look like a:b:step, got {text!r}")
    lo, hi, step = (parse_number(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"Range needs a <= b and step > 0, got {text!r}")
    count = int(round((hi - lo) / step)) + 1
    return [float(v) for v in np.linspace(lo, lo + (count - 1) * step, count)]
