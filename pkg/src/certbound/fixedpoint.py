"""Fixed-point values a/p with integer numerators and directed rounding.

Every certified quantity is an integer numerator over a shared scale p.
Averages are rounded toward the side that keeps the certified inequality
conservative: up for edit-distance upper bounds, down for LCS lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numba as nb
import numpy as np

from .errors import FixedPointOverflowError, InvalidInputError

I64_MIN = -(1 << 63)
I64_MAX = (1 << 63) - 1

DEFAULT_P = 100_000
DEFAULT_EPS_NUM = 5


@dataclass(frozen=True)
class FxScale:
    p: int = DEFAULT_P
    eps_num: int = DEFAULT_EPS_NUM

    def __post_init__(self):
        if self.p < 1:
            raise InvalidInputError(f"scale p must be positive, got {self.p}")
        if self.eps_num < 0:
            raise InvalidInputError(f"eps numerator must be >= 0, got {self.eps_num}")


@dataclass(frozen=True, eq=False)
class FxVector:
    scale: FxScale
    values: np.ndarray

    def __post_init__(self):
        if self.values.dtype != np.int64 or self.values.ndim != 1:
            raise InvalidInputError("FxVector values must be a 1-d int64 array")

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FxVector):
            return NotImplemented
        return self.scale == other.scale and np.array_equal(self.values, other.values)

    @classmethod
    def zeros(cls, size: int, scale: FxScale) -> "FxVector":
        return cls(scale, np.zeros(size, dtype=np.int64))

    def as_floats(self) -> np.ndarray:
        """Lossy view for display only."""
        return self.values / self.scale.p


def _checked(total: int) -> int:
    if not I64_MIN <= total <= I64_MAX:
        raise FixedPointOverflowError(f"aggregate {total} leaves the signed 64-bit range")
    return total


def avg_round_up(numerators: Iterable[int], divisor: int) -> int:
    """ceil(sum(numerators) / divisor)."""
    if divisor < 1:
        raise InvalidInputError("divisor must be positive")
    total = _checked(sum(int(a) for a in numerators))
    return -((-total) // divisor)


def avg_round_down(numerators: Iterable[int], divisor: int) -> int:
    """floor(sum(numerators) / divisor), rounding toward minus infinity."""
    if divisor < 1:
        raise InvalidInputError("divisor must be positive")
    total = _checked(sum(int(a) for a in numerators))
    return total // divisor


def shift(vec: FxVector, r_num: int) -> FxVector:
    values = vec.values
    if values.size:
        lo, hi = int(values.min()) + r_num, int(values.max()) + r_num
        _checked(lo), _checked(hi)
    return FxVector(vec.scale, values + np.int64(r_num))


def check_headroom(values: np.ndarray, terms: int, extra: int = 0) -> None:
    """Refuse to run a kernel whose sums of ``terms`` entries could overflow int64."""
    if not values.size:
        return
    worst = max(abs(int(values.min())), abs(int(values.max()))) + abs(extra)
    if worst * terms > I64_MAX:
        raise FixedPointOverflowError(
            f"values up to {worst} summed over {terms} terms would overflow int64"
        )


@nb.njit(inline="always")
def ceil_div(a, b):
    return -((-a) // b)


@nb.njit(inline="always")
def floor_div(a, b):
    return a // b
