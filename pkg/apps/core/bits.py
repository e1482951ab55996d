from __future__ import annotations

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidArgumentError

Bits = npt.NDArray[np.uint8]


def as_bits(values, length: int | None = None, name: str = "bits") -> Bits:
    """Coerce a sequence of 0/1 values to a uint8 array, checking the trailing length."""
    arr = np.asarray(values)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidArgumentError(f"{name} must contain only 0/1 values")
    arr = arr.astype(np.uint8)
    if length is not None and arr.shape[-1:] != (length,):
        got = arr.shape[-1] if arr.ndim else 0
        raise InvalidArgumentError(f"{name} must have length {length}, got {got}")
    return arr


def int_to_bits(value: int, width: int) -> Bits:
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


def format_bits(bits) -> str:
    return "".join(str(int(b)) for b in np.asarray(bits).ravel())
