"""Remainder-based region indexing used for gating fallback and dataset splits.

Regions are numbered 1..alpha. The zero remainder means the CRC check passed and
belongs to no region.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from apps.core.exceptions import ContractViolationError, InvalidArgumentError


class PartitionKind(str, enum.Enum):
    MSB = "msb"
    UNIFORM = "uniform"
    BITS_SUM = "bits-sum"
    BITS_SUM_MOD = "bits-sum-mod"


@dataclass(frozen=True)
class PartitionStrategy:
    kind: PartitionKind
    alpha: int

    def __post_init__(self):
        object.__setattr__(self, "kind", PartitionKind(self.kind))
        if self.alpha <= 0:
            raise InvalidArgumentError(f"alpha must be positive, got {self.alpha}")
        if self.kind is PartitionKind.MSB and self.alpha & (self.alpha - 1):
            raise InvalidArgumentError(f"MSB partition needs a power-of-two alpha, got {self.alpha}")

    @property
    def msb_count(self) -> int:
        return self.alpha.bit_length() - 1

    def check_parity_len(self, parity_len: int) -> None:
        if self.kind is PartitionKind.MSB and self.msb_count > parity_len:
            raise InvalidArgumentError(
                f"log2(alpha)={self.msb_count} exceeds the {parity_len} remainder bits"
            )


def region_indices(remainders, strategy: PartitionStrategy) -> npt.NDArray[np.int64]:
    """Vectorised :func:`region_index` over a ``(frames, P)`` batch of remainders."""
    rem = np.atleast_2d(np.asarray(remainders, dtype=np.int64))
    p = rem.shape[1]
    strategy.check_parity_len(p)
    if not rem.any(axis=1).all():
        raise ContractViolationError("the zero remainder is a CRC success and has no region")
    alpha = strategy.alpha
    kind = strategy.kind
    if kind is PartitionKind.MSB:
        k = strategy.msb_count
        return 1 + rem[:, :k] @ (1 << np.arange(k, dtype=np.int64))
    if kind is PartitionKind.UNIFORM:
        value = rem @ (1 << np.arange(p - 1, -1, -1, dtype=np.int64))
        return 1 + (value - 1) * alpha // ((1 << p) - 1)
    weight = rem.sum(axis=1)
    if kind is PartitionKind.BITS_SUM:
        return 1 + np.minimum(alpha - 1, (weight - 1) * alpha // p)
    return 1 + weight % alpha


def region_index(r, strategy: PartitionStrategy) -> int:
    rem = np.asarray(r)
    if rem.ndim != 1:
        raise InvalidArgumentError("region_index takes a single remainder; use region_indices")
    return int(region_indices(rem, strategy)[0])
