"""Polar code construction, zero-padding and encoding.

The encoder is built from the same butterfly wiring the BP decoder sweeps, so the
frozen set lives in the decoder's stage-1 index space. Each layer maps left nodes
``j`` and ``j + N/2`` onto right nodes ``2j`` and ``2j + 1``; ``n_c`` identical
layers implement ``F^{(x)n_c}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from apps.core.bits import Bits, as_bits
from apps.core.exceptions import InvalidArgumentError


@dataclass(frozen=True)
class ButterflyWiring:
    block_len: int

    @property
    def half(self) -> int:
        return self.block_len // 2

    @property
    def top(self) -> slice:
        """Left nodes ``j`` (j < N/2)."""
        return slice(0, self.half)

    @property
    def bottom(self) -> slice:
        """Left nodes ``j + N/2``."""
        return slice(self.half, self.block_len)

    @property
    def even(self) -> slice:
        """Right nodes ``2j``."""
        return slice(0, self.block_len, 2)

    @property
    def odd(self) -> slice:
        """Right nodes ``2j + 1``."""
        return slice(1, self.block_len, 2)

    def forward(self, left: Bits) -> Bits:
        """One XOR layer, left to right, over the trailing axis."""
        right = np.empty_like(left)
        right[..., self.even] = left[..., self.top] ^ left[..., self.bottom]
        right[..., self.odd] = left[..., self.bottom]
        return right


@dataclass(frozen=True, eq=False)
class PolarCode:
    block_len: int
    info_len: int
    design_param: float
    reliable_positions: tuple[int, ...]
    frozen_mask: npt.NDArray[np.bool_] = field(repr=False)

    @property
    def n_stages(self) -> int:
        return self.block_len.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.info_len / self.block_len

    @property
    def frozen_positions(self) -> list[int]:
        return np.flatnonzero(self.frozen_mask).tolist()

    @property
    def wiring(self) -> ButterflyWiring:
        return ButterflyWiring(self.block_len)

    @property
    def label(self) -> str:
        return f"({self.block_len},{self.info_len})"

    def __eq__(self, other):
        if not isinstance(other, PolarCode):
            return NotImplemented
        return (self.block_len, self.info_len, self.design_param, self.reliable_positions) == (
            other.block_len,
            other.info_len,
            other.design_param,
            other.reliable_positions,
        )

    def __hash__(self):
        return hash((self.block_len, self.info_len, self.design_param))


def bhattacharyya(block_len: int, design_param: float = 0.5) -> npt.NDArray[np.float64]:
    """Final Bhattacharyya parameters after ``log2(N)`` levels of ``z -> (2z - z^2, z^2)``."""
    z = np.array([design_param], dtype=np.float64)
    for _ in range(block_len.bit_length() - 1):
        split = np.empty(2 * z.size)
        split[0::2] = 2 * z - z * z
        split[1::2] = z * z
        z = split
    return z


def construct(block_len: int, info_len: int, design_param: float = 0.5) -> PolarCode:
    if block_len < 2 or block_len & (block_len - 1):
        raise InvalidArgumentError(f"block length must be a power of two >= 2, got {block_len}")
    if not 0 < info_len <= block_len:
        raise InvalidArgumentError(f"need 0 < N_u <= N_c, got N_u={info_len}")
    if not 0.0 < design_param < 1.0:
        raise InvalidArgumentError(f"design parameter must lie in (0, 1), got {design_param}")
    z = bhattacharyya(block_len, design_param)
    # Stable sort: equal z keeps the lower index first.
    reliable = np.sort(np.argsort(z, kind="stable")[:info_len])
    frozen = np.ones(block_len, dtype=bool)
    frozen[reliable] = False
    frozen.setflags(write=False)
    return PolarCode(
        block_len=block_len,
        info_len=info_len,
        design_param=float(design_param),
        reliable_positions=tuple(int(i) for i in reliable),
        frozen_mask=frozen,
    )


def expand(u, code: PolarCode) -> Bits:
    """Scatter the N_u bits into the reliable positions; frozen positions stay 0."""
    word = as_bits(u, code.info_len, name="u")
    padded = np.zeros(word.shape[:-1] + (code.block_len,), dtype=np.uint8)
    padded[..., list(code.reliable_positions)] = word
    return padded


def extract(u_p_hat, code: PolarCode) -> Bits:
    word = as_bits(u_p_hat, code.block_len, name="u_p_hat")
    return word[..., list(code.reliable_positions)]


def polar_encode(u_p, code: PolarCode) -> Bits:
    word = as_bits(u_p, code.block_len, name="u_p")
    return butterfly_transform(word, code.wiring)


def butterfly_transform(word: Bits, wiring: ButterflyWiring) -> Bits:
    """``n_c`` XOR layers; the transform is its own inverse over GF(2)."""
    out = np.asarray(word, dtype=np.uint8)
    for _ in range(wiring.block_len.bit_length() - 1):
        out = wiring.forward(out)
    return out
