"""BPSK over AWGN: modulation, noise, LLRs and E_b/N_0 bookkeeping.

Noise is counter-based: every frame draws from its own Philox stream keyed by the
master seed, so a frame's noise depends only on ``(seed, stream, frame index)``
and never on how frames are split across workers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from apps.core.exceptions import InvalidArgumentError

Real = npt.NDArray[np.float64]


class Stream(enum.IntEnum):
    """Independent noise streams drawn from one master seed."""

    TRAIN = 1
    VALIDATION = 2
    EVAL = 3
    HISTOGRAM = 4
    DIVERSITY = 5


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    if not 0.0 < rate <= 1.0:
        raise InvalidArgumentError(f"rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")
        sigma_from_ebn0(self.ebn0_db, self.rate)

    @property
    def sigma(self) -> float:
        return sigma_from_ebn0(self.ebn0_db, self.rate)


def modulate(c) -> Real:
    """0 -> +1, 1 -> -1."""
    bits = np.asarray(c)
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise InvalidArgumentError("modulate expects 0/1 bits")
    return 1.0 - 2.0 * bits.astype(np.float64)


def transmit(x, config: ChannelConfig, rng: np.random.Generator) -> Real:
    x = np.asarray(x, dtype=np.float64)
    return x + config.sigma * rng.standard_normal(x.shape)


def llr(y, sigma: float) -> Real:
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive; use a noiseless decode helper instead")
    return 2.0 * np.asarray(y, dtype=np.float64) / (sigma * sigma)


def snr_key(ebn0_db: float) -> int:
    """32-bit tag for an SNR point (millidecibel resolution)."""
    return int(round((ebn0_db + 1000.0) * 1000.0)) & 0xFFFFFFFF


def frame_rng(seed: int, frame_index: int, stream: int, ebn0_db: float = 0.0) -> np.random.Generator:
    """Generator for one frame; the low 128 counter bits are left for the draws."""
    counter = (((stream << 32) | snr_key(ebn0_db)) << 192) | (frame_index << 128)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))
