"""End-to-end frame synthesis: message -> CRC -> polar -> BPSK -> AWGN -> LLR."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from apps.core.bits import Bits
from apps.crc.codec import CRC11_POLY, CrcSpec, crc_encode
from apps.polar.code import PolarCode, construct, expand, polar_encode

from .awgn import Real, frame_rng, llr, modulate, sigma_from_ebn0


class RateMode(str, enum.Enum):
    """Which rate normalises E_b/N_0: the polar rate N_u/N_c or the message rate N_m/N_c."""

    CODE = "code"
    MESSAGE = "message"


def link_rate(code: PolarCode, crc: CrcSpec, mode: RateMode | str = RateMode.CODE) -> float:
    if RateMode(mode) is RateMode.MESSAGE:
        return crc.message_len / code.block_len
    return code.info_len / code.block_len


@dataclass
class FrameBatch:
    messages: Bits
    padded: Bits
    llrs: Real
    ebn0_db: float
    first_index: int

    def __len__(self) -> int:
        return self.llrs.shape[0]


def transmit_frames(
    code: PolarCode,
    crc: CrcSpec,
    ebn0_db: float,
    seed: int,
    stream: int,
    start: int,
    stop: int,
    *,
    zero_codeword: bool = False,
    rate_mode: RateMode | str = RateMode.CODE,
) -> FrameBatch:
    """Frames ``start .. stop-1`` of one stream; each frame is a pure function of its index."""
    count = max(0, stop - start)
    sigma = sigma_from_ebn0(ebn0_db, link_rate(code, crc, rate_mode))
    messages = np.zeros((count, crc.message_len), dtype=np.uint8)
    noise = np.empty((count, code.block_len))
    for row, index in enumerate(range(start, stop)):
        rng = frame_rng(seed, index, stream, ebn0_db)
        if not zero_codeword:
            messages[row] = rng.integers(0, 2, crc.message_len, dtype=np.uint8)
        noise[row] = rng.standard_normal(code.block_len)
    padded = expand(crc_encode(messages, crc), code)
    x = modulate(polar_encode(padded, code))
    return FrameBatch(
        messages=messages,
        padded=padded,
        llrs=llr(x + sigma * noise, sigma),
        ebn0_db=ebn0_db,
        first_index=start,
    )


def build_link(block_len: int, info_len: int, generator_poly=CRC11_POLY, design_param: float = 0.5):
    """Polar code plus the CRC whose codeword fills its N_u information bits."""
    code = construct(block_len, info_len, design_param)
    crc = CrcSpec.for_codeword(info_len, tuple(int(b) for b in generator_poly))
    return code, crc
