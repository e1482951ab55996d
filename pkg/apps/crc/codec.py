"""CRC encoding and remainder (syndrome) computation.

Bit vectors are MSB-first: index 0 holds the highest-degree coefficient. The
encoder is systematic, ``u = m || (x^P m(x) mod g(x))``, so a word is valid iff
its remainder modulo ``g`` is zero. Every operation accepts a single word or a
``(frames, length)`` batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from apps.core.bits import Bits, as_bits
from apps.core.exceptions import InvalidArgumentError

# x^11 + x^10 + x^9 + x^5 + 1, coefficients of x^0 .. x^11.
CRC11_POLY: tuple[int, ...] = (1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1)


@dataclass(frozen=True)
class CrcSpec:
    generator_poly: tuple[int, ...]
    message_len: int

    def __post_init__(self):
        poly = tuple(int(b) for b in self.generator_poly)
        object.__setattr__(self, "generator_poly", poly)
        if len(poly) < 2 or set(poly) - {0, 1}:
            raise InvalidArgumentError("generator polynomial must be a bit vector of degree >= 1")
        if poly[0] != 1 or poly[-1] != 1:
            raise InvalidArgumentError("generator polynomial needs both x^0 and x^P terms")
        if self.message_len <= 0:
            raise InvalidArgumentError(f"message length must be positive, got {self.message_len}")

    @classmethod
    def for_codeword(cls, codeword_len: int, generator_poly=CRC11_POLY) -> "CrcSpec":
        parity = len(generator_poly) - 1
        return cls(tuple(generator_poly), codeword_len - parity)

    @classmethod
    def from_hex(cls, poly_hex: str, message_len: int) -> "CrcSpec":
        """Inverse of :attr:`poly_hex`."""
        try:
            value = int(poly_hex, 16)
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"cannot parse generator polynomial {poly_hex!r}")
        return cls(tuple((value >> k) & 1 for k in range(value.bit_length())), message_len)

    @property
    def parity_len(self) -> int:
        return len(self.generator_poly) - 1

    @property
    def codeword_len(self) -> int:
        return self.message_len + self.parity_len

    @property
    def divisor(self) -> Bits:
        """Generator coefficients x^P first, aligned with MSB-first words."""
        return np.array(self.generator_poly[::-1], dtype=np.uint8)

    @property
    def poly_hex(self) -> str:
        value = int("".join(str(b) for b in self.generator_poly[::-1]), 2)
        return hex(value)


def _long_division(rows: Bits, spec: CrcSpec) -> Bits:
    work = rows.copy()
    divisor = spec.divisor
    p = spec.parity_len
    width = work.shape[1]
    for k in range(width - p):
        hit = work[:, k] == 1
        if hit.any():
            work[hit, k : k + p + 1] ^= divisor
    return work[:, width - p :]


def crc_encode(m, spec: CrcSpec) -> Bits:
    """Append the P parity bits of ``x^P m(x) mod g(x)`` to each message."""
    msg = as_bits(m, spec.message_len, name="message")
    rows = np.atleast_2d(msg)
    padded = np.concatenate([rows, np.zeros((rows.shape[0], spec.parity_len), np.uint8)], axis=1)
    parity = _long_division(padded, spec)
    out = np.concatenate([rows, parity], axis=1)
    return out[0] if msg.ndim == 1 else out


def crc_remainder(u_hat, spec: CrcSpec) -> Bits:
    """P-bit remainder of ``u_hat(x) mod g(x)``, MSB first; all-zero iff valid."""
    word = as_bits(u_hat, spec.codeword_len, name="codeword")
    rem = _long_division(np.atleast_2d(word), spec)
    return rem[0] if word.ndim == 1 else rem


def crc_valid(u_hat, spec: CrcSpec):
    rem = crc_remainder(u_hat, spec)
    return ~rem.any(axis=-1)


def crc_message(u_hat, spec: CrcSpec) -> Bits:
    """Systematic part of a CRC codeword."""
    return np.asarray(u_hat)[..., : spec.message_len]
