"""argparse ``type=`` helpers shared by the management commands."""

from __future__ import annotations

import argparse

import numpy as np

from .bits import int_to_bits


def code_dims(text: str) -> tuple[int, int]:
    """``"64,32"`` -> ``(64, 32)``."""
    try:
        block, info = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N_c,N_u but got {text!r}")
    return block, info


def _float_range(text: str) -> list[float]:
    lo, hi, step = (float(part) for part in text.split(":"))
    if step <= 0:
        raise argparse.ArgumentTypeError("range step must be positive")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 10) for k in range(count)]


def snr_list(text: str) -> list[float]:
    """Accepts ``"1,2,3"`` or an inclusive range ``"1:4:0.5"``."""
    try:
        if ":" in text:
            return _float_range(text)
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse SNR list {text!r}")


def snr_range(text: str) -> list[float]:
    if text.count(":") != 2:
        raise argparse.ArgumentTypeError("expected lo:hi:step")
    return snr_list(text)


def generator_poly(text: str) -> np.ndarray:
    """Hex (``0xE21``) or binary (``111000100001``) coefficient string, x^P first."""
    cleaned = text.strip().lower()
    try:
        if cleaned.startswith("0x"):
            value = int(cleaned, 16)
        else:
            if set(cleaned) - {"0", "1"}:
                raise ValueError(cleaned)
            value = int(cleaned, 2)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse generator polynomial {text!r}")
    if value < 2:
        raise argparse.ArgumentTypeError("generator polynomial must have degree >= 1")
    # Stored x^0 first, see CrcSpec.
    return int_to_bits(value, value.bit_length())[::-1].copy()


def add_code_arguments(parser) -> None:
    parser.add_argument("--code", type=code_dims, default=None, help="N_c,N_u, e.g. 64,32")
    parser.add_argument(
        "--poly",
        type=generator_poly,
        default=None,
        help="CRC generator as hex (0xE21) or binary, x^P coefficient first; default CRC-11",
    )
    parser.add_argument("--design-param", type=float, default=0.5, help="Bhattacharyya design parameter z0")


def add_stop_arguments(parser) -> None:
    parser.add_argument("--snr", type=snr_list, default=None, help="E_b/N_0 points in dB: 1,2,3 or 1:4:0.5")
    parser.add_argument("--snr-range", type=snr_range, default=None, help="Inclusive E_b/N_0 range lo:hi:step")
    parser.add_argument("--min-errors", type=int, default=500, help="Frame errors to collect per SNR point")
    parser.add_argument("--max-frames", type=int, default=10_000_000, help="Frame cap per SNR point")
    parser.add_argument("--seed", type=int, default=None, help="Base seed (default POLAR_DEFAULT_SEED)")
    parser.add_argument("--workers", type=int, default=None, help="Shards per batch (default POLAR_WORKERS)")
    parser.add_argument("--rate-mode", choices=["code", "message"], default="code")
