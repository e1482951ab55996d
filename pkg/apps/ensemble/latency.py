"""Analytic cost model: gate plus one parallel ensemble round on failure.

Costs are counted in weighted node updates. Members run side by side, so they
add one decoder's latency regardless of alpha.
"""

from __future__ import annotations

import math

from apps.core.exceptions import InvalidArgumentError
from apps.polar.code import PolarCode


def single_decoder_latency(block_len: int, iterations: int) -> float:
    """``4 T log2 N_c`` for one (W)BP decode."""
    if block_len < 2 or block_len & (block_len - 1):
        raise InvalidArgumentError(f"block length must be a power of two >= 2, got {block_len}")
    if iterations < 1:
        raise InvalidArgumentError(f"need at least one iteration, got {iterations}")
    return 4.0 * iterations * math.log2(block_len)


def _check_probability(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"gate failure probability must lie in [0, 1], got {p}")
    return float(p)


def estimate_latency(gate_fail_prob: float, code: PolarCode, iterations: int, alpha: int | None = None) -> float:
    """Expected latency ``(1 + p) 4 T log2 N_c``; ``alpha`` does not enter."""
    p = _check_probability(gate_fail_prob)
    return (1.0 + p) * single_decoder_latency(code.block_len, iterations)


def latency_bounds(code: PolarCode, iterations: int) -> tuple[float, float]:
    single = single_decoder_latency(code.block_len, iterations)
    return single, 2.0 * single


def equivalent_wbp_iterations(gate_fail_prob: float, iterations: int) -> float:
    """Iterations a lone WBP decoder could run within the ensemble's expected latency."""
    return (1.0 + _check_probability(gate_fail_prob)) * iterations


def count_weights(code: PolarCode, iterations: int, alpha: int) -> int:
    """Weights of ``alpha`` members plus the unit-weight gate, ``(alpha + 1) 4 T log2 N_c``."""
    if alpha < 0:
        raise InvalidArgumentError(f"alpha must be >= 0, got {alpha}")
    return (alpha + 1) * 4 * iterations * code.n_stages
