"""Bit-wise cross entropy between the padded target word and output LLRs.

Output LLRs map to bit-1 probabilities through ``p = sigmoid(-L)``, consistent with
the hard decision ``u = 1 iff L <= 0``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from apps.bp.decoder import Real
from apps.core.exceptions import InvalidArgumentError

PROB_EPS = 1e-12


def _check(target, soft_out) -> tuple[Real, Real]:
    u = np.asarray(target, dtype=np.float64)
    L = np.asarray(soft_out, dtype=np.float64)
    if u.shape != L.shape:
        raise InvalidArgumentError(f"target shape {u.shape} != soft output shape {L.shape}")
    return u, L


def bit_one_probability(soft_out) -> Real:
    return expit(-np.asarray(soft_out, dtype=np.float64))


def bce_loss(target, soft_out) -> float:
    """Mean over bits (and over frames for a batch)."""
    u, L = _check(target, soft_out)
    p = np.clip(bit_one_probability(L), PROB_EPS, 1.0 - PROB_EPS)
    return float(-np.mean(u * np.log(p) + (1.0 - u) * np.log1p(-p)))


def bce_loss_grad(target, soft_out) -> Real:
    """d bce_loss / d soft_out; zero where the probability clamp is active."""
    u, L = _check(target, soft_out)
    p = bit_one_probability(L)
    active = (p > PROB_EPS) & (p < 1.0 - PROB_EPS)
    return np.where(active, u - p, 0.0) / u.size
