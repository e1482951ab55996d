from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from apps.bp.decoder import Real, WbpWeights
from apps.core.exceptions import InvalidArgumentError


@dataclass
class AdamState:
    m: Real
    v: Real
    step: int = 0

    @classmethod
    def zeros_like(cls, weights: WbpWeights) -> "AdamState":
        return cls(np.zeros_like(weights.gamma), np.zeros_like(weights.gamma))


def adam_step(
    weights: WbpWeights,
    grad,
    state: AdamState,
    learning_rate: float = 1e-2,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
) -> tuple[WbpWeights, AdamState]:
    """One bias-corrected Adam update; inputs are left untouched."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != weights.gamma.shape:
        raise InvalidArgumentError(f"gradient shape {grad.shape} != weight shape {weights.gamma.shape}")
    step = state.step + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * (grad * grad)
    m_hat = m / (1.0 - beta1**step)
    v_hat = v / (1.0 - beta2**step)
    gamma = weights.gamma - learning_rate * m_hat / (np.sqrt(v_hat) + epsilon)
    return WbpWeights(gamma), AdamState(m=m, v=v, step=step)
