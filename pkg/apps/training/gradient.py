"""Reverse-mode gradient of the BCE loss with respect to the WBP weights.

The forward decode records every layer update (inputs, box-plus values and
pre-clip values). The backward sweep walks those records in reverse order and
keeps adjoints for both message tensors. A clipped output passes no gradient.
"""

from __future__ import annotations

import logging

import numpy as np

from apps.bp.decoder import (
    LEFT_BOTTOM,
    LEFT_TOP,
    LLR_MAX,
    RIGHT_EVEN,
    RIGHT_ODD,
    BoxPlusMode,
    DecodeTrace,
    Real,
    UpdateRecord,
    WbpWeights,
    box_plus_partials,
)
from apps.bp import decoder as bp
from apps.core.exceptions import ContractViolationError, InvalidArgumentError
from apps.polar.code import ButterflyWiring, PolarCode

from .loss import bce_loss, bce_loss_grad
from .types import stack_frames

logger = logging.getLogger(__name__)


def _unclipped(pre: Real) -> Real:
    return (np.abs(pre) <= LLR_MAX).astype(np.float64)


def _left_backward(rec: UpdateRecord, gamma: Real, grad: Real, dL: Real, dR: Real, w: ButterflyWiring, mode):
    layer = rec.layer
    g_top = dL[:, layer, w.top] * _unclipped(rec.pre_first)
    g_bottom = dL[:, layer, w.bottom] * _unclipped(rec.pre_second)
    dL[:, layer] = 0.0
    grad[LEFT_TOP] += np.sum(g_top * rec.f_first)
    grad[LEFT_BOTTOM] += np.sum(g_bottom * rec.f_second)

    # L_top = gamma0 * f(even, odd + bottom)
    d_even, d_rest = box_plus_partials(rec.even, rec.odd + rec.bottom, mode)
    g = g_top * gamma[LEFT_TOP]
    dL[:, layer + 1, w.even] += g * d_even
    dL[:, layer + 1, w.odd] += g * d_rest
    dR[:, layer, w.bottom] += g * d_rest

    # L_bottom = gamma1 * f(top, even) + odd
    d_top, d_even = box_plus_partials(rec.top, rec.even, mode)
    g = g_bottom * gamma[LEFT_BOTTOM]
    dR[:, layer, w.top] += g * d_top
    dL[:, layer + 1, w.even] += g * d_even
    dL[:, layer + 1, w.odd] += g_bottom


def _right_backward(rec: UpdateRecord, gamma: Real, grad: Real, dL: Real, dR: Real, w: ButterflyWiring, mode):
    layer = rec.layer
    g_even = dR[:, layer + 1, w.even] * _unclipped(rec.pre_first)
    g_odd = dR[:, layer + 1, w.odd] * _unclipped(rec.pre_second)
    dR[:, layer + 1] = 0.0
    grad[RIGHT_EVEN] += np.sum(g_even * rec.f_first)
    grad[RIGHT_ODD] += np.sum(g_odd * rec.f_second)

    # R_even = gamma2 * f(top, odd + bottom)
    d_top, d_rest = box_plus_partials(rec.top, rec.odd + rec.bottom, mode)
    g = g_even * gamma[RIGHT_EVEN]
    dR[:, layer, w.top] += g * d_top
    dL[:, layer + 1, w.odd] += g * d_rest
    dR[:, layer, w.bottom] += g * d_rest

    # R_odd = gamma3 * f(top, even) + bottom
    d_top, d_even = box_plus_partials(rec.top, rec.even, mode)
    g = g_odd * gamma[RIGHT_ODD]
    dR[:, layer, w.top] += g * d_top
    dL[:, layer + 1, w.even] += g * d_even
    dR[:, layer, w.bottom] += g_odd


def backpropagate(trace: DecodeTrace, targets, weights: WbpWeights, code: PolarCode) -> Real:
    """Gradient of ``bce_loss(targets, trace.soft_output)`` with respect to ``weights.gamma``."""
    if not trace.recorded:
        raise ContractViolationError("backward pass needs a decode run with record_trace=True")
    if len(trace.iterations) != weights.iterations:
        raise ContractViolationError(
            f"trace has {len(trace.iterations)} iterations but weights have {weights.iterations}"
        )
    soft = np.atleast_2d(trace.soft_output)
    frames = soft.shape[0]
    shape = (frames, code.n_stages + 1, code.block_len)
    dL = np.zeros(shape)
    dR = np.zeros(shape)
    dL[:, 0] = bce_loss_grad(np.atleast_2d(targets), soft)

    grad = np.zeros_like(weights.gamma)
    wiring = code.wiring
    for t in reversed(range(weights.iterations)):
        for rec in reversed(trace.iterations[t]):
            step = _left_backward if rec.side == "left" else _right_backward
            step(rec, weights.gamma[t, rec.layer], grad[t, rec.layer], dL, dR, wiring, trace.mode)
    return grad


def loss_and_gradient(
    llrs,
    targets,
    code: PolarCode,
    iterations: int,
    weights: WbpWeights,
    mode: BoxPlusMode | str = BoxPlusMode.EXACT,
) -> tuple[float, Real]:
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    targets = np.atleast_2d(targets)
    if llrs.shape != targets.shape:
        raise InvalidArgumentError(f"LLR batch {llrs.shape} and target batch {targets.shape} differ")
    trace = bp.wbp_decode(llrs, code, iterations, weights, record_trace=True, mode=mode)
    return bce_loss(targets, trace.soft_output), backpropagate(trace, targets, weights, code)


def wbp_gradient(
    frames,
    code: PolarCode,
    iterations: int,
    weights: WbpWeights,
    mode: BoxPlusMode | str = BoxPlusMode.EXACT,
) -> Real:
    """dLoss/dgamma for one labeled frame or the batch mean over a list of them."""
    llrs, targets = stack_frames(frames)
    _, grad = loss_and_gradient(llrs, targets, code, iterations, weights, mode)
    return grad
