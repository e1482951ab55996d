"""Weighted belief propagation over the unfolded polar factor graph.

Messages live on ``n_c + 1`` columns of ``N_c`` nodes: column 0 is the padded
word side, column ``n_c`` the channel side. Every iteration runs a right pass
(layers ascending, reading the previous iteration's left messages) and then a left
pass (layers descending). Weights are shared across the nodes of a layer and scale
the box-plus term of each update; every stored message is clipped to
``[-LLR_MAX, LLR_MAX]``. All arrays carry a leading frame axis so a batch of frames
decodes in one sweep.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from apps.core.bits import Bits
from apps.core.exceptions import InvalidArgumentError
from apps.polar.code import PolarCode

logger = logging.getLogger(__name__)

Real = npt.NDArray[np.float64]

LLR_MAX = 30.0

# Weight classes within a layer.
LEFT_TOP, LEFT_BOTTOM, RIGHT_EVEN, RIGHT_ODD = range(4)


class BoxPlusMode(str, enum.Enum):
    EXACT = "exact"
    MIN_SUM = "min_sum"


def box_plus(a, b, mode: BoxPlusMode | str = BoxPlusMode.EXACT):
    """LLR-domain check-node rule ``ln((1 + e^(a+b)) / (e^a + e^b))``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if BoxPlusMode(mode) is BoxPlusMode.MIN_SUM:
        return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    return (
        np.maximum(0.0, a + b)
        - np.maximum(a, b)
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def box_plus_partials(a, b, mode: BoxPlusMode | str = BoxPlusMode.EXACT) -> tuple[Real, Real]:
    """``(df/da, df/db)`` of :func:`box_plus`."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if BoxPlusMode(mode) is BoxPlusMode.MIN_SUM:
        a_smaller = np.abs(a) <= np.abs(b)
        return np.where(a_smaller, np.sign(b), 0.0), np.where(a_smaller, 0.0, np.sign(a))
    total = expit(a + b)
    return total - expit(a - b), total - expit(b - a)


def hard_decision(L_row) -> Bits:
    """Bit 1 wherever the LLR is <= 0."""
    return (np.asarray(L_row) <= 0).astype(np.uint8)


@dataclass
class WbpWeights:
    """Trainable weights, shape ``[T][n_c][4]``; all ones is plain BP."""

    gamma: Real

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=np.float64)
        if self.gamma.ndim != 3 or self.gamma.shape[2] != 4:
            raise InvalidArgumentError(f"weights must have shape (T, n_c, 4), got {self.gamma.shape}")

    @classmethod
    def ones(cls, iterations: int, n_stages: int) -> "WbpWeights":
        return cls(np.ones((iterations, n_stages, 4)))

    @property
    def iterations(self) -> int:
        return self.gamma.shape[0]

    @property
    def n_stages(self) -> int:
        return self.gamma.shape[1]

    @property
    def size(self) -> int:
        return self.gamma.size

    def copy(self) -> "WbpWeights":
        return WbpWeights(self.gamma.copy())

    def is_unit(self) -> bool:
        return bool(np.all(self.gamma == 1.0))


@dataclass
class BpState:
    L: Real
    R: Real
    iteration: int = 0

    @classmethod
    def initial(cls, llrs: Real, code: PolarCode) -> "BpState":
        frames = llrs.shape[0]
        shape = (frames, code.n_stages + 1, code.block_len)
        L = np.zeros(shape)
        R = np.zeros(shape)
        L[:, code.n_stages] = np.clip(llrs, -LLR_MAX, LLR_MAX)
        R[:, 0, code.frozen_mask] = LLR_MAX
        return cls(L=L, R=R)


@dataclass
class UpdateRecord:
    """Inputs and intermediates of one layer update, kept for the backward pass.

    For a right update the outputs are (even, odd) nodes of column ``layer + 1``;
    for a left update they are (top, bottom) nodes of column ``layer``.
    """

    layer: int
    side: str
    top: Real
    bottom: Real
    even: Real
    odd: Real
    f_first: Real
    f_second: Real
    pre_first: Real
    pre_second: Real


@dataclass
class DecodeTrace:
    soft_output: Real
    hard_output: Bits
    iterations: list[list[UpdateRecord]] = field(default_factory=list)
    mode: BoxPlusMode = BoxPlusMode.EXACT

    @property
    def recorded(self) -> bool:
        return bool(self.iterations)


def _right_update(state: BpState, layer: int, gamma: Real, code: PolarCode, mode, record):
    w = code.wiring
    R_in, L_out = state.R[:, layer], state.L[:, layer + 1]
    top, bottom = R_in[:, w.top], R_in[:, w.bottom]
    even, odd = L_out[:, w.even], L_out[:, w.odd]
    f_even = box_plus(top, odd + bottom, mode)
    f_odd = box_plus(top, even, mode)
    pre_even = gamma[RIGHT_EVEN] * f_even
    pre_odd = gamma[RIGHT_ODD] * f_odd + bottom
    R_next = state.R[:, layer + 1]
    R_next[:, w.even] = np.clip(pre_even, -LLR_MAX, LLR_MAX)
    R_next[:, w.odd] = np.clip(pre_odd, -LLR_MAX, LLR_MAX)
    if record is not None:
        record.append(
            UpdateRecord(
                layer, "right", top.copy(), bottom.copy(), even.copy(), odd.copy(),
                f_even, f_odd, pre_even, pre_odd,
            )
        )


def _left_update(state: BpState, layer: int, gamma: Real, code: PolarCode, mode, record):
    w = code.wiring
    R_in, L_in = state.R[:, layer], state.L[:, layer + 1]
    top, bottom = R_in[:, w.top], R_in[:, w.bottom]
    even, odd = L_in[:, w.even], L_in[:, w.odd]
    f_top = box_plus(even, odd + bottom, mode)
    f_bottom = box_plus(top, even, mode)
    pre_top = gamma[LEFT_TOP] * f_top
    pre_bottom = gamma[LEFT_BOTTOM] * f_bottom + odd
    L_out = state.L[:, layer]
    L_out[:, w.top] = np.clip(pre_top, -LLR_MAX, LLR_MAX)
    L_out[:, w.bottom] = np.clip(pre_bottom, -LLR_MAX, LLR_MAX)
    if record is not None:
        record.append(
            UpdateRecord(
                layer, "left", top.copy(), bottom.copy(), even.copy(), odd.copy(),
                f_top, f_bottom, pre_top, pre_bottom,
            )
        )


def wbp_decode(
    llr,
    code: PolarCode,
    iterations: int,
    weights: WbpWeights | None = None,
    record_trace: bool = False,
    mode: BoxPlusMode | str = BoxPlusMode.EXACT,
) -> DecodeTrace:
    """Decode one LLR word (shape ``(N_c,)``) or a batch (shape ``(frames, N_c)``)."""
    llrs = np.asarray(llr, dtype=np.float64)
    single = llrs.ndim == 1
    llrs = np.atleast_2d(llrs)
    if llrs.ndim != 2 or llrs.shape[1] != code.block_len:
        raise InvalidArgumentError(
            f"LLR word must have length {code.block_len}, got shape {np.shape(llr)}"
        )
    if iterations < 1:
        raise InvalidArgumentError(f"need at least one iteration, got {iterations}")
    if weights is None:
        weights = WbpWeights.ones(iterations, code.n_stages)
    if weights.gamma.shape != (iterations, code.n_stages, 4):
        raise InvalidArgumentError(
            f"weights shape {weights.gamma.shape} does not match "
            f"(T={iterations}, n_c={code.n_stages}, 4)"
        )
    mode = BoxPlusMode(mode)
    state = BpState.initial(llrs, code)
    trace_iterations: list[list[UpdateRecord]] = []
    for t in range(iterations):
        record: list[UpdateRecord] | None = [] if record_trace else None
        for layer in range(code.n_stages):
            _right_update(state, layer, weights.gamma[t, layer], code, mode, record)
        for layer in reversed(range(code.n_stages)):
            _left_update(state, layer, weights.gamma[t, layer], code, mode, record)
        state.iteration = t + 1
        if record is not None:
            trace_iterations.append(record)
    soft = state.L[:, 0].copy()
    hard = hard_decision(soft)
    return DecodeTrace(
        soft_output=soft[0] if single else soft,
        hard_output=hard[0] if single else hard,
        iterations=trace_iterations,
        mode=mode,
    )


def bp_decode(llr, code: PolarCode, iterations: int, mode: BoxPlusMode | str = BoxPlusMode.EXACT):
    """Plain BP: the unit-weight decoder used as the ensemble gate."""
    return wbp_decode(llr, code, iterations, WbpWeights.ones(iterations, code.n_stages), mode=mode)
