"""CRC-gated ensemble decoding.

Plain BP runs first. When its estimate passes the CRC it is returned as is.
Otherwise every member decodes the same LLRs; the first member (lowest index)
whose estimate passes the CRC wins, and if none does the member designated by
the gate remainder's region supplies the output.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from apps.bp import decoder as bp
from apps.core.bits import Bits
from apps.core.exceptions import InvalidArgumentError
from apps.crc.codec import crc_remainder
from apps.crc.partition import region_indices
from apps.polar.code import extract

from .model import EnsembleModel

logger = logging.getLogger(__name__)


class DecisionPath(str, enum.Enum):
    GATE_SUCCESS = "gate_success"
    MEMBER_VALIDATED = "member_validated"
    FALLBACK = "fallback"


_PATHS = list(DecisionPath)


@dataclass
class DecodeOutcome:
    word: Bits
    path: DecisionPath
    member: int
    members_invoked: int


@dataclass
class BatchOutcome:
    """Per-frame results of :func:`ensemble_decode_batch`; ``member`` is 0 for the gate."""

    words: Bits
    gate_words: Bits
    paths: np.ndarray
    members: np.ndarray
    members_invoked: np.ndarray

    def __len__(self) -> int:
        return self.words.shape[0]

    @property
    def gate_failed(self) -> np.ndarray:
        return self.paths != _PATHS.index(DecisionPath.GATE_SUCCESS)

    def path(self, row: int) -> DecisionPath:
        return _PATHS[int(self.paths[row])]

    def outcome(self, row: int) -> DecodeOutcome:
        return DecodeOutcome(
            word=self.words[row],
            path=self.path(row),
            member=int(self.members[row]),
            members_invoked=int(self.members_invoked[row]),
        )


def ensemble_decode_batch(llrs, model: EnsembleModel) -> BatchOutcome:
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    if llrs.ndim != 2 or llrs.shape[1] != model.code.block_len:
        raise InvalidArgumentError(
            f"LLR word must have length {model.code.block_len}, got shape {llrs.shape}"
        )
    frames = llrs.shape[0]
    gate = bp.bp_decode(llrs, model.code, model.iterations, model.mode).hard_output
    remainders = crc_remainder(extract(gate, model.code), model.crc)
    failed = np.flatnonzero(remainders.any(axis=1))

    words = gate.copy()
    paths = np.full(frames, _PATHS.index(DecisionPath.GATE_SUCCESS), dtype=np.int8)
    members = np.zeros(frames, dtype=np.int64)
    invoked = np.zeros(frames, dtype=np.int64)
    if failed.size == 0:
        return BatchOutcome(words, gate, paths, members, invoked)
    if model.alpha == 0:
        paths[failed] = _PATHS.index(DecisionPath.FALLBACK)
        return BatchOutcome(words, gate, paths, members, invoked)

    candidates = np.stack(
        [
            bp.wbp_decode(llrs[failed], model.code, model.iterations, member, mode=model.mode).hard_output
            for member in model.members
        ]
    )
    valid = np.stack(
        [~crc_remainder(extract(words_i, model.code), model.crc).any(axis=1) for words_i in candidates]
    )
    any_valid = valid.any(axis=0)
    # argmax returns the first True, so ties go to the lowest member index.
    chosen = np.where(any_valid, valid.argmax(axis=0) + 1, region_indices(remainders[failed], model.strategy))
    words[failed] = candidates[chosen - 1, np.arange(failed.size)]
    members[failed] = chosen
    invoked[failed] = model.alpha
    paths[failed] = np.where(
        any_valid, _PATHS.index(DecisionPath.MEMBER_VALIDATED), _PATHS.index(DecisionPath.FALLBACK)
    )
    logger.debug(
        "Ensemble batch: %d frames, %d gate failures, %d rescued by CRC", frames, failed.size, int(any_valid.sum())
    )
    return BatchOutcome(words, gate, paths, members, invoked)


def ensemble_decode(llr, model: EnsembleModel) -> DecodeOutcome:
    """Decode a single LLR word of length N_c."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.ndim != 1:
        raise InvalidArgumentError("ensemble_decode takes one LLR word; use ensemble_decode_batch")
    return ensemble_decode_batch(llr, model).outcome(0)
