"""Error counting over one contiguous range of evaluation frames.

A range is the unit of parallel work; its tally depends only on the model, the
SNR, the seed and the frame indices.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, fields

import numpy as np

from apps.bp import decoder as bp
from apps.channel.awgn import Stream
from apps.channel.link import RateMode, transmit_frames
from apps.core.exceptions import InvalidArgumentError
from apps.crc.codec import crc_message, crc_valid
from apps.ensemble.decoder import ensemble_decode_batch
from apps.ensemble.model import EnsembleModel
from apps.polar.code import extract


class DecoderKind(str, enum.Enum):
    GATE = "gate"
    ENSEMBLE = "ensemble"
    # Member 1 alone on every frame, no gate.
    WBP = "wbp"


@dataclass
class ChunkTally:
    frames: int = 0
    gate_frame_errors: int = 0
    gate_bit_errors: int = 0
    gate_failures: int = 0
    gate_undetected: int = 0
    # ensemble_* count the decoder under test: the ensemble, or the lone WBP.
    ensemble_frame_errors: int = 0
    ensemble_bit_errors: int = 0
    ensemble_undetected: int = 0
    # Discordant pairs on shared frames.
    gate_only_errors: int = 0
    ensemble_only_errors: int = 0

    def __add__(self, other: "ChunkTally") -> "ChunkTally":
        return ChunkTally(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ChunkTally":
        return cls(**{f.name: int(data[f.name]) for f in fields(cls)})

    def frame_errors(self, kind: DecoderKind) -> int:
        return self.gate_frame_errors if DecoderKind(kind) is DecoderKind.GATE else self.ensemble_frame_errors

    def bit_errors(self, kind: DecoderKind) -> int:
        return self.gate_bit_errors if DecoderKind(kind) is DecoderKind.GATE else self.ensemble_bit_errors

    def undetected(self, kind: DecoderKind) -> int:
        return self.gate_undetected if DecoderKind(kind) is DecoderKind.GATE else self.ensemble_undetected


def decoder_for(model: EnsembleModel, kind: DecoderKind | str) -> EnsembleModel:
    """A gate-only run uses the same code, CRC and T without any members."""
    kind = DecoderKind(kind)
    if kind is DecoderKind.GATE:
        return EnsembleModel.gate_only(model.code, model.crc, model.iterations, model.mode)
    if kind is DecoderKind.WBP and model.alpha < 1:
        raise InvalidArgumentError("a lone WBP run needs a model with at least one set of weights")
    return model


def _decode(model: EnsembleModel, kind: DecoderKind, llrs):
    """(gate words, final words, gate CRC failures) for one batch."""
    if kind is DecoderKind.WBP:
        gate_words = bp.bp_decode(llrs, model.code, model.iterations, model.mode).hard_output
        words = bp.wbp_decode(llrs, model.code, model.iterations, model.members[0], mode=model.mode).hard_output
        return gate_words, words, ~crc_valid(extract(gate_words, model.code), model.crc)
    out = ensemble_decode_batch(llrs, model)
    return out.gate_words, out.words, out.gate_failed


def simulate_range(
    model: EnsembleModel,
    kind: DecoderKind | str,
    ebn0_db: float,
    seed: int,
    start: int,
    stop: int,
    rate_mode: RateMode | str = RateMode.CODE,
) -> ChunkTally:
    if stop <= start:
        return ChunkTally()
    kind = DecoderKind(kind)
    model = decoder_for(model, kind)
    batch = transmit_frames(model.code, model.crc, ebn0_db, seed, Stream.EVAL, start, stop, rate_mode=rate_mode)
    gate_words, words, gate_failed = _decode(model, kind, batch.llrs)

    gate_codeword = extract(gate_words, model.code)
    final_codeword = extract(words, model.code)
    gate_bits = crc_message(gate_codeword, model.crc) != batch.messages
    final_bits = crc_message(final_codeword, model.crc) != batch.messages
    gate_wrong = gate_bits.any(axis=1)
    final_wrong = final_bits.any(axis=1)
    return ChunkTally(
        frames=len(batch),
        gate_frame_errors=int(gate_wrong.sum()),
        gate_bit_errors=int(gate_bits.sum()),
        gate_failures=int(gate_failed.sum()),
        gate_undetected=int(np.count_nonzero(gate_wrong & ~gate_failed)),
        ensemble_frame_errors=int(final_wrong.sum()),
        ensemble_bit_errors=int(final_bits.sum()),
        ensemble_undetected=int(np.count_nonzero(final_wrong & crc_valid(final_codeword, model.crc))),
        gate_only_errors=int(np.count_nonzero(gate_wrong & ~final_wrong)),
        ensemble_only_errors=int(np.count_nonzero(final_wrong & ~gate_wrong)),
    )
