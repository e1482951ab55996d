from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from apps.bp.decoder import Real
from apps.core.bits import Bits
from apps.core.exceptions import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class LabeledFrame:
    llr: Real
    target: Bits
    origin_snr_db: float

    def __post_init__(self):
        if np.shape(self.llr) != np.shape(self.target) or np.ndim(self.llr) != 1:
            raise InvalidArgumentError("LLR word and target padded word must be equal-length vectors")


def stack_frames(frames) -> tuple[Real, Bits]:
    if isinstance(frames, LabeledFrame):
        frames = [frames]
    if not frames:
        raise InvalidArgumentError("no frames to stack")
    return np.stack([f.llr for f in frames]), np.stack([f.target for f in frames])


@dataclass
class PartitionedDatasets:
    """Buckets ``D^(1) .. D^(alpha)`` of gate-failed frames, keyed by gate remainder region."""

    buckets: list[list[LabeledFrame]]
    generated: int = 0
    discarded: int = 0

    @property
    def alpha(self) -> int:
        return len(self.buckets)

    def sizes(self) -> list[int]:
        return [len(bucket) for bucket in self.buckets]

    @property
    def retained(self) -> int:
        return sum(self.sizes())

    def bucket(self, region: int) -> list[LabeledFrame]:
        return self.buckets[region - 1]


@dataclass
class TrainConfig:
    iterations: int = 5
    alpha: int = 4
    snrs_db: list[float] = field(default_factory=lambda: [2.0, 3.0, 4.0, 5.0])
    frames_per_snr: int = 100_000
    epochs: int = 100
    batches_per_epoch: int = 200
    learning_rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    eval_every: int = 5
    seed: int = 0
    batch_size: int | None = None
    validation_snr_db: float | None = None
    validation_frames: int = 0
    validation_fraction: float = 0.1
    rate_mode: str = "code"
    mode: str = "exact"

    def __post_init__(self):
        counts = {
            "iterations": self.iterations,
            "alpha": self.alpha,
            "frames_per_snr": self.frames_per_snr,
            "batches_per_epoch": self.batches_per_epoch,
            "eval_every": self.eval_every,
        }
        for name, value in counts.items():
            if value <= 0:
                raise InvalidArgumentError(f"{name} must be positive, got {value}")
        if self.epochs < 0:
            raise InvalidArgumentError(f"epochs must be >= 0, got {self.epochs}")
        if self.learning_rate <= 0:
            raise InvalidArgumentError("learning_rate must be positive")
        if not self.snrs_db:
            raise InvalidArgumentError("need at least one training SNR")
        if self.batch_size is not None and self.batch_size <= 0:
            raise InvalidArgumentError("batch_size override must be positive")

    def to_dict(self) -> dict:
        return asdict(self)
