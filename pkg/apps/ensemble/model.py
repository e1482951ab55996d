"""Trained ensemble: gate parameters plus one WBP weight tensor per region.

The model file is JSON with sorted keys and no timestamps, so retraining with
the same seed produces a byte-identical file.
"""

from __future__ import annotations

import functools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings

from apps.bp.decoder import BoxPlusMode, WbpWeights
from apps.core.exceptions import InvalidArgumentError, ResultsIOError
from apps.crc.codec import CrcSpec
from apps.crc.partition import PartitionStrategy
from apps.polar.code import PolarCode, construct

from .serializers import EnsembleModelSerializer

logger = logging.getLogger(__name__)

MODEL_FORMAT = 1


@dataclass
class EnsembleModel:
    code: PolarCode
    crc: CrcSpec
    iterations: int
    strategy: PartitionStrategy | None
    members: list[WbpWeights]
    mode: BoxPlusMode = BoxPlusMode.EXACT
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mode = BoxPlusMode(self.mode)
        if self.crc.codeword_len != self.code.info_len:
            raise InvalidArgumentError(
                f"CRC codeword length {self.crc.codeword_len} != polar info length {self.code.info_len}"
            )
        expected = self.strategy.alpha if self.strategy is not None else 0
        if len(self.members) != expected:
            raise InvalidArgumentError(f"expected {expected} members, got {len(self.members)}")
        if self.strategy is not None:
            self.strategy.check_parity_len(self.crc.parity_len)
        shape = (self.iterations, self.code.n_stages, 4)
        for index, member in enumerate(self.members, start=1):
            if member.gamma.shape != shape:
                raise InvalidArgumentError(f"member {index} has shape {member.gamma.shape}, expected {shape}")

    @classmethod
    def gate_only(
        cls, code: PolarCode, crc: CrcSpec, iterations: int, mode: BoxPlusMode | str = BoxPlusMode.EXACT
    ) -> "EnsembleModel":
        return cls(code=code, crc=crc, iterations=iterations, strategy=None, members=[], mode=mode)

    @property
    def is_baseline(self) -> bool:
        """A lone WBP decoder trained on all frames rather than a gated ensemble."""
        return bool(self.metadata.get("baseline"))

    @property
    def alpha(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "code": {
                "block_len": self.code.block_len,
                "info_len": self.code.info_len,
                "design_param": self.code.design_param,
                "reliable_positions": list(self.code.reliable_positions),
            },
            "crc": {"generator_poly": self.crc.poly_hex, "message_len": self.crc.message_len},
            "iterations": self.iterations,
            "mode": self.mode.value,
            "partition": (
                {"kind": self.strategy.kind.value, "alpha": self.strategy.alpha} if self.strategy else None
            ),
            "members": [member.gamma.tolist() for member in self.members],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EnsembleModel":
        serializer = EnsembleModelSerializer(data=payload)
        if not serializer.is_valid():
            raise InvalidArgumentError(f"invalid model: {serializer.errors}")
        data = serializer.validated_data
        spec = data["code"]
        code = construct(spec["block_len"], spec["info_len"], spec["design_param"])
        stored = spec.get("reliable_positions")
        if stored is not None and tuple(stored) != code.reliable_positions:
            raise InvalidArgumentError("stored reliable positions disagree with the code construction")
        partition = data["partition"]
        try:
            members = [WbpWeights(gamma) for gamma in data["members"]]
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"invalid member weights: {exc}") from exc
        return cls(
            code=code,
            crc=CrcSpec.from_hex(data["crc"]["generator_poly"], data["crc"]["message_len"]),
            iterations=data["iterations"],
            strategy=PartitionStrategy(partition["kind"], partition["alpha"]) if partition else None,
            members=members,
            mode=data["mode"],
            metadata=dict(data.get("metadata") or {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.dumps())
        except OSError as exc:
            raise ResultsIOError(path, f"cannot write model: {exc.strerror or exc}") from exc
        logger.info("Saved %s ensemble (alpha=%d, T=%d) to %s", self.code.label, self.alpha, self.iterations, path)
        return path

    @classmethod
    def load(cls, path) -> "EnsembleModel":
        path = Path(path)
        try:
            payload = json.loads(path.read_text())
        except OSError as exc:
            raise ResultsIOError(path, f"cannot read model: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ResultsIOError(path, f"not a JSON model file: {exc}") from exc
        return cls.from_dict(payload)


@functools.lru_cache(maxsize=4)
def _load_cached(path: str, mtime: float) -> EnsembleModel:
    return EnsembleModel.load(path)


def configured_model() -> EnsembleModel | None:
    """The model named by ``ENSEMBLE_MODEL_PATH``, reloaded when the file changes."""
    path = getattr(settings, "ENSEMBLE_MODEL_PATH", "")
    if not path:
        return None
    try:
        mtime = Path(path).stat().st_mtime
    except OSError as exc:
        raise ResultsIOError(path, f"cannot read model: {exc.strerror or exc}") from exc
    return _load_cached(str(path), mtime)
