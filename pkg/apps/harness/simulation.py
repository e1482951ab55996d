"""Monte Carlo FER/BER evaluation with an error-count stop rule.

Frames are simulated in fixed-size batches; the stop rule is checked between
batches. Each batch is split into ``POLAR_WORKERS`` shards that run as a Celery
group and are summed in shard order, so the counts depend only on the seed and
the batch size, never on the worker count.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from celery import group
from django.conf import settings

from apps.channel.link import RateMode
from apps.core.exceptions import InvalidArgumentError
from apps.ensemble.latency import estimate_latency, single_decoder_latency
from apps.ensemble.model import EnsembleModel

from .chunks import ChunkTally, DecoderKind, decoder_for
from .statistics import paired_improvement_pvalue
from .tasks import simulate_chunk

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StopRule:
    min_frame_errors: int = 500
    max_frames: int = 10_000_000

    def __post_init__(self):
        if self.min_frame_errors <= 0 or self.max_frames <= 0:
            raise InvalidArgumentError("stop rule limits must be positive")


@dataclass
class SimPoint:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    gate_failures: int
    avg_flops: float
    censored: bool
    bits_per_frame: int
    seconds: float = 0.0
    undetected: int = 0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.bits_per_frame) if self.frames else 0.0

    @property
    def gate_fail_prob(self) -> float:
        return self.gate_failures / self.frames if self.frames else 0.0


@dataclass
class SimResult:
    decoder: str
    seed: int
    config: dict
    points: list[SimPoint] = field(default_factory=list)

    @property
    def fingerprint(self) -> str:
        blob = json.dumps(self.config, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class PairedComparison:
    snr_db: float
    frames: int
    gate_frame_errors: int
    ensemble_frame_errors: int
    gate_only_errors: int
    ensemble_only_errors: int
    ensemble_undetected: int

    @property
    def p_value(self) -> float:
        """Significance of the ensemble's improvement over the gate on these frames."""
        return paired_improvement_pvalue(self.gate_only_errors, self.ensemble_only_errors)

    @property
    def within_allowance(self) -> bool:
        return self.ensemble_frame_errors <= self.gate_frame_errors + self.ensemble_undetected


@dataclass
class PairedResult:
    gate: SimResult
    ensemble: SimResult
    comparisons: list[PairedComparison]


def simulation_config(model: EnsembleModel, kind: DecoderKind | str, stop: StopRule, rate_mode, batch_frames: int) -> dict:
    return {
        "decoder": DecoderKind(kind).value,
        "code": [model.code.block_len, model.code.info_len],
        "design_param": model.code.design_param,
        "crc_poly": model.crc.poly_hex,
        "message_len": model.crc.message_len,
        "iterations": model.iterations,
        "mode": model.mode.value,
        "alpha": {DecoderKind.GATE: 0, DecoderKind.ENSEMBLE: model.alpha, DecoderKind.WBP: 1}[DecoderKind(kind)],
        "strategy": model.strategy.kind.value if model.strategy and DecoderKind(kind) is DecoderKind.ENSEMBLE else None,
        "min_frame_errors": stop.min_frame_errors,
        "max_frames": stop.max_frames,
        "rate_mode": RateMode(rate_mode).value,
        "batch_frames": batch_frames,
    }


def _shards(start: int, stop: int, workers: int) -> list[tuple[int, int]]:
    edges = np.linspace(start, stop, workers + 1).round().astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def _run_batch(payload: dict, kind: str, snr: float, seed: int, start: int, stop: int, rate_mode: str, workers: int) -> ChunkTally:
    job = group(simulate_chunk.s(payload, kind, snr, seed, lo, hi, rate_mode) for lo, hi in _shards(start, stop, workers))
    total = ChunkTally()
    for subtotal in job.apply_async().get():
        total = total + ChunkTally.from_dict(subtotal)
    return total


def _simulate_point(model, kind, snr, stop, seed, rate_mode, workers, batch_frames, stop_errors) -> tuple[ChunkTally, float]:
    payload = model.to_dict()
    tally = ChunkTally()
    started = time.monotonic()
    while stop_errors(tally) < stop.min_frame_errors and tally.frames < stop.max_frames:
        size = min(batch_frames, stop.max_frames - tally.frames)
        tally = tally + _run_batch(
            payload, DecoderKind(kind).value, snr, seed, tally.frames, tally.frames + size,
            RateMode(rate_mode).value, workers,
        )
    return tally, time.monotonic() - started


def _resolve(workers, batch_frames) -> tuple[int, int]:
    workers = workers or settings.POLAR_WORKERS
    batch_frames = batch_frames or settings.POLAR_BATCH_FRAMES
    if workers < 1 or batch_frames < 1:
        raise InvalidArgumentError("worker count and batch size must be positive")
    return workers, batch_frames


def _point(model, kind, snr, tally: ChunkTally, stop: StopRule, seconds: float) -> SimPoint:
    errors = tally.frame_errors(kind)
    gate_fail_prob = tally.gate_failures / tally.frames
    if DecoderKind(kind) is DecoderKind.WBP:
        flops = single_decoder_latency(model.code.block_len, model.iterations)
    else:
        flops = estimate_latency(gate_fail_prob, model.code, model.iterations, model.alpha)
    return SimPoint(
        snr_db=float(snr),
        frames=tally.frames,
        frame_errors=errors,
        bit_errors=tally.bit_errors(kind),
        gate_failures=tally.gate_failures,
        avg_flops=flops,
        censored=errors < stop.min_frame_errors,
        bits_per_frame=model.crc.message_len,
        seconds=seconds,
        undetected=tally.undetected(kind),
    )


def run_fer(
    model: EnsembleModel,
    snrs_db,
    stop: StopRule | None = None,
    seed: int = 0,
    kind: DecoderKind | str = DecoderKind.ENSEMBLE,
    rate_mode: RateMode | str = RateMode.CODE,
    workers: int | None = None,
    batch_frames: int | None = None,
) -> SimResult:
    """FER/BER per SNR for the gate alone, the full ensemble or a lone WBP decoder.

    A point is censored when ``max_frames`` is reached before ``min_frame_errors``.
    """
    if not len(snrs_db):
        raise InvalidArgumentError("need at least one SNR point")
    stop = stop or StopRule()
    kind = DecoderKind(kind)
    workers, batch_frames = _resolve(workers, batch_frames)
    decoder = decoder_for(model, kind)
    result = SimResult(
        decoder=kind.value,
        seed=seed,
        config=simulation_config(model, kind, stop, rate_mode, batch_frames),
    )
    for snr in snrs_db:
        tally, seconds = _simulate_point(
            decoder, kind, snr, stop, seed, rate_mode, workers, batch_frames, lambda t: t.frame_errors(kind)
        )
        point = _point(decoder, kind, snr, tally, stop, seconds)
        result.points.append(point)
        log = logger.warning if point.censored else logger.info
        log(
            "%s %s @ %.2f dB: %d/%d frame errors (FER %.3e, BER %.3e, gate fail %.3e)%s in %.1fs",
            kind.value, model.code.label, snr, point.frame_errors, point.frames,
            point.fer, point.ber, point.gate_fail_prob, " [censored]" if point.censored else "", seconds,
        )
    return result


def run_paired(
    model: EnsembleModel,
    snrs_db,
    stop: StopRule | None = None,
    seed: int = 0,
    rate_mode: RateMode | str = RateMode.CODE,
    workers: int | None = None,
    batch_frames: int | None = None,
) -> PairedResult:
    """Gate and ensemble on the same noise realizations; stops once both reach the error target."""
    if not len(snrs_db):
        raise InvalidArgumentError("need at least one SNR point")
    stop = stop or StopRule()
    workers, batch_frames = _resolve(workers, batch_frames)
    gate = SimResult(DecoderKind.GATE.value, seed, simulation_config(model, DecoderKind.GATE, stop, rate_mode, batch_frames))
    ensemble = SimResult(
        DecoderKind.ENSEMBLE.value, seed, simulation_config(model, DecoderKind.ENSEMBLE, stop, rate_mode, batch_frames)
    )
    comparisons = []
    for snr in snrs_db:
        tally, seconds = _simulate_point(
            model, DecoderKind.ENSEMBLE, snr, stop, seed, rate_mode, workers, batch_frames,
            lambda t: min(t.gate_frame_errors, t.ensemble_frame_errors),
        )
        gate.points.append(_point(decoder_for(model, DecoderKind.GATE), DecoderKind.GATE, snr, tally, stop, seconds))
        ensemble.points.append(_point(model, DecoderKind.ENSEMBLE, snr, tally, stop, seconds))
        comparison = PairedComparison(
            snr_db=float(snr),
            frames=tally.frames,
            gate_frame_errors=tally.gate_frame_errors,
            ensemble_frame_errors=tally.ensemble_frame_errors,
            gate_only_errors=tally.gate_only_errors,
            ensemble_only_errors=tally.ensemble_only_errors,
            ensemble_undetected=tally.ensemble_undetected,
        )
        comparisons.append(comparison)
        logger.info(
            "paired @ %.2f dB over %d frames: gate %d, ensemble %d errors (p=%.3g)",
            snr, tally.frames, tally.gate_frame_errors, tally.ensemble_frame_errors, comparison.p_value,
        )
    return PairedResult(gate=gate, ensemble=ensemble, comparisons=comparisons)
