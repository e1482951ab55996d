"""Latency curves, CRC remainder histograms and member diversity."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from apps.bp import decoder as bp
from apps.channel.awgn import Stream
from apps.channel.link import RateMode, transmit_frames
from apps.core.exceptions import InvalidArgumentError
from apps.crc.codec import CrcSpec, crc_remainder
from apps.crc.partition import PartitionStrategy, region_indices
from apps.ensemble.latency import count_weights, equivalent_wbp_iterations, estimate_latency, latency_bounds
from apps.ensemble.model import EnsembleModel
from apps.polar.code import PolarCode, extract
from apps.training.datasets import CHUNK_FRAMES, build_partitioned_datasets
from apps.training.types import TrainConfig

from .chunks import DecoderKind
from .simulation import StopRule, run_fer
from .statistics import wilson_interval

logger = logging.getLogger(__name__)


@dataclass
class FlopsRow:
    snr_db: float
    frames: int
    gate_failures: int
    gate_fail_prob: float
    avg_flops: float
    lower: float
    upper: float
    equivalent_wbp_iterations: float
    ensemble_weights: int
    prob_low: float
    prob_high: float


def flops_curve(
    model: EnsembleModel,
    snrs_db,
    stop: StopRule | None = None,
    seed: int = 0,
    rate_mode: RateMode | str = RateMode.CODE,
    workers: int | None = None,
) -> list[FlopsRow]:
    """Empirical gate failure probability per SNR and the expected latency it implies."""
    result = run_fer(model, snrs_db, stop, seed, kind=DecoderKind.GATE, rate_mode=rate_mode, workers=workers)
    lower, upper = latency_bounds(model.code, model.iterations)
    rows = []
    for point in result.points:
        low, high = wilson_interval(point.gate_failures, point.frames)
        rows.append(
            FlopsRow(
                snr_db=point.snr_db,
                frames=point.frames,
                gate_failures=point.gate_failures,
                gate_fail_prob=point.gate_fail_prob,
                avg_flops=estimate_latency(point.gate_fail_prob, model.code, model.iterations),
                lower=lower,
                upper=upper,
                equivalent_wbp_iterations=equivalent_wbp_iterations(point.gate_fail_prob, model.iterations),
                ensemble_weights=count_weights(model.code, model.iterations, model.alpha),
                prob_low=low,
                prob_high=high,
            )
        )
    return rows


def _gate_failures(code, crc, iterations, mode, batch) -> tuple[np.ndarray, np.ndarray]:
    hard = bp.bp_decode(batch.llrs, code, iterations, mode).hard_output
    remainders = crc_remainder(extract(hard, code), crc)
    failed = np.flatnonzero(remainders.any(axis=1))
    return failed, remainders[failed]


def crc_histogram(
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
    snr_db: float,
    frames: int,
    seed: int = 0,
    iterations: int = 5,
    rate_mode: RateMode | str = RateMode.CODE,
) -> np.ndarray:
    """Gate-failed frames per region for random messages; gate successes are not counted."""
    if frames <= 0:
        raise InvalidArgumentError(f"frames must be positive, got {frames}")
    strategy.check_parity_len(crc.parity_len)
    counts = np.zeros(strategy.alpha, dtype=np.int64)
    for start in range(0, frames, CHUNK_FRAMES):
        batch = transmit_frames(
            code, crc, snr_db, seed, Stream.HISTOGRAM, start, min(start + CHUNK_FRAMES, frames), rate_mode=rate_mode
        )
        failed, remainders = _gate_failures(code, crc, iterations, bp.BoxPlusMode.EXACT, batch)
        if failed.size:
            counts += np.bincount(region_indices(remainders, strategy) - 1, minlength=strategy.alpha)
    logger.info("CRC histogram %s %s alpha=%d @ %.2f dB: %s", code.label, strategy.kind.value, strategy.alpha, snr_db, counts.tolist())
    return counts


def histogram_balance(counts) -> dict:
    counts = np.asarray(counts, dtype=np.float64)
    mean = counts.mean()
    return {
        "mean": float(mean),
        "max_deviation": float(np.max(np.abs(counts - mean)) / mean) if mean else 0.0,
        "max_min_ratio": float(counts.max() / counts.min()) if counts.min() > 0 else float("inf"),
    }


@dataclass
class DiversityReport:
    """``counts[j, i]``: region-``j+1`` frames member ``i+1`` decodes correctly.

    ``designated_fail[j, i]``: of those, the frames member ``j+1`` (the designated
    one) got wrong.
    """

    counts: np.ndarray
    designated_fail: np.ndarray
    region_totals: np.ndarray

    @property
    def alpha(self) -> int:
        return self.counts.shape[0]


def _decodes_correctly(model: EnsembleModel, member, llrs, sent) -> np.ndarray:
    hard = bp.wbp_decode(llrs, model.code, model.iterations, member, mode=model.mode).hard_output
    return (extract(hard, model.code) == sent).all(axis=1)


def diversity_report(
    model: EnsembleModel,
    frames: int,
    seed: int = 0,
    snr_db: float = 3.0,
    rate_mode: RateMode | str = RateMode.CODE,
) -> DiversityReport:
    if model.alpha == 0 or model.strategy is None:
        raise InvalidArgumentError("diversity analysis needs a model with at least one member")
    if frames <= 0:
        raise InvalidArgumentError(f"frames must be positive, got {frames}")
    alpha = model.alpha
    counts = np.zeros((alpha, alpha), dtype=np.int64)
    designated_fail = np.zeros((alpha, alpha), dtype=np.int64)
    totals = np.zeros(alpha, dtype=np.int64)
    for start in range(0, frames, CHUNK_FRAMES):
        batch = transmit_frames(
            model.code, model.crc, snr_db, seed, Stream.DIVERSITY, start, min(start + CHUNK_FRAMES, frames),
            rate_mode=rate_mode,
        )
        failed, remainders = _gate_failures(model.code, model.crc, model.iterations, model.mode, batch)
        if not failed.size:
            continue
        regions = region_indices(remainders, model.strategy) - 1
        sent = extract(batch.padded[failed], model.code)
        correct = np.stack(
            [_decodes_correctly(model, member, batch.llrs[failed], sent) for member in model.members], axis=1
        )
        designated_ok = correct[np.arange(failed.size), regions]
        np.add.at(totals, regions, 1)
        np.add.at(counts, regions, correct.astype(np.int64))
        np.add.at(designated_fail, regions, (correct & ~designated_ok[:, None]).astype(np.int64))
    return DiversityReport(counts=counts, designated_fail=designated_fail, region_totals=totals)


def partition_stats(
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
    snr_db: float,
    frames: int,
    seed: int = 0,
    iterations: int = 5,
) -> dict:
    """Training-style bucket statistics (zero codeword, training stream) next to the histogram."""
    config = TrainConfig(
        iterations=iterations, alpha=strategy.alpha, snrs_db=[snr_db], frames_per_snr=frames, seed=seed
    )
    datasets = build_partitioned_datasets(config, code, crc, strategy)
    return {"bucket_sizes": datasets.sizes(), "generated": datasets.generated, "discarded": datasets.discarded}
