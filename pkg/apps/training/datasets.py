"""Training data: gate-failed frames bucketed by the region of their gate remainder.

Frames carry the all-zero codeword (the decoder is symmetric under the BPSK/AWGN
model), so targets are all-zero padded words. Frames the gate decodes with a zero
remainder teach nothing and are dropped.
"""

from __future__ import annotations

import logging

import numpy as np

from apps.bp import decoder as bp
from apps.bp.decoder import BoxPlusMode
from apps.channel.awgn import Stream
from apps.channel.link import FrameBatch, transmit_frames
from apps.core.exceptions import ContractViolationError, InvalidArgumentError
from apps.crc.codec import CrcSpec, crc_remainder
from apps.crc.partition import PartitionStrategy, region_indices
from apps.polar.code import PolarCode, extract

from .types import LabeledFrame, PartitionedDatasets, TrainConfig

logger = logging.getLogger(__name__)

CHUNK_FRAMES = 4096


def gate_regions(
    batch: FrameBatch,
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
    iterations: int,
    mode: BoxPlusMode | str = BoxPlusMode.EXACT,
) -> np.ndarray:
    """Region of every frame's gate remainder, 0 where the gate passes the CRC."""
    hard = bp.bp_decode(batch.llrs, code, iterations, mode).hard_output
    remainders = crc_remainder(extract(hard, code), crc)
    failed = remainders.any(axis=1)
    regions = np.zeros(len(batch), dtype=np.int64)
    if failed.any():
        regions[failed] = region_indices(remainders[failed], strategy)
    return regions


def collect_failures(
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
    config: TrainConfig,
    snrs_db,
    frames_per_snr: int,
    stream: Stream,
) -> PartitionedDatasets:
    strategy.check_parity_len(crc.parity_len)
    datasets = PartitionedDatasets(buckets=[[] for _ in range(strategy.alpha)])
    for snr in snrs_db:
        for start in range(0, frames_per_snr, CHUNK_FRAMES):
            stop = min(start + CHUNK_FRAMES, frames_per_snr)
            batch = transmit_frames(
                code, crc, snr, config.seed, stream, start, stop,
                zero_codeword=True, rate_mode=config.rate_mode,
            )
            regions = gate_regions(batch, code, crc, strategy, config.iterations, config.mode)
            datasets.generated += len(batch)
            datasets.discarded += int(np.count_nonzero(regions == 0))
            for row in np.flatnonzero(regions):
                datasets.buckets[regions[row] - 1].append(
                    LabeledFrame(batch.llrs[row], batch.padded[row], float(snr))
                )
        logger.debug("Collected gate failures at %.2f dB: bucket sizes %s", snr, datasets.sizes())
    if datasets.retained + datasets.discarded != datasets.generated:
        raise ContractViolationError("partition lost or duplicated frames")
    return datasets


def build_partitioned_datasets(
    config: TrainConfig,
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
) -> PartitionedDatasets:
    if strategy.alpha != config.alpha:
        raise InvalidArgumentError(
            f"strategy has alpha={strategy.alpha} but the training config asks for {config.alpha}"
        )
    if crc.codeword_len != code.info_len:
        raise InvalidArgumentError(
            f"CRC codeword length {crc.codeword_len} != polar info length {code.info_len}"
        )
    datasets = collect_failures(
        code, crc, strategy, config, config.snrs_db, config.frames_per_snr, Stream.TRAIN
    )
    logger.info(
        "Built %d training buckets from %d frames (%d gate successes dropped): %s",
        datasets.alpha,
        datasets.generated,
        datasets.discarded,
        datasets.sizes(),
    )
    return datasets


def build_validation_sets(
    config: TrainConfig,
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
) -> PartitionedDatasets | None:
    """Separate per-region validation frames at a single SNR, or None when not configured."""
    if config.validation_snr_db is None or config.validation_frames <= 0:
        return None
    return collect_failures(
        code, crc, strategy, config, [config.validation_snr_db], config.validation_frames, Stream.VALIDATION
    )


def build_baseline_dataset(
    config: TrainConfig,
    code: PolarCode,
    crc: CrcSpec,
    snrs_db=None,
    frames_per_snr: int | None = None,
    stream: Stream = Stream.TRAIN,
) -> list[LabeledFrame]:
    """Every simulated zero-codeword frame, gate successes included, for a lone WBP decoder."""
    snrs_db = config.snrs_db if snrs_db is None else snrs_db
    frames_per_snr = config.frames_per_snr if frames_per_snr is None else frames_per_snr
    frames: list[LabeledFrame] = []
    for snr in snrs_db:
        for start in range(0, frames_per_snr, CHUNK_FRAMES):
            batch = transmit_frames(
                code, crc, snr, config.seed, stream, start, min(start + CHUNK_FRAMES, frames_per_snr),
                zero_codeword=True, rate_mode=config.rate_mode,
            )
            frames.extend(LabeledFrame(batch.llrs[row], batch.padded[row], float(snr)) for row in range(len(batch)))
    logger.info("Built a baseline set of %d frames over %d SNR points", len(frames), len(snrs_db))
    return frames
