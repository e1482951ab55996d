"""Per-region WBP training with Adam and validation checkpointing."""

from __future__ import annotations

import logging
import time

import numpy as np

from apps.bp import decoder as bp
from apps.bp.decoder import WbpWeights
from apps.channel.awgn import Stream
from apps.core.exceptions import EmptyDatasetError
from apps.crc.codec import CrcSpec
from apps.crc.partition import PartitionKind, PartitionStrategy
from apps.ensemble.model import EnsembleModel
from apps.polar.code import PolarCode, extract

from . import datasets as training_data
from .gradient import loss_and_gradient
from .loss import bce_loss
from .optim import AdamState, adam_step
from .types import LabeledFrame, PartitionedDatasets, TrainConfig, stack_frames

logger = logging.getLogger(__name__)


def _split(bucket: list[LabeledFrame], config: TrainConfig, rng: np.random.Generator):
    if len(bucket) < 2:
        return bucket, bucket
    order = rng.permutation(len(bucket))
    held_out = max(1, int(len(bucket) * config.validation_fraction))
    held_out = min(held_out, len(bucket) - 1)
    return [bucket[i] for i in order[held_out:]], [bucket[i] for i in order[:held_out]]


def _validation_metrics(llrs, targets, code: PolarCode, weights: WbpWeights, config: TrainConfig):
    trace = bp.wbp_decode(llrs, code, config.iterations, weights, mode=config.mode)
    loss = bce_loss(targets, trace.soft_output)
    ber = float(np.mean(extract(trace.hard_output, code) != extract(targets, code)))
    return loss, ber


def train_member(
    bucket: list[LabeledFrame],
    config: TrainConfig,
    code: PolarCode,
    *,
    region: int = 1,
    validation: list[LabeledFrame] | None = None,
) -> WbpWeights:
    """Train one WBP decoder on its own bucket.

    Returns the weights with the lowest validation loss seen at the checkpoints
    (epoch 0, every ``eval_every`` epochs and the final epoch).
    """
    if not bucket:
        raise EmptyDatasetError(region)
    weights = WbpWeights.ones(config.iterations, code.n_stages)
    if config.epochs == 0:
        return weights

    rng = np.random.default_rng([config.seed, region])
    if validation:
        train, held_out = bucket, validation
    else:
        train, held_out = _split(bucket, config, rng)
    train_llrs, train_targets = stack_frames(train)
    val_llrs, val_targets = stack_frames(held_out)
    batch_size = config.batch_size or max(1, len(train) // config.batches_per_epoch)

    best = weights.copy()
    best_loss, best_ber = _validation_metrics(val_llrs, val_targets, code, weights, config)
    best_epoch = 0
    logger.info(
        "Region %d: %d training / %d validation frames, batch %d, initial val loss %.5f",
        region, len(train), len(held_out), batch_size, best_loss,
    )
    state = AdamState.zeros_like(weights)
    started = time.monotonic()
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train))
        epoch_loss = 0.0
        for b in range(config.batches_per_epoch):
            rows = np.take(order, np.arange(b * batch_size, (b + 1) * batch_size), mode="wrap")
            loss, grad = loss_and_gradient(
                train_llrs[rows], train_targets[rows], code, config.iterations, weights, config.mode
            )
            weights, state = adam_step(
                weights, grad, state, config.learning_rate, config.beta1, config.beta2, config.epsilon
            )
            epoch_loss += loss
        logger.debug("Region %d epoch %d: mean train loss %.5f", region, epoch, epoch_loss / config.batches_per_epoch)

        if epoch % config.eval_every == 0 or epoch == config.epochs:
            val_loss, val_ber = _validation_metrics(val_llrs, val_targets, code, weights, config)
            logger.info(
                "Region %d checkpoint epoch %d: val loss %.5f, val BER %.3e", region, epoch, val_loss, val_ber
            )
            if val_loss < best_loss:
                best, best_loss, best_ber, best_epoch = weights.copy(), val_loss, val_ber, epoch

    if best_epoch == 0:
        logger.warning("Region %d: no checkpoint beat the unit weights; keeping plain BP", region)
    logger.info(
        "Region %d done in %.1fs: best epoch %d, val loss %.5f, val BER %.3e",
        region, time.monotonic() - started, best_epoch, best_loss, best_ber,
    )
    return best


def train_ensemble(
    config: TrainConfig,
    code: PolarCode,
    crc: CrcSpec,
    strategy: PartitionStrategy,
    datasets: PartitionedDatasets | None = None,
) -> EnsembleModel:
    """Build the buckets (unless given) and train every member independently."""
    if datasets is None:
        datasets = training_data.build_partitioned_datasets(config, code, crc, strategy)
    validation = training_data.build_validation_sets(config, code, crc, strategy)
    for region, size in enumerate(datasets.sizes(), start=1):
        if size == 0:
            raise EmptyDatasetError(
                region,
                f"Training bucket for region {region} is empty; generate more frames or lower alpha",
            )

    members = []
    for region in range(1, datasets.alpha + 1):
        held_out = validation.bucket(region) if validation is not None else None
        members.append(train_member(datasets.bucket(region), config, code, region=region, validation=held_out))

    metadata = {
        "train_config": config.to_dict(),
        "frames_generated": datasets.generated,
        "gate_successes_dropped": datasets.discarded,
        "bucket_sizes": datasets.sizes(),
    }
    return EnsembleModel(
        code=code,
        crc=crc,
        iterations=config.iterations,
        strategy=strategy,
        members=members,
        mode=config.mode,
        metadata=metadata,
    )


def train_baseline(config: TrainConfig, code: PolarCode, crc: CrcSpec) -> EnsembleModel:
    """One WBP decoder trained on the whole zero-codeword set, stored as a one-member model.

    Evaluated with ``DecoderKind.WBP`` it decodes every frame without a gate.
    """
    frames = training_data.build_baseline_dataset(config, code, crc)
    validation = None
    if config.validation_snr_db is not None and config.validation_frames > 0:
        validation = training_data.build_baseline_dataset(
            config, code, crc, [config.validation_snr_db], config.validation_frames, Stream.VALIDATION
        )
    weights = train_member(frames, config, code, region=1, validation=validation)
    return EnsembleModel(
        code=code,
        crc=crc,
        iterations=config.iterations,
        strategy=PartitionStrategy(PartitionKind.MSB, 1),
        members=[weights],
        mode=config.mode,
        metadata={"baseline": True, "train_config": config.to_dict(), "frames_generated": len(frames)},
    )


def per_member_ber(model: EnsembleModel, frames: list[LabeledFrame]) -> np.ndarray:
    """Bit error rate over the N_u information positions of each member on ``frames``."""
    llrs, targets = stack_frames(frames)
    truth = extract(targets, model.code)
    rates = np.empty(model.alpha)
    for index, member in enumerate(model.members):
        hard = bp.wbp_decode(llrs, model.code, model.iterations, member, mode=model.mode).hard_output
        rates[index] = np.mean(extract(hard, model.code) != truth)
    return rates
