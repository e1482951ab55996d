from __future__ import annotations

import functools
import json
import logging

from celery import shared_task

from apps.ensemble.model import EnsembleModel

from .chunks import simulate_range

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=8)
def _model(payload_json: str) -> EnsembleModel:
    return EnsembleModel.from_dict(json.loads(payload_json))


@shared_task(name="harness.simulate_chunk")
def simulate_chunk(model_payload: dict, kind: str, ebn0_db: float, seed: int, start: int, stop: int, rate_mode: str = "code"):
    """Count errors on evaluation frames ``start .. stop-1``; returns a ChunkTally dict."""
    model = _model(json.dumps(model_payload, sort_keys=True))
    tally = simulate_range(model, kind, ebn0_db, seed, start, stop, rate_mode)
    logger.debug("Chunk %.2f dB [%d, %d): %s", ebn0_db, start, stop, tally)
    return tally.to_dict()
