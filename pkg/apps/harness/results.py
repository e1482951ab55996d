"""CSV result files with a JSON sidecar holding the configuration and seed.

The CSV holds only deterministic columns, so two runs with the same seed produce
identical bytes. Timing and confidence intervals go to the sidecar.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict
from pathlib import Path

from apps.core.exceptions import ResultsIOError

from .analysis import FlopsRow
from .simulation import SimPoint, SimResult
from .statistics import rule_of_three, wilson_interval

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "snr_db",
    "frames",
    "frame_errors",
    "bit_errors",
    "fer",
    "ber",
    "gate_fail_prob",
    "avg_flops",
    "censored",
]
FLOPS_COLUMNS = [
    "snr_db",
    "frames",
    "gate_failures",
    "gate_fail_prob",
    "avg_flops",
    "lower",
    "upper",
    "equivalent_wbp_iterations",
    "ensemble_weights",
    "prob_low",
    "prob_high",
]


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ResultsIOError(path, f"cannot write results: {exc.strerror or exc}") from exc


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ResultsIOError(path, f"cannot read results: {exc.strerror or exc}") from exc


def format_results(result: SimResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for p in result.points:
        writer.writerow(
            [
                repr(p.snr_db),
                p.frames,
                p.frame_errors,
                p.bit_errors,
                repr(p.fer),
                repr(p.ber),
                repr(p.gate_fail_prob),
                repr(p.avg_flops),
                int(p.censored),
            ]
        )
    return buffer.getvalue()


def _sidecar(result: SimResult) -> dict:
    points = []
    for p in result.points:
        low, high = wilson_interval(p.frame_errors, p.frames) if p.frames else (0.0, 1.0)
        entry = {
            "snr_db": p.snr_db,
            "seconds": p.seconds,
            "undetected": p.undetected,
            "bits_per_frame": p.bits_per_frame,
            "gate_failures": p.gate_failures,
            "fer_interval_95": [low, high],
            # Censored covers any shortfall of min_frame_errors; this flags the no-error case.
            "zero_error_censored": bool(p.censored and p.frame_errors == 0),
        }
        if p.censored and p.frame_errors == 0 and p.frames:
            entry["fer_upper_bound"] = rule_of_three(p.frames)
        points.append(entry)
    return {
        "decoder": result.decoder,
        "seed": result.seed,
        "fingerprint": result.fingerprint,
        "config": result.config,
        "points": points,
    }


def write_results(result: SimResult, path) -> Path:
    path = Path(path)
    _write(path, format_results(result))
    _write(sidecar_path(path), json.dumps(_sidecar(result), sort_keys=True, indent=2) + "\n")
    logger.info("Wrote %d result rows to %s", len(result.points), path)
    return path


def read_results(path) -> SimResult:
    path = Path(path)
    rows = list(csv.reader(io.StringIO(_read(path))))
    if not rows or rows[0] != RESULT_COLUMNS:
        raise ResultsIOError(path, "unexpected CSV header")
    try:
        side = json.loads(_read(sidecar_path(path)))
        extras = side["points"]
        if len(extras) != len(rows) - 1:
            raise ValueError("sidecar and CSV disagree on the number of points")
        points = []
        for row, extra in zip(rows[1:], extras):
            record = dict(zip(RESULT_COLUMNS, row))
            points.append(
                SimPoint(
                    snr_db=float(record["snr_db"]),
                    frames=int(record["frames"]),
                    frame_errors=int(record["frame_errors"]),
                    bit_errors=int(record["bit_errors"]),
                    gate_failures=int(extra["gate_failures"]),
                    avg_flops=float(record["avg_flops"]),
                    censored=record["censored"] == "1",
                    bits_per_frame=int(extra["bits_per_frame"]),
                    seconds=float(extra["seconds"]),
                    undetected=int(extra["undetected"]),
                )
            )
        return SimResult(decoder=side["decoder"], seed=int(side["seed"]), config=side["config"], points=points)
    except (KeyError, TypeError, ValueError) as exc:
        raise ResultsIOError(path, f"malformed results: {exc}") from exc


def write_flops(rows: list[FlopsRow], path) -> Path:
    path = Path(path)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=FLOPS_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: repr(value) if isinstance(value, float) else value for key, value in asdict(row).items()})
    _write(path, buffer.getvalue())
    return path
