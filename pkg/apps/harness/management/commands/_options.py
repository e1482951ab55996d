"""Option handling shared by the evaluation commands."""

from django.conf import settings
from django.core.management.base import CommandError

from apps.channel.link import build_link
from apps.crc.codec import CRC11_POLY
from apps.ensemble.model import EnsembleModel
from apps.harness.simulation import StopRule


def add_model_argument(parser) -> None:
    parser.add_argument("--model", type=str, default=None, help="Ensemble model JSON")
    parser.add_argument("--iters", type=int, default=5, help="Gate iterations when no model is given")


def load_model(options) -> EnsembleModel:
    """The trained model, or a gate-only decoder built from --code when no model is given."""
    if options.get("model"):
        return EnsembleModel.load(options["model"])
    if options.get("code"):
        poly = options["poly"] if options.get("poly") is not None else CRC11_POLY
        code, crc = build_link(*options["code"], poly, options.get("design_param", 0.5))
        return EnsembleModel.gate_only(code, crc, options["iters"])
    raise CommandError("either --model or --code is required")


def stop_rule(options) -> StopRule:
    return StopRule(min_frame_errors=options["min_errors"], max_frames=options["max_frames"])


def seed(options) -> int:
    return options["seed"] if options["seed"] is not None else settings.POLAR_DEFAULT_SEED


def snrs(options) -> list[float]:
    points, span = options.get("snr"), options.get("snr_range")
    if points and span:
        raise CommandError("give either --snr or --snr-range, not both")
    if not (points or span):
        raise CommandError("--snr or --snr-range is required")
    return points or span
