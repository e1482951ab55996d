from pathlib import Path

import numpy as np
from django.core.management.base import CommandError

from apps.core.bits import format_bits
from apps.core.commands import ConfiguredCommand
from apps.core.exceptions import InvalidArgumentError, ResultsIOError
from apps.crc.codec import crc_message, crc_valid
from apps.ensemble.decoder import ensemble_decode
from apps.ensemble.model import EnsembleModel
from apps.polar.code import extract


def read_llr_file(path) -> np.ndarray:
    """One real per line; blank lines are skipped."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ResultsIOError(path, f"cannot read LLR file: {exc.strerror or exc}") from exc
    try:
        values = [float(line) for line in lines if line.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError(f"{path}: LLRs must be finite")
    return np.asarray(values, dtype=np.float64)


class Command(ConfiguredCommand):
    help = "Decode one LLR word with a trained ensemble and print the message bits and decision path"

    def add_arguments(self, parser):
        parser.add_argument("llr_file", type=str, help="Text file with one LLR per line")
        parser.add_argument("--model", type=str, default=None, help="Ensemble model JSON")

    def handle(self, *args, **options):
        if not options["model"]:
            raise CommandError("--model is required")
        model = EnsembleModel.load(options["model"])
        outcome = ensemble_decode(read_llr_file(options["llr_file"]), model)
        codeword = extract(outcome.word, model.code)
        self.stdout.write(format_bits(crc_message(codeword, model.crc)))
        detail = f"path={outcome.path.value} member={outcome.member} members_invoked={outcome.members_invoked}"
        if crc_valid(codeword, model.crc):
            self.stdout.write(self.style.SUCCESS(detail))
        else:
            self.stdout.write(self.style.WARNING(f"{detail} crc=fail"))
