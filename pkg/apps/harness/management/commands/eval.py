from pathlib import Path

from apps.core.cli import add_code_arguments, add_stop_arguments
from apps.core.commands import ConfiguredCommand
from apps.harness.chunks import DecoderKind
from apps.harness.results import write_results
from apps.harness.simulation import run_fer, run_paired

from ._options import add_model_argument, load_model, seed, snrs, stop_rule


class Command(ConfiguredCommand):
    help = "Monte Carlo FER/BER of the gate, the full ensemble or a lone WBP; writes CSV plus JSON sidecar"

    def add_arguments(self, parser):
        add_model_argument(parser)
        add_code_arguments(parser)
        add_stop_arguments(parser)
        parser.add_argument("--gate-only", action="store_true", help="Evaluate plain BP without the members")
        parser.add_argument(
            "--wbp", action="store_true", help="Evaluate the first weight set alone on every frame (default for baseline models)"
        )
        parser.add_argument(
            "--paired", action="store_true", help="Gate and ensemble on shared frames; writes OUT and OUT's -gate twin"
        )
        parser.add_argument("--batch-frames", type=int, default=None, help="Frames per batch (default POLAR_BATCH_FRAMES)")
        parser.add_argument("--out", type=str, default="fer.csv")

    def handle(self, *args, **options):
        model = load_model(options)
        common = dict(
            stop=stop_rule(options),
            seed=seed(options),
            rate_mode=options["rate_mode"],
            workers=options["workers"],
            batch_frames=options["batch_frames"],
        )
        out = Path(options["out"])
        if options["paired"]:
            paired = run_paired(model, snrs(options), **common)
            write_results(paired.ensemble, out)
            write_results(paired.gate, out.with_name(f"{out.stem}-gate{out.suffix}"))
            for c in paired.comparisons:
                line = (
                    f"{c.snr_db:6.2f} dB  frames={c.frames}  gate={c.gate_frame_errors}  "
                    f"ensemble={c.ensemble_frame_errors}  p={c.p_value:.3g}"
                )
                self.stdout.write(line if c.within_allowance else self.style.WARNING(line))
            self.stdout.write(self.style.SUCCESS(f"Wrote {out}"))
            return
        if options["gate_only"] or model.alpha == 0:
            kind = DecoderKind.GATE
        elif options["wbp"] or model.is_baseline:
            kind = DecoderKind.WBP
        else:
            kind = DecoderKind.ENSEMBLE
        result = run_fer(model, snrs(options), kind=kind, **common)
        write_results(result, out)
        for p in result.points:
            flag = " (censored)" if p.censored else ""
            self.stdout.write(f"{p.snr_db:6.2f} dB  FER={p.fer:.3e}  BER={p.ber:.3e}  frames={p.frames}{flag}")
        self.stdout.write(self.style.SUCCESS(f"Wrote {out}"))
