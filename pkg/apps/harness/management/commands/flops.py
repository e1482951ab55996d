from apps.core.cli import add_code_arguments, add_stop_arguments
from apps.core.commands import ConfiguredCommand
from apps.harness.analysis import flops_curve
from apps.harness.results import write_flops

from ._options import add_model_argument, load_model, seed, snrs, stop_rule


class Command(ConfiguredCommand):
    help = "Expected ensemble latency per SNR from the measured gate failure probability"

    def add_arguments(self, parser):
        add_model_argument(parser)
        add_code_arguments(parser)
        add_stop_arguments(parser)
        parser.add_argument("--out", type=str, default="flops.csv")

    def handle(self, *args, **options):
        model = load_model(options)
        rows = flops_curve(
            model, snrs(options), stop_rule(options), seed(options), options["rate_mode"], options["workers"]
        )
        write_flops(rows, options["out"])
        for row in rows:
            self.stdout.write(
                f"{row.snr_db:6.2f} dB  p={row.gate_fail_prob:.3e}  tau={row.avg_flops:.2f}  "
                f"[{row.lower:.0f}, {row.upper:.0f}]  wbp_T={row.equivalent_wbp_iterations:.2f}"
            )
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['out']}"))
