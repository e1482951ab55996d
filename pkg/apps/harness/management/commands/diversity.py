from apps.core.commands import ConfiguredCommand
from apps.harness.analysis import diversity_report

from ._options import add_model_argument, load_model, seed


class Command(ConfiguredCommand):
    help = "Which members decode the gate-failed frames of each remainder region"

    def add_arguments(self, parser):
        add_model_argument(parser)
        parser.add_argument("--frames", type=int, default=10_000)
        parser.add_argument("--snr", type=float, default=3.0)
        parser.add_argument("--seed", type=int, default=None)

    def handle(self, *args, **options):
        model = load_model(options)
        report = diversity_report(model, options["frames"], seed(options), options["snr"])
        header = "region  frames  " + "  ".join(f"m{i:<3d}" for i in range(1, report.alpha + 1))
        self.stdout.write(header)
        for j in range(report.alpha):
            correct = "  ".join(f"{c:<4d}" for c in report.counts[j])
            missed = "  ".join(f"{c:<4d}" for c in report.designated_fail[j])
            self.stdout.write(f"{j + 1:<6d}  {report.region_totals[j]:<6d}  {correct}")
            self.stdout.write(f"{'':<6s}  {'rescue':<6s}  {missed}")
        self.stdout.write(self.style.SUCCESS(f"{int(report.region_totals.sum())} gate-failed frames analysed"))
