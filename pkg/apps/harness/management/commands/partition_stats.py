from django.conf import settings
from django.core.management.base import CommandError

from apps.channel.link import build_link
from apps.core.cli import add_code_arguments
from apps.core.commands import ConfiguredCommand
from apps.crc.codec import CRC11_POLY
from apps.crc.partition import PartitionKind, PartitionStrategy
from apps.harness.analysis import crc_histogram, histogram_balance, partition_stats


class Command(ConfiguredCommand):
    help = "Histogram of gate-failed frames over the remainder regions of a partition strategy"

    def add_arguments(self, parser):
        add_code_arguments(parser)
        parser.add_argument("--alpha", type=int, default=4)
        parser.add_argument(
            "--strategy", choices=[kind.value for kind in PartitionKind], default=PartitionKind.MSB.value
        )
        parser.add_argument("--snr", type=float, default=3.0)
        parser.add_argument("--frames", type=int, default=100_000)
        parser.add_argument("--iters", type=int, default=5)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument(
            "--buckets", action="store_true", help="Also build the zero-codeword training buckets and print their sizes"
        )

    def handle(self, *args, **options):
        if options["code"] is None:
            raise CommandError("--code is required")
        poly = options["poly"] if options["poly"] is not None else CRC11_POLY
        code, crc = build_link(*options["code"], poly, options["design_param"])
        strategy = PartitionStrategy(options["strategy"], options["alpha"])
        seed = options["seed"] if options["seed"] is not None else settings.POLAR_DEFAULT_SEED
        counts = crc_histogram(code, crc, strategy, options["snr"], options["frames"], seed, options["iters"])
        for region, count in enumerate(counts, start=1):
            self.stdout.write(f"region {region:3d}: {count}")
        balance = histogram_balance(counts)
        self.stdout.write(
            self.style.SUCCESS(
                f"{int(counts.sum())} gate failures; max deviation {balance['max_deviation']:.1%} of mean, "
                f"max/min {balance['max_min_ratio']:.2f}"
            )
        )
        if options["buckets"]:
            stats = partition_stats(code, crc, strategy, options["snr"], options["frames"], seed, options["iters"])
            self.stdout.write(f"training buckets: {' '.join(map(str, stats['bucket_sizes']))}")
            self.stdout.write(f"{stats['generated']} zero-codeword frames, {stats['discarded']} gate successes dropped")
