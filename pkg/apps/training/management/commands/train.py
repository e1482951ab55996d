from django.conf import settings
from django.core.management.base import CommandError

from apps.channel.link import build_link
from apps.core.cli import add_code_arguments, snr_list
from apps.core.commands import ConfiguredCommand
from apps.crc.codec import CRC11_POLY
from apps.crc.partition import PartitionKind, PartitionStrategy
from apps.training.trainer import train_baseline, train_ensemble
from apps.training.types import TrainConfig


class Command(ConfiguredCommand):
    help = "Train the alpha WBP members of a CRC-gated ensemble and write the model file"

    def add_arguments(self, parser):
        add_code_arguments(parser)
        parser.add_argument("--alpha", type=int, default=4, help="Number of ensemble members")
        parser.add_argument("--iters", type=int, default=5, help="BP/WBP iterations T")
        parser.add_argument("--snrs", type=snr_list, default=[2.0, 3.0, 4.0, 5.0], help="Training E_b/N_0 points")
        parser.add_argument("--frames-per-snr", type=int, default=100_000)
        parser.add_argument("--epochs", type=int, default=100)
        parser.add_argument("--batches", type=int, default=200, help="Mini-batches per epoch")
        parser.add_argument("--batch-size", type=int, default=None, help="Fixed batch size (default bucket/batches)")
        parser.add_argument("--lr", type=float, default=1e-2)
        parser.add_argument("--eval-every", type=int, default=5, help="Checkpoint cadence in epochs")
        parser.add_argument("--validation-snr", type=float, default=None, help="Draw validation frames at this SNR")
        parser.add_argument("--validation-frames", type=int, default=0, help="Frames simulated for validation")
        parser.add_argument(
            "--strategy", choices=[kind.value for kind in PartitionKind], default=PartitionKind.MSB.value
        )
        parser.add_argument("--mode", choices=["exact", "min_sum"], default="exact")
        parser.add_argument("--rate-mode", choices=["code", "message"], default="code")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument(
            "--baseline",
            action="store_true",
            help="Train one WBP decoder on every frame instead of the gated members",
        )
        parser.add_argument("--out", type=str, default="model.json")

    def handle(self, *args, **options):
        if options["code"] is None:
            raise CommandError("--code is required")
        poly = options["poly"] if options["poly"] is not None else CRC11_POLY
        code, crc = build_link(*options["code"], poly, options["design_param"])
        config = TrainConfig(
            iterations=options["iters"],
            alpha=options["alpha"],
            snrs_db=options["snrs"],
            frames_per_snr=options["frames_per_snr"],
            epochs=options["epochs"],
            batches_per_epoch=options["batches"],
            batch_size=options["batch_size"],
            learning_rate=options["lr"],
            eval_every=options["eval_every"],
            validation_snr_db=options["validation_snr"],
            validation_frames=options["validation_frames"],
            seed=options["seed"] if options["seed"] is not None else settings.POLAR_DEFAULT_SEED,
            rate_mode=options["rate_mode"],
            mode=options["mode"],
        )
        if options["baseline"]:
            model = train_baseline(config, code, crc)
            path = model.save(options["out"])
            self.stdout.write(
                self.style.SUCCESS(
                    f"Trained a baseline WBP for {code.label} on {model.metadata['frames_generated']} frames -> {path}"
                )
            )
            return
        strategy = PartitionStrategy(options["strategy"], options["alpha"])
        model = train_ensemble(config, code, crc, strategy)
        path = model.save(options["out"])
        self.stdout.write(
            self.style.SUCCESS(
                f"Trained {model.alpha} members for {code.label} (buckets {model.metadata['bucket_sizes']}) -> {path}"
            )
        )
