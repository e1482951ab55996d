"""Print the reliable and frozen positions of a polar code."""

import json

from django.core.management.base import CommandError

from apps.core.cli import code_dims
from apps.core.commands import ConfiguredCommand
from apps.polar.code import bhattacharyya, construct


class Command(ConfiguredCommand):
    help = "Construct a polar code by Bhattacharyya ordering and list its positions"

    def add_arguments(self, parser):
        parser.add_argument("--code", type=code_dims, default=None, help="N_c,N_u, e.g. 64,32")
        parser.add_argument("--design-param", type=float, default=0.5, help="Bhattacharyya design parameter z0")
        parser.add_argument("--show-z", action="store_true", help="Also print every position's parameter")
        parser.add_argument("--json", action="store_true", help="Print the positions as one JSON object")

    def handle(self, *args, **options):
        if options["code"] is None:
            raise CommandError("--code is required")
        block_len, info_len = options["code"]
        code = construct(block_len, info_len, options["design_param"])
        if options["json"]:
            payload = {
                "code": [block_len, info_len],
                "design_param": options["design_param"],
                "reliable": [int(i) for i in code.reliable_positions],
                "frozen": [int(i) for i in code.frozen_positions],
            }
            self.stdout.write(json.dumps(payload))
            return
        self.stdout.write(self.style.SUCCESS(f"Polar code {code.label}, rate {code.rate:.3f}, n_c={code.n_stages}"))
        self.stdout.write(f"reliable: {' '.join(map(str, code.reliable_positions))}")
        self.stdout.write(f"frozen:   {' '.join(map(str, code.frozen_positions))}")
        if options["show_z"]:
            for index, z in enumerate(bhattacharyya(block_len, options["design_param"])):
                self.stdout.write(f"{index:5d} {z:.6e}")
