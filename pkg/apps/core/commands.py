"""Base class for the simulation/training management commands.

Adds ``--config FILE``: a dotenv-style ``KEY=value`` file whose keys mirror the
command's flags (``MIN_ERRORS=500``, ``SNR=1:4:0.5``). Flags given explicitly win
over values from the file.
"""

from __future__ import annotations

import argparse
import logging

from django.core.management.base import BaseCommand, CommandError
from dotenv import dotenv_values

from .exceptions import InvalidArgumentError, ResultsIOError

logger = logging.getLogger(__name__)


def _differs(value, default) -> bool:
    if value is default:
        return False
    if value is None or default is None:
        return True
    try:
        return bool(value != default)
    except ValueError:
        # Array-valued options such as --poly.
        return True


class ConfiguredCommand(BaseCommand):
    _argv: list[str] | None = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.add_argument(
            "--config",
            type=str,
            default=None,
            help="dotenv-style file whose KEY=value pairs mirror the flags",
        )
        self._parser = parser
        return parser

    def run_from_argv(self, argv):
        self._argv = list(argv[2:])
        return super().run_from_argv(argv)

    def execute(self, *args, **options):
        if options.get("config"):
            options = self.merge_config(options)
        try:
            return super().execute(*args, **options)
        except (InvalidArgumentError, ResultsIOError) as exc:
            raise CommandError(str(exc)) from exc

    def _explicit(self, parser, options: dict) -> set[str]:
        """Destinations set on the command line (or by a ``call_command`` caller)."""
        if self._argv is not None:
            found = set()
            for token in self._argv:
                action = parser._option_string_actions.get(token.split("=", 1)[0])
                if action is not None:
                    found.add(action.dest)
            return found
        # call_command hands over parsed options only; anything off its default was passed.
        return {
            action.dest
            for action in parser._actions
            if action.dest in options and _differs(options[action.dest], parser.get_default(action.dest))
        }

    def _convert(self, path, key: str, action, raw: str):
        if action.const is True and action.nargs == 0:
            return raw.strip().lower() in ("1", "true", "yes")
        try:
            value = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, TypeError, ValueError) as exc:
            raise CommandError(f"{path}: bad value for {key}: {exc}") from exc
        if action.choices is not None and value not in action.choices:
            raise CommandError(f"{path}: {key} must be one of {', '.join(map(str, action.choices))}")
        return value

    def merge_config(self, options: dict) -> dict:
        path = options["config"]
        values = dotenv_values(path)
        if not values:
            raise CommandError(f"{path}: config file is missing or empty")
        parser = getattr(self, "_parser", None) or self.create_parser(
            "manage.py", self.__module__.rsplit(".", 1)[-1]
        )
        actions = {action.dest: action for action in parser._actions}
        explicit = self._explicit(parser, options)
        merged = dict(options)
        for key, raw in values.items():
            dest = key.strip().lower().replace("-", "_")
            action = actions.get(dest)
            if action is None:
                raise CommandError(f"{path}: unknown key {key!r}")
            if dest in explicit or raw is None:
                continue
            merged[dest] = self._convert(path, key, action, raw)
            logger.debug("config %s: %s=%r", path, dest, merged[dest])
        return merged
