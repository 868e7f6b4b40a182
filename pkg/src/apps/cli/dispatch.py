"""Entry point mapping ``toafield <subcommand>`` onto management commands."""

import os
import sys

from .constants import SUBCOMMANDS, ErrorMessages, ExitCodes


def dispatch(argv):
    """
    Run the subcommand named by ``argv[1]`` and return its exit status.
    """
    if len(argv) < 2 or argv[1] not in SUBCOMMANDS:
        name = argv[1] if len(argv) > 1 else ""
        sys.stderr.write(
            "usage: " + ErrorMessages.UNKNOWN_SUBCOMMAND.format(name=name, choices=", ".join(SUBCOMMANDS)) + "\n"
        )
        return ExitCodes.USAGE

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.local")
    from django.core.management import execute_from_command_line

    try:
        execute_from_command_line([argv[0], SUBCOMMANDS[argv[1]], *argv[2:]])
    except SystemExit as exit:
        if exit.code is None:
            return ExitCodes.SUCCESS
        return exit.code if isinstance(exit.code, int) else ExitCodes.DOMAIN_FAILURE
    return ExitCodes.SUCCESS


def main():
    sys.exit(dispatch(sys.argv))
