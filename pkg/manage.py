#!/usr/bin/env python
"""Command-line utility for toafield tasks and Django administration."""

import os
import sys


def main():
    """
    Run a toolkit subcommand (``gen-scene``, ``plan``, ...) or fall back
    to Django's administrative commands (``migrate``, ``test``, ...).
    """
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.local")

    try:
        from django.core.management import execute_from_command_line

    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    from src.apps.cli.dispatch import SUBCOMMANDS, dispatch

    if len(sys.argv) > 1 and sys.argv[1] in SUBCOMMANDS:
        sys.exit(dispatch(sys.argv))

    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
