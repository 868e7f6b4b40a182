"""Shared behaviour of the toolkit management commands."""

import argparse
import logging
import re

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from src.apps.common.exceptions import DomainFailure

from .constants import DJANGO_OPTIONS, ErrorMessages, ExitCodes
from .run_config import RunConfig


logger = logging.getLogger(__name__)


def vector_argument(count=3):
    """
    argparse type for ``x,y,z`` style vectors.
    """
    def parse(value):
        try:
            numbers = tuple(float(part) for part in value.split(","))
        except ValueError:
            numbers = ()
        if len(numbers) != count:
            raise argparse.ArgumentTypeError(ErrorMessages.BAD_VECTOR.format(count=count, value=value))
        return numbers
    return parse


def seed_range(value):
    """
    Inclusive ``a..b`` seed range.
    """
    match = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", value)
    if not match or int(match.group(2)) < int(match.group(1)):
        raise argparse.ArgumentTypeError(ErrorMessages.BAD_RANGE.format(value=value))
    return range(int(match.group(1)), int(match.group(2)) + 1)


class ToolkitCommand(BaseCommand):
    """
    Base class for the subcommands. Subclasses implement ``run`` with the
    parsed options and a ``RunConfig``; domain failures surface as a
    one-line ``<code>: <detail>`` error with exit status 1, invalid inputs
    with exit status 2.
    """

    def run_config(self, options):
        params = {
            key: (list(value) if isinstance(value, range) else value)
            for key, value in options.items()
            if key not in DJANGO_OPTIONS
        }
        return RunConfig(self.command_name(), params)

    def command_name(self):
        return self.__module__.rsplit(".", 1)[-1].replace("_", "-")

    def handle(self, *args, **options):
        config = self.run_config(options)
        try:
            return self.run(config, **options)
        except DomainFailure as failure:
            logger.info("%s failed: %s", config.command, failure.diagnostic())
            raise CommandError(failure.diagnostic(), returncode=ExitCodes.DOMAIN_FAILURE) from failure
        except ValidationError as error:
            raise CommandError("invalid: " + " ".join(error.messages), returncode=ExitCodes.USAGE) from error

    def run(self, config, **options):
        raise NotImplementedError("Toolkit commands must implement run().")

    def report(self, message):
        self.stdout.write(message)
