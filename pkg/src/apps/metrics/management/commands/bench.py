from functools import partial
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from src.apps.autodecoder.checkpoints import read_checkpoint
from src.apps.cli.base import ToolkitCommand, seed_range
from src.apps.metrics.benchmark import benchmark, rotating_archetypes, write_report_csv, write_report_json
from src.apps.metrics.constants import BenchConfig, BenchPlanner
from src.apps.metrics.models import BenchRun
from src.apps.scene.constants import Archetype, GridConfig
from src.apps.scene.generator import GeneratorParams, generate_scene


MIXED = "mixed"


class Command(ToolkitCommand):
    help = "Benchmark a wrist planner over generated scenes and write a JSON and CSV report."

    def add_arguments(self, parser):
        parser.add_argument("--seeds", type=seed_range, default=BenchConfig.SEEDS)
        parser.add_argument("--planner", choices=BenchPlanner.values, default=BenchPlanner.FIELD)
        parser.add_argument("--out", required=True, help="JSON report.")
        parser.add_argument("--csv", default=None, help="CSV report; next to the JSON report by default.")
        parser.add_argument("--archetype", choices=[MIXED, *Archetype.values], default=MIXED)
        parser.add_argument("--window", type=float, default=BenchConfig.CONTACT_WINDOW)
        parser.add_argument("--weights", default=None, help="Decoder checkpoint for the field-ad planner.")
        parser.add_argument("--h", type=float, default=GridConfig.SPACING)
        parser.add_argument("--record", action="store_true", help="Store the run in the run registry.")

    def run(self, config, **options):
        decoder = None
        if options["planner"] == BenchPlanner.FIELD_AD:
            if not options["weights"]:
                raise CommandError("The field-ad planner needs --weights.", returncode=2)
            decoder, _ = read_checkpoint(options["weights"])

        if options["archetype"] == MIXED:
            params = GeneratorParams(spacing=options["h"])
            source = partial(rotating_archetypes, params=params)
        else:
            params = GeneratorParams(archetype=options["archetype"], spacing=options["h"])
            source = partial(generate_scene, params=params)

        report = benchmark(
            options["seeds"],
            options["planner"],
            window=options["window"],
            threads=settings.TOAFIELD_THREADS,
            decoder=decoder,
            params=params,
            source=source,
        )
        csv_path = options["csv"] or Path(options["out"]).with_suffix(".csv")
        write_report_json(options["out"], report, config)
        write_report_csv(csv_path, report, config)
        if options["record"]:
            BenchRun.record(report, config)

        aggregate = report.aggregate()
        self.report(
            f"{options['out']}: {aggregate['scenes']} scenes, {aggregate['success_rate']:.1f}% success"
        )
