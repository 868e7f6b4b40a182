from src.apps.cli.base import ToolkitCommand, seed_range
from src.apps.scene.constants import Archetype
from src.apps.scene.generator import GeneratorParams
from src.apps.scheduler.constants import MatchConfig, NavigationConfig
from src.apps.scheduler.matching import build_match_database, write_database
from src.apps.scheduler.navigation import build_navigation_database, write_navigation_database


class Command(ToolkitCommand):
    help = "Build the goal-matching and navigation databases."

    def add_arguments(self, parser):
        parser.add_argument("--seeds", type=seed_range, default=MatchConfig.SEEDS)
        parser.add_argument("--archetype", choices=Archetype.values, default=Archetype.SHELF)
        parser.add_argument("--out", required=True)
        parser.add_argument("--nav-out", default=None)
        parser.add_argument("--nav-count", type=int, default=NavigationConfig.DATABASE_SIZE)
        parser.add_argument("--nav-seed", type=int, default=0)

    def run(self, config, **options):
        db = build_match_database(options["seeds"], GeneratorParams(archetype=options["archetype"]))
        write_database(options["out"], db, config)
        message = f"{options['out']}: {len(db)} entries over {len(db.conditions())} conditions"
        if options["nav_out"]:
            nav = build_navigation_database(options["nav_seed"], options["nav_count"])
            write_navigation_database(options["nav_out"], nav, config)
            message += f"; {options['nav_out']}: {len(nav)} walking segments"
        self.report(message)
