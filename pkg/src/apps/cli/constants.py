"""Constants for the cli app."""


class ExitCodes:
    SUCCESS = 0
    DOMAIN_FAILURE = 1
    USAGE = 2


# Public subcommand names and the management commands behind them.
SUBCOMMANDS = {
    "gen-scene": "gen_scene",
    "build-fields": "build_fields",
    "train-ad": "train_ad",
    "infer-ad": "infer_ad",
    "plan": "plan",
    "track-phase": "track_phase",
    "build-match-db": "build_match_db",
    "schedule": "schedule",
    "bench": "bench",
    "export-vis": "export_vis",
}

# Options Django adds to every command; they never enter a RunConfig.
DJANGO_OPTIONS = frozenset({
    "verbosity",
    "settings",
    "pythonpath",
    "traceback",
    "no_color",
    "force_color",
    "skip_checks",
    "stdout",
    "stderr",
})


class ErrorMessages:
    UNKNOWN_SUBCOMMAND = "Unknown subcommand {name!r}. Choose from: {choices}."
    BAD_VECTOR = "Expected {count} comma-separated numbers, got {value!r}."
    BAD_RANGE = "Expected a seed range like 0..200, got {value!r}."
    SLICE_OUTSIDE = "The plane {axis} = {at} does not cross the field grid."
