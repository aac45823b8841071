"""Command line entry point: ``mps-orf run | scenario | check``."""

import argparse
from concurrent.futures import ProcessPoolExecutor
import logging
import sys

from .errors import ParseError, ResolutionRefused, ScenarioError, ValidationError
from .runner import emit_outputs, run_scenario
from .scenarios import BUILTIN, builtin, load_configs

log = logging.getLogger("mps_orf")

EXIT_OK, EXIT_ERROR, EXIT_REFUSED = 0, 1, 2


def _run_one(scenario, args, jobs):
    report = run_scenario(scenario, force=args.force, jobs=jobs, seed=args.seed)
    return scenario, report


def _execute(scenarios, args):
    jobs = max(1, args.jobs)
    if len(scenarios) > 1 and jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(scenarios))) as ex:
            results = list(ex.map(_run_one, scenarios, [args] * len(scenarios), [1] * len(scenarios)))
    else:
        results = [_run_one(s, args, jobs) for s in scenarios]
    # writing is serialized, in config order
    for scenario, report in results:
        paths = emit_outputs(report, scenario, args.out_dir, args.plots)
        log.info("%s: wrote %d files", scenario.id, len(paths))
        for w in report.warnings:
            log.warning("%s: %s", scenario.id, w)
    return EXIT_OK


def _add_run_options(p):
    p.add_argument("--out-dir", default=None, help="output directory (default: the scenario's)")
    p.add_argument("--plots", action="store_true", help="also write SVG line plots")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--force", action="store_true", help="run even when the grid under-resolves the points")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized spot checks")


def build_parser():
    parser = argparse.ArgumentParser(prog="mps-orf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run scenarios from a JSON config")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON file with one scenario or a list")
    src.add_argument("--scenario", choices=sorted(BUILTIN), help="built-in scenario name")
    _add_run_options(p)

    p = sub.add_parser("scenario", help="run a built-in scenario")
    p.add_argument("name", choices=sorted(BUILTIN))
    _add_run_options(p)

    p = sub.add_parser("check", help="run the acceptance suite and print a pass/fail table")
    p.add_argument("--only", type=int, nargs="*", default=None, help="criterion numbers to run")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "check":
        from .acceptance import print_table, run_all

        results = run_all(args.only)
        print_table(results)
        return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR
    try:
        if args.command == "scenario":
            scenarios = [builtin(args.name)]
        elif args.scenario:
            scenarios = [builtin(args.scenario)]
        else:
            scenarios = load_configs(args.config)
        return _execute(scenarios, args)
    except ResolutionRefused as exc:
        print(f"refused: {exc} (use --force to run anyway)", file=sys.stderr)
        return EXIT_REFUSED
    except (ParseError, ValidationError, ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
