import argparse
import contextlib
import logging
import os
import sys

from formats import *

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_DISCREPANCY = 4

VERIFY_TOL = 1e-6
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def configure_logging( verbosity ):
    if verbosity > 0:
        level = logging.DEBUG if verbosity > 1 else logging.INFO
    else:
        level = os.environ.get("APPROX_LOG_LEVEL", "WARNING").upper()
        if level not in LOG_LEVELS:
            raise InvalidParameter(f"APPROX_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)

def search_config( args ):
    return SearchConfig.from_env(budget=args.budget, workers=args.workers, stop_rule=args.stop_rule)

def open_output( path ):
    if path is None:
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")

def text_report( report ):
    lines = []
    for key in ["distance", "minimal_n", "support", "weights", "evaluated_supports", "certified", "fallback",
                "oracle_distance", "discrepancy"]:
        if key not in report:
            continue
        value = report[key]
        if isinstance(value, float):
            value = number(value)
        elif isinstance(value, list):
            value = " ".join(number(v) if isinstance(v, float) else str(v) for v in value)
        lines = lines + [f"{key}: {value}"]
    trace = report["case_trace"]
    lines = lines + ["case_trace: " + ", ".join(f"{outcome}={count}" for outcome, count in sorted(trace.items()))]
    return "\n".join(lines) + "\n"

def cmd_solve( args ):
    target = load_target(args.target)
    state_set = load_state_set(args.set)
    check_same_dim(target, state_set)
    if args.strict:
        problems = []
        for name, r in [("target", target)] + [(f"state {i}", r) for i, r in enumerate(state_set)]:
            report = validate_state(r, strict=True)
            problems = problems + [f"{name}: {p}" for p in report.problems]
        if problems:
            for p in problems:
                logger.error("%s", p)
            return EXIT_INVALID

    solution = Approximator(search_config(args)).solve(target, state_set)
    report = solution_report(solution, state_set.labels)
    status = EXIT_OK
    if args.verify:
        oracle = projected_gradient(target, state_set)
        report["oracle_distance"] = oracle.distance
        report["discrepancy"] = abs(solution.distance - oracle.distance)
        if report["discrepancy"] > VERIFY_TOL:
            logger.error("closed-form distance %.12g differs from the oracle's %.12g", solution.distance, oracle.distance)
            status = EXIT_DISCREPANCY

    if args.json:
        write_json(report, args.out)
    else:
        with open_output(args.out) as stream:
            stream.write(text_report(report))
    return status

def cmd_sweep( args ):
    if args.fixture is not None:
        fixture = get_fixture(args.fixture)
        family = fixture.family(args.variant)
        state_set = fixture.states
        for note in fixture.notes:
            logger.info("%s: %s", fixture.name, note)
    else:
        if args.target_a is None or args.target_b is None or args.set is None:
            raise InvalidParameter("sweep needs --fixture, or all of --target-a, --target-b and --set")
        family = TargetFamily(load_target(args.target_a), load_target(args.target_b))
        state_set = load_state_set(args.set)
    records = Approximator(search_config(args)).profile(family, state_set, uniform_grid(args.k_steps))
    logger.info("sweep finished: %d rows, max n = %d", len(records), max(r.minimal_n for r in records))
    with open_output(args.out) as stream:
        write_sweep_csv(records, stream)
    return EXIT_OK

def cmd_random( args ):
    state_set = random_state_set(args.d, args.n, args.seed)
    write_json(state_set_to_json(state_set), args.out)
    return EXIT_OK

def cmd_fixtures( args ):
    if args.list:
        for fixture in list_fixtures():
            sys.stdout.write(f"{fixture.name} d={fixture.dim} N={fixture.N} variants={','.join(fixture.variants)}\n")
        return EXIT_OK
    fixture = get_fixture(args.dump)
    for note in fixture.notes:
        logger.warning("%s: %s", fixture.name, note)
    write_json(fixture_to_json(fixture), args.out)
    return EXIT_OK


def add_search_flags( parser ):
    parser.add_argument("--budget", type=int, default=None, help="maximum number of supports to enumerate (default: APPROX_BUDGET or 1000000)")
    parser.add_argument("--workers", type=int, default=None, help="threads used per level or per sweep row")
    parser.add_argument("--stop-rule", choices=STOP_RULES, default=None, help="when the level descent stops (default: certified)")

def build_parser():
    parser = argparse.ArgumentParser(prog="approx", description="Closest convex mixture of quantum states under the Hilbert-Schmidt distance.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr (repeatable)")
    commands = parser.add_subparsers(dest="command", required=True)

    solve_parser = commands.add_parser("solve", help="approximate one target with one state set")
    solve_parser.add_argument("--target", required=True, help="target state JSON file")
    solve_parser.add_argument("--set", required=True, help="state set JSON file")
    solve_parser.add_argument("--strict", action="store_true", help="reject inputs that are not physical states")
    solve_parser.add_argument("--verify", action="store_true", help="cross-check the distance with the projected-gradient oracle")
    solve_parser.add_argument("--json", action="store_true", help="print the full report as JSON")
    solve_parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    add_search_flags(solve_parser)
    solve_parser.set_defaults(handler=cmd_solve)

    sweep_parser = commands.add_parser("sweep", help="solve along k r_o1 + (1-k) r_o2 and write CSV")
    sweep_parser.add_argument("--fixture", default=None, help="built-in fixture name")
    sweep_parser.add_argument("--variant", default=None, help="fixture target variant")
    sweep_parser.add_argument("--target-a", default=None, help="r_o1 file (k = 1 end)")
    sweep_parser.add_argument("--target-b", default=None, help="r_o2 file (k = 0 end)")
    sweep_parser.add_argument("--set", default=None, help="state set JSON file")
    sweep_parser.add_argument("--k-steps", type=int, default=101, help="grid points including both ends")
    sweep_parser.add_argument("--out", default=None, help="CSV output file (default: stdout)")
    add_search_flags(sweep_parser)
    sweep_parser.set_defaults(handler=cmd_sweep)

    random_parser = commands.add_parser("random", help="write a seeded set of Ginibre states")
    random_parser.add_argument("--d", type=int, required=True)
    random_parser.add_argument("--n", type=int, required=True)
    random_parser.add_argument("--seed", type=int, required=True)
    random_parser.add_argument("--out", default=None)
    random_parser.set_defaults(handler=cmd_random)

    fixtures_parser = commands.add_parser("fixtures", help="list or dump the built-in fixtures")
    group = fixtures_parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--list", action="store_true")
    group.add_argument("--dump", metavar="NAME")
    fixtures_parser.add_argument("--out", default=None)
    fixtures_parser.set_defaults(handler=cmd_fixtures)
    return parser

def main( argv=None ):
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.verbose)
        return args.handler(args)
    except (FormatError, NotHermitian, OSError) as error:
        logger.error("%s", error)
        return EXIT_PARSE
    except ApproxError as error:
        logger.error("%s", error)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
