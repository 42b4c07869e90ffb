"""Command-line interface: ``agtic {test,power,map,generate}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
"""

import argparse
import json
import sys
from pathlib import Path

from .bench import ExperimentGrid, export, run_experiment, write_report
from .errors import AgticError, DataError, IoFailure
from .geometry import read_csv, write_csv
from .inference import PermutationPlan, run_test
from .methods import BASELINE_NAMES, make_statistic, parse_agtic_name
from .statistic import AgticConfig, evaluate_grid
from .synthesis import PatternId, PatternSpec, generate, generate_combinatorial

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_samples(path_x, path_y):
    """Read two CSV samples and check that their row counts match."""
    x, y = read_csv(path_x), read_csv(path_y)
    if x.m != y.m:
        raise DataError(f"row counts differ: {path_x} has {x.m} rows, "
                        f"{path_y} has {y.m} rows")
    return x, y


def resolve_method(stat=None, transform=None, mode=None):
    """Combine ``--stat``, ``--transform`` and ``--mode`` into a method name."""
    stat = (stat or "s1").strip().lower()
    if stat in BASELINE_NAMES:
        if transform or mode:
            raise UsageError(f"--transform/--mode do not apply to {stat}")
        return stat
    if stat in ("s1", "s2", "s3"):
        name = (transform or "t1") + stat
        return "pagtic-" + name if mode == "percentile" else name
    parsed = parse_agtic_name(stat)
    if parsed is None:
        raise UsageError(f"unknown statistic {stat!r}")
    t, s, m = parsed
    if transform and transform != t:
        raise UsageError(f"--transform {transform} conflicts with --stat {stat}")
    if mode and mode != m:
        raise UsageError(f"--mode {mode} conflicts with --stat {stat}")
    name = t + s
    return "pagtic-" + name if m == "percentile" else name


def _pattern_id(name):
    try:
        return PatternId(name)
    except ValueError:
        names = ", ".join(p.value for p in PatternId)
        raise UsageError(f"unknown pattern {name!r}; choose from {names}") from None


def _pattern_samples(pattern, m, noise, seed):
    if "+" in pattern:
        a, b = pattern.split("+", 1)
        return generate_combinatorial(_pattern_id(a), _pattern_id(b), m, noise, seed)
    return generate(PatternSpec(_pattern_id(pattern), m, noise, seed))


def _add_method_flags(p):
    p.add_argument("--stat", help="statistic: s1|s2|s3, t<0-3>s<1-3>, "
                   "pagtic-t<0-3>s<1-3>, dcor, rdmcor, r2 or hsic (default s1)")
    p.add_argument("--transform", choices=["t0", "t1", "t2", "t3"],
                   help="GT transform kind (default t1)")
    p.add_argument("--mode", choices=["scale", "percentile"],
                   help="threshold interpretation (default scale)")
    p.add_argument("--k", type=int, default=5, help="threshold levels (default 5)")


def build_parser():
    parser = _Parser(prog="agtic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("test", help="permutation test of independence for two CSV files")
    p.add_argument("--x", required=True, help="CSV file of the first variable")
    p.add_argument("--y", required=True, help="CSV file of the second variable")
    _add_method_flags(p)
    p.add_argument("--perms", type=int, default=99, help="permutations (default 99)")
    p.add_argument("--alpha", type=float, default=0.05, help="test level (default 0.05)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", help="also write the outcome JSON to this file")

    p = sub.add_parser("map", help="AGTIC map: transformed dCor over the threshold grid")
    p.add_argument("--x", help="CSV file of the first variable")
    p.add_argument("--y", help="CSV file of the second variable")
    p.add_argument("--pattern", help="generate data from this pattern instead of CSVs")
    p.add_argument("--m", type=int, default=200, help="sample size for --pattern")
    p.add_argument("--noise", type=float, default=0.0, help="noise sigma for --pattern")
    p.add_argument("--seed", type=int, default=0, help="seed for --pattern")
    _add_method_flags(p)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--svg", help="also render the map as an SVG heatmap")

    p = sub.add_parser("generate", help="write a synthetic pattern as x.csv and y.csv")
    p.add_argument("--pattern", required=True,
                   help="pattern name, or a+b for a two-dimensional combination")
    p.add_argument("--m", type=int, default=200, help="sample size (default 200)")
    p.add_argument("--noise", type=float, default=0.0, help="noise sigma (default 0)")
    p.add_argument("--seed", type=int, default=0, help="seed (default 0)")
    p.add_argument("--out", default=".", help="output directory (default .)")

    p = sub.add_parser("power", help="run a power experiment from a JSON config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes; 0 means one per CPU (default 1)")
    return parser


def _cmd_test(args):
    method = resolve_method(args.stat, args.transform, args.mode)
    x, y = load_samples(args.x, args.y)
    plan = PermutationPlan(args.perms, args.alpha, args.seed)
    stat = make_statistic(method, k=args.k, seed=args.seed)
    outcome = run_test(x, y, stat, plan)
    config = {"method": method, "k": args.k, "x": args.x, "y": args.y}
    text = json.dumps(outcome.to_dict(plan, config), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)


def _cmd_map(args):
    method = resolve_method(args.stat, args.transform, args.mode)
    parsed = parse_agtic_name(method)
    if parsed is None:
        raise UsageError("maps are only defined for AGTIC statistics")
    if args.pattern:
        if args.x or args.y:
            raise UsageError("use either --pattern or --x/--y")
        x, y = _pattern_samples(args.pattern, args.m, args.noise, args.seed)
    elif args.x and args.y:
        x, y = load_samples(args.x, args.y)
    else:
        raise UsageError("map needs --x and --y, or --pattern")
    transform, _, mode = parsed
    evaluation = evaluate_grid(x, y, AgticConfig(transform=transform, mode=mode, k=args.k))
    if args.out:
        export(evaluation, args.out, "csv")
    else:
        sys.stdout.write("l,u,value\n")
        for l, u, v in evaluation.rows():
            sys.stdout.write(f"{l!r},{u!r},{v!r}\n")
    if args.svg:
        export(evaluation, args.svg, "svg")


def _cmd_generate(args):
    x, y = _pattern_samples(args.pattern, args.m, args.noise, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(x, out / "x.csv")
    write_csv(y, out / "y.csv")


def _cmd_power(args):
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from None
    try:
        grid = ExperimentGrid.from_dict(config)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"invalid config: {exc}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    timings = []
    result = run_experiment(grid, workers=args.threads,
                            checkpoint=out / "checkpoint.jsonl", timings=timings)
    write_report(grid, result, out, timings)


COMMANDS = {"test": _cmd_test, "map": _cmd_map, "generate": _cmd_generate,
            "power": _cmd_power}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IoFailure as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (AgticError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
