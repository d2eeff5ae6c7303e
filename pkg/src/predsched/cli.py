"""Command line entry point: ``predsched {solve|simulate|error|duel|ingest|sweep}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 a duel whose bound failed.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction

from . import adversaries, algorithms, harness
from .errors import classify
from .intervals import opt_eft, read_intervals, write_intervals
from .workloads import SwfFormatError, read_swf, trace_stats

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path):
    if path == "-":
        return read_intervals(sys.stdin)
    with open(path, encoding="ascii") as fh:
        return read_intervals(fh)


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            yield fh


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _params(text: str) -> dict:
    out = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    solution = opt_eft(_load(args.input))
    with _output(args.out) as out:
        if args.format == "jsonl":
            out.write(json.dumps({"profit": solution.profit,
                                  "chosen": [[iv.start, iv.end] for iv in solution.chosen]}) + "\n")
        else:
            out.write(f"profit {solution.profit}\n")
            write_intervals(solution.chosen, out)
    return EXIT_OK


def cmd_error(args) -> int:
    report = classify(_load(args.input), _load(args.prediction))
    with _output(args.out) as out:
        out.write(report.report_line() + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    sequence = _load(args.input)
    prediction = _load(args.prediction) if args.prediction else []
    name = args.algo
    if name in ("trust", "trustgreedy") and not args.prediction:
        print(f"note: {name} without --prediction uses an empty prediction", file=sys.stderr)
    if name == "crs":
        est = algorithms.CRS(level=args.level, m=args.m, random_state=args.seed)
    elif name == "robusttrust":
        alpha = args.alpha if args.alpha is not None else Fraction(1, 2)
        est = algorithms.RobustTrust(alpha=alpha, m=args.m, random_state=args.seed)
    else:
        est = algorithms.make_scheduler(name)
    est.fit(prediction)
    run = est.run(sequence) if sequence else algorithms.OnlineRun(frozenset(prediction), (), ())

    if name == "robusttrust" or (name == "crs" and args.level is None):
        profit = est.expected_profit(sequence)
        label = "expected_profit"
    else:
        profit = run.profit
        label = "profit"
    with _output(args.out) as out:
        if args.format == "jsonl":
            out.write(json.dumps({label: str(profit), "decisions": run.decision_string}) + "\n")
        else:
            out.write(f"{label} {profit}\n")
            out.write(f"decisions {run.decision_string}\n")
    return EXIT_OK


_DUEL_ARGS = {
    "thm2": ("ell", "p"),
    "thm4": ("epsilon", "ell"),
    "thm5": ("epsilon", "ell"),
    "prop6": ("p", "m"),
}


def cmd_duel(args) -> int:
    params = dict(args.params)
    expected = _DUEL_ARGS[args.construction]
    missing = [k for k in expected if k not in params]
    extra = [k for k in params if k not in expected]
    if missing or extra:
        raise UsageError(
            f"{args.construction} takes params {','.join(expected)}; "
            f"missing {missing or 'none'}, unknown {extra or 'none'}"
        )
    try:
        values = {k: (Fraction(v) if k == "epsilon" else int(v)) for k, v in params.items()}
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad duel parameter: {exc}") from None

    est_params = {}
    if args.algo in ("crs", "robusttrust"):
        est_params["random_state"] = args.seed
    if args.algo == "robusttrust" and args.alpha is not None:
        est_params["alpha"] = args.alpha
    if args.algo == "crs" and args.level is not None:
        est_params["level"] = args.level
    est = algorithms.make_scheduler(args.algo, **est_params)

    if args.construction == "thm2":
        transcript = adversaries.duel_star(est, values["ell"], values["p"])
    elif args.construction == "thm4":
        transcript = adversaries.duel_theorem4(est, values["epsilon"], values["ell"])
    elif args.construction == "thm5":
        if args.algo != "trust":
            raise UsageError("thm5 reads Trust's plan; use --algo trust")
        transcript = adversaries.duel_theorem5(values["epsilon"], values["ell"], est)
    else:
        transcript = adversaries.duel_prop6(est, values["p"], values["m"])

    with _output(args.out) as out:
        for record in transcript.records():
            out.write(json.dumps(record) + "\n")
    if not transcript.bound_satisfied and transcript.deterministic:
        return EXIT_BOUND
    return EXIT_OK


def cmd_ingest(args) -> int:
    trace = read_swf(args.swf)
    stats = trace_stats(trace)
    with _output(args.out) as out:
        write_intervals((job.interval for job in trace.jobs), out)
    sidecar = (args.out if args.out not in (None, "-") else "ingest") + ".json"
    with open(sidecar, "w", encoding="ascii") as fh:
        json.dump({"source": str(args.swf), "N": stats["jobs"], **stats}, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = harness.SweepConfig(
        trace_path=args.swf,
        variant=args.variant,
        steps=args.steps,
        seed=args.seed,
        algorithms=tuple(args.algorithms.split(",")),
        alpha=args.alpha,
    )
    rows = harness.run_sweep(config, workers=args.workers)
    with _output(args.out) as out:
        if args.format == "jsonl":
            harness.emit_jsonl(rows, out, config)
        else:
            harness.emit_csv(rows, out, config)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="unsigned 64-bit seed (default 0)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    parser = _Parser(prog="predsched", description="Online interval scheduling with predictions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="offline optimum of an interval file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("error", parents=[common], help="prediction error report")
    p.add_argument("--input", required=True)
    p.add_argument("--prediction", required=True)
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("simulate", parents=[common], help="run an online algorithm")
    p.add_argument("--algo", required=True, choices=("greedy", "trust", "trustgreedy", "crs", "robusttrust"))
    p.add_argument("--input", required=True)
    p.add_argument("--prediction")
    p.add_argument("--alpha", type=_fraction)
    p.add_argument("--level", type=int)
    p.add_argument("--m", type=int, help="path length in edges (default: largest endpoint)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("duel", parents=[common], help="run a lower-bound adversary")
    p.add_argument("--construction", required=True, choices=tuple(_DUEL_ARGS))
    p.add_argument("--algo", required=True, choices=tuple(algorithms.ALGORITHMS))
    p.add_argument("--params", type=_params, default={})
    p.add_argument("--alpha", type=_fraction)
    p.add_argument("--level", type=int)
    p.set_defaults(func=cmd_duel)

    p = sub.add_parser("ingest", parents=[common], help="convert an SWF trace to intervals")
    p.add_argument("--swf", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sweep", parents=[common], help="prediction-error sweep over a trace")
    p.add_argument("--swf", required=True)
    p.add_argument("--variant", choices=("balanced", "fn_only", "fp_only"), default="balanced")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--algorithms", default=",".join(harness.DEFAULT_ALGORITHMS))
    p.add_argument("--alpha", type=_fraction)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"predsched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, SwfFormatError) as exc:
        print(f"predsched: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
