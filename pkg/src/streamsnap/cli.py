"""``streamsnap`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 data error (bad records, empty stream, out-of-domain values).
"""

from __future__ import annotations

import argparse
import sys
from typing import IO, Sequence

from . import exact, harness, limits, suites
from .ensemble import TargetSet, coverage_size
from .errors import (
    DomainError,
    RecordError,
    ScheduleParseError,
    ScheduleRangeError,
    UnsupportedRegimeError,
)
from .ingest import RunConfig, parse_schedule, read_records, render, run_stream, write_trace_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def _schedule_arg(text: str):
    try:
        return parse_schedule(text)
    except (ScheduleParseError, ScheduleRangeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _targets_arg(text: str) -> TargetSet:
    try:
        return TargetSet.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streamsnap", description="Probabilistic snapshots of a data stream.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="feed a stream through an ensemble of samplers")
    run.add_argument("--schedule", type=_schedule_arg, required=True, help="uniform | constant:<a> | power:<g>,<alpha>")
    run.add_argument("--ensemble", type=int, default=1, metavar="M", help="number of independent samplers")
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--targets", type=_targets_arg, default=TargetSet(), help="fractions, e.g. 1/10,1/2 (default deciles)")
    run.add_argument("--trace", action="store_true", help="also emit the quality Q after every item")
    run.add_argument("--trace-output", metavar="PATH", help="write the trace CSV here instead of after the snapshots")
    run.add_argument("--endpoints", action="store_true", help="add the first and last records to the report")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("-o", "--output", metavar="PATH", help="write the report here instead of stdout")
    run.add_argument("input", nargs="?", default="-", help="input file (default: stdin)")

    an = sub.add_parser("analyze", help="exact distribution and asymptotic predictions")
    an.add_argument("--schedule", type=_schedule_arg, required=True)
    an.add_argument("--n", type=int, required=True)
    an.add_argument("--k", type=int)

    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("--suite", choices=("all", *suites.SUITES), default="all")
    ver.add_argument("--seed", type=int, required=True)
    ver.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS, help="Monte-Carlo trials per check")

    cov = sub.add_parser("coverage", help="ensemble size needed to cover every target")
    cov.add_argument("--epsilon", type=float, required=True)
    cov.add_argument("--eta", type=float, required=True)
    cov.add_argument("--targets", type=int, default=9, help="number of target points")
    return p


def _open_input(path: str) -> IO[str]:
    if path == "-":
        return sys.stdin
    return open(path, newline="", encoding="utf-8")


def cmd_run(args, out: IO[str], err: IO[str]) -> int:
    if args.ensemble < 1:
        err.write("streamsnap: --ensemble must be >= 1\n")
        return EXIT_USAGE
    fmt_trace_inline = args.trace and not args.trace_output
    config = RunConfig(
        schedule=args.schedule,
        ensemble=args.ensemble,
        seed=args.seed,
        targets=args.targets,
        fmt=args.format,
        trace=args.trace,
        endpoints=args.endpoints,
        input_path=None if args.input == "-" else args.input,
    )
    try:
        src = _open_input(args.input)
    except OSError as exc:
        err.write(f"streamsnap: {exc}\n")
        return EXIT_DATA
    try:
        result = run_stream(config, read_records(src))
    except RecordError as exc:
        err.write(f"streamsnap: malformed input: {exc}\n")
        return EXIT_DATA
    finally:
        if src is not sys.stdin:
            src.close()

    if not fmt_trace_inline:
        config.trace = False
    text = render(result)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.trace_output:
        with open(args.trace_output, "w", encoding="utf-8", newline="") as fh:
            write_trace_csv(result.trace, fh)
    if result.empty:
        err.write("streamsnap: empty stream: no records read\n")
        return EXIT_DATA
    return EXIT_OK


def cmd_analyze(args, out: IO[str], err: IO[str]) -> int:
    s, n = args.schedule, args.n
    r = limits.regime_of(s)
    lines = [
        f"schedule\t{s.spec}",
        f"regime\t{r.regime.value}\tg={r.g!r}\talpha={r.alpha!r}",
        f"n\t{n}",
        f"expected_k\t{exact.expected_k(s, n)!r}",
        f"expected_l\t{exact.expected_l(s, n)!r}",
    ]
    if r.regime.has_limit_law:
        lines.append(f"predicted_expected_k\t{limits.expected_k_asymptotic(r, n)!r}")
    elif r.regime is limits.Regime.SUPERQUADRATIC_L:
        lines.append(f"bound_expected_l\t{limits.expected_l_asymptotic(r, n)!r}")
    else:
        lines.append(f"predicted_expected_l\t{limits.expected_l_asymptotic(r, n)!r}")
    lines.append("k\tpmf\tsurvival\tpmf_l")
    if args.k is not None:
        k = args.k
        lines.append(f"{k}\t{exact.pmf(s, n, k)!r}\t{exact.survival(s, n, k)!r}\t{exact.pmf_l(s, n, k)!r}")
    else:
        pmf = exact.pmf_table(s, n)
        surv = exact.survival_table(s, n)
        for k in range(1, n + 1):
            lines.append(f"{k}\t{float(pmf[k - 1])!r}\t{float(surv[k - 1])!r}\t{float(pmf[n - k])!r}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args, out: IO[str], err: IO[str]) -> int:
    if args.trials < 1:
        err.write("streamsnap: --trials must be >= 1\n")
        return EXIT_USAGE
    failed = total = 0
    for report in suites.run_suite(args.suite, args.seed, args.trials):
        out.write(report.to_line() + "\n")
        out.flush()
        total += 1
        failed += not report.passed
    err.write(f"streamsnap: {total - failed}/{total} checks passed\n")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_coverage(args, out: IO[str], err: IO[str]) -> int:
    out.write(f"{coverage_size(args.epsilon, args.eta, args.targets)}\n")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "analyze": cmd_analyze, "verify": cmd_verify, "coverage": cmd_coverage}


def main(argv: Sequence[str] | None = None, out: IO[str] | None = None, err: IO[str] | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out, err)
    except (DomainError, UnsupportedRegimeError) as exc:
        err.write(f"streamsnap: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
