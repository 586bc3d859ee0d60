import argparse
import csv
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn, TextIO

from belieflang.base_evaluator import BaseEvaluator
from belieflang.boolalg import DEFAULT_MAX_ATOMS
from belieflang.errors import BelieflangError, DomainError
from belieflang.evaluator import Evaluator
from belieflang.model import (
    Model,
    adaptedness_violations,
    check_adapted,
    check_pre_adapted,
    load_model,
)
from belieflang.parser import parse_formula
from belieflang.schemas import EvalOptions
from belieflang.utils import count_noun, format_value

PROG = "belieflang"
FORMULA_HELP = "formula text; read from stdin when absent or -"
EXACT_HELP = (
    "print the closest p/q (q <= 10^6) when it equals the float; "
    "this does not certify the computation was exact"
)


class UsageError(Exception):
    """Bad command-line input found after argument parsing."""


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{PROG}: usage: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-m", "--model", required=True, type=Path)
    parser.add_argument("--tol", type=float, default=1e-12)
    parser.add_argument("--max-iter", type=int, default=10_000)
    parser.add_argument("--pre-adapted", action="store_true")
    parser.add_argument("--strict", action="store_true")
    parser.add_argument("--exact", action="store_true", help=EXACT_HELP)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog=PROG,
        description="Evaluate IE formulae on finite stochastic models.",
        epilog=(
            "BELIEFLANG_MAX_ATOMS bounds anchor enumeration "
            f"(default {DEFAULT_MAX_ATOMS})."
        ),
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="validate a model")
    _add_common(check)

    evaluate = commands.add_parser("eval", help="print ⟦φ⟧ as CSV")
    _add_common(evaluate)
    evaluate.add_argument("-f", "--formula", help=FORMULA_HELP)
    evaluate.add_argument("-t", "--time")
    evaluate.add_argument("--trace", type=Path)

    validity = commands.add_parser("validity", help="decide i, ω, t ⊨_ε φ")
    _add_common(validity)
    validity.add_argument("-f", "--formula", help=FORMULA_HELP)
    validity.add_argument("-i", "--agent", required=True)
    validity.add_argument("-w", "--state", required=True)
    validity.add_argument("-t", "--time", required=True)
    validity.add_argument("-e", "--eps", type=float, default=0.0)
    validity.add_argument("--trace", type=Path)

    trace = commands.add_parser(
        "trace", help="iteration trace of the outermost CK/CB"
    )
    _add_common(trace)
    trace.add_argument("-f", "--formula", help=FORMULA_HELP)
    trace.add_argument("-t", "--time", required=True)

    anchors = commands.add_parser(
        "anchors", help="anchor count and derived σ-algebras of a point"
    )
    _add_common(anchors)
    anchors.add_argument("-i", "--agent", required=True)
    anchors.add_argument("-t", "--time", required=True)

    adapted = commands.add_parser("adapted", help="adaptedness verdicts")
    _add_common(adapted)
    return parser


def _options(args: argparse.Namespace) -> EvalOptions:
    return EvalOptions(
        tol=args.tol,
        max_iter=args.max_iter,
        pre_adapted=args.pre_adapted,
        strict=args.strict,
    )


def _write_traces(evaluator: BaseEvaluator, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["formula", "time", "n", "sup_residual", "min_value", "max_value"]
        )
        for trace in evaluator.traces:
            for n, residual, lo, hi in trace.rows():
                writer.writerow(
                    [
                        trace.formula,
                        str(trace.time),
                        n,
                        format(residual, ".12g"),
                        format(lo, ".12g"),
                        format(hi, ".12g"),
                    ]
                )


def _notes(evaluator: BaseEvaluator, err: TextIO) -> None:
    for agent, t, kind in sorted(evaluator.null_hits):
        print(
            f"note: {kind} of {agent} at t={t} has a null block; "
            "conditional expectation is 0 there",
            file=err,
        )


def _formula(args: argparse.Namespace, inp: TextIO) -> str:
    text = args.formula
    if text is None or text == "-":
        text = inp.read().strip()
    if not text:
        raise UsageError("no formula on -f/--formula or stdin")
    return text


def _check_query(model: Model, args: argparse.Namespace) -> None:
    """Reject agents, states, times and ε the model does not declare."""
    eps = getattr(args, "eps", None)
    if eps is not None and not 0 <= eps <= 1:
        raise UsageError(f"-e/--eps must lie in [0, 1], got {eps:g}")
    agent = getattr(args, "agent", None)
    if agent is not None and agent not in model.agents:
        raise UsageError(f"-i/--agent: unknown agent {agent!r}")
    state = getattr(args, "state", None)
    if state is not None and state not in model.omega:
        raise UsageError(f"-w/--state: unknown state {state!r}")
    if getattr(args, "time", None) is not None:
        try:
            model.time_index(args.time)
        except DomainError as e:
            raise UsageError(f"-t/--time: {e}") from None


def _run(
    args: argparse.Namespace, out: TextIO, err: TextIO, inp: TextIO
) -> None:
    options = _options(args)
    model = load_model(args.model, options)
    _check_query(model, args)

    def fmt(value: float) -> str:
        return format_value(value, args.exact)

    match args.command:
        case "check":
            print(
                "model ok: "
                f"{count_noun(len(model.omega), 'state')}, "
                f"{count_noun(len(model.times), 'time')}, "
                f"{count_noun(len(model.agents), 'agent')}",
                file=out,
            )
        case "adapted":
            print(
                f"pre-adapted: {'yes' if check_pre_adapted(model) else 'no'}",
                file=out,
            )
            print(
                f"adapted: {'yes' if check_adapted(model) else 'no'}",
                file=out,
            )
            for violation in adaptedness_violations(model):
                print(f"violation: {violation}", file=out)
        case "anchors":
            evaluator = Evaluator(model, options)
            k = model.time_index(args.time)
            point = model.point(args.agent, k)
            count = evaluator.anchor_count(args.agent, args.time)
            print(f"anchors: {count}", file=out)
            print(f"knowledge: {point.knowledge}", file=out)
            print(f"belief: {point.belief}", file=out)
        case "eval":
            evaluator = Evaluator(model, options)
            phi = parse_formula(_formula(args, inp), model.declarations)
            if args.time is None:
                process = evaluator.interpret(phi)
            else:
                process = evaluator.interpret_at(phi, args.time)
            print("time,state,value", file=out)
            for k, t in enumerate(process.times):
                for w, state in enumerate(process.omega):
                    value = fmt(float(process.values[k, w]))
                    print(f"{fmt(float(t))},{state},{value}", file=out)
            _notes(evaluator, err)
            if args.trace:
                _write_traces(evaluator, args.trace)
        case "validity":
            evaluator = Evaluator(model, options)
            phi = parse_formula(_formula(args, inp), model.declarations)
            result = evaluator.validity(
                args.agent, args.state, args.time, args.eps, phi
            )
            verdict = "HOLDS" if result.holds else "FAILS"
            print(
                f"{verdict} v={fmt(result.value)} "
                f"threshold={fmt(result.threshold)}",
                file=out,
            )
            _notes(evaluator, err)
            if args.trace:
                _write_traces(evaluator, args.trace)
        case "trace":
            evaluator = Evaluator(model, options)
            phi = parse_formula(_formula(args, inp), model.declarations)
            out.write(evaluator.fixpoint(phi, args.time).to_csv())
            _notes(evaluator, err)


def main(
    argv: Sequence[str] | None = None,
    out: TextIO | None = None,
    err: TextIO | None = None,
    inp: TextIO | None = None,
) -> int:
    """Run the command line and return the process exit status.

    0 on success, 1 on usage errors, otherwise the exit code of the
    `BelieflangError` raised.
    """
    out = out or sys.stdout
    err = err or sys.stderr
    inp = inp or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=err,
    )
    try:
        _run(args, out, err, inp)
    except UsageError as e:
        print(f"{PROG}: usage: {e}", file=err)
        return 1
    except BelieflangError as e:
        print(f"{PROG}: {e.slug}: {e}", file=err)
        return e.exit_code
    except (ValueError, OSError) as e:
        print(f"{PROG}: error: {e}", file=err)
        return 1
    return 0
