"""Command-line front end: ``braid-coherence <verb> ...``.

Exit codes: 0 for success or a true answer, 1 for a well-formed negative
answer (not equal, not coherent, a failed check), 2 for malformed input or
usage errors. Diagnostics go to stderr; stdout is byte-stable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence, TextIO

from . import __version__
from .braid_core import (
    DEFAULT_CLASS_BUDGET,
    BraidError,
    BraidWord,
    finishing_set,
    format_word,
    is_minimal,
    left_weighted_factorization,
    monoid_equal,
    parse_word,
    starting_set,
    underlying_permutation,
)
from .cubes import (
    DEFAULT_GRID,
    DEFAULT_TOL,
    CubeError,
    NamedPath,
    PathId,
    homotopy_report_lines,
    verify_homotopy,
)
from .rewrite_engine import (
    DEFAULT_CONFLUENCE_BUDGET,
    check_confluence,
    complete_reduce,
    format_trace,
    parse_trace,
    verify_trace,
)
from .term_model import TermError, coherent, format_certificate, parse_cell
from .text_format import FormatError, format_int_list, format_int_set

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2


class UsageError(Exception):
    """Bad command line."""

    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


@dataclass(frozen=True)
class CliResult:
    stdout: str
    stderr: str = ""
    exit_code: int = EXIT_OK


@dataclass(frozen=True)
class _Answer:
    """What a verb produced: text for stdout, a JSON result and the exit code."""

    text: str
    result: Any
    exit_code: int = EXIT_OK
    trace: str | None = None


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit a JSON envelope")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")

    parser = _Parser(prog="braid-coherence", description="Positive braid rewriting and coherence")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name: str, help_text: str) -> _Parser:
        return verbs.add_parser(name, parents=[common], help=help_text)

    for name, help_text in (
        ("perm", "Underlying permutation of a word"),
        ("minimal", "Is the word minimal (no repeated crossing)?"),
        ("startset", "Starting set S(w)"),
        ("finishset", "Finishing set F(w)"),
        ("factor", "Left-weighted factorization tau . omega"),
    ):
        verb(name, help_text).add_argument("word", help='Word such as "3: s1 s2 s1", or - for stdin')

    reduce = verb("reduce", "Complete reduction of a positive word")
    reduce.add_argument("word")
    reduce.add_argument("--trace", metavar="PATH", help="Write the trace to PATH, or - for stdout")
    reduce.add_argument("--budget", type=int, default=DEFAULT_CLASS_BUDGET)

    eq = verb("eq", "Equality in the positive braid monoid")
    eq.add_argument("first")
    eq.add_argument("second")

    coh = verb("coherent", "Decide coherence of two parallel cells")
    coh.add_argument("f")
    coh.add_argument("g")

    ver = verb("verify", "Replay a trace file")
    ver.add_argument("file", nargs="?", default="-")

    conf = verb("confluence", "Explore all reduction strategies of a word")
    conf.add_argument("word")
    conf.add_argument("--budget", type=int, default=DEFAULT_CONFLUENCE_BUDGET)

    cubes = verb("cubes", "Sweep named little cubes paths")
    cubes.add_argument("paths", nargs="*", metavar="PATH_ID")
    cubes.add_argument("--grid", type=int, default=DEFAULT_GRID)
    cubes.add_argument("--side", type=Fraction, default=None)
    cubes.add_argument("--tol", type=float, default=DEFAULT_TOL)
    return parser


def _text(value: str, stdin: TextIO | None) -> str:
    if value != "-":
        return value
    if stdin is None:
        raise UsageError("'-' given but no standard input available")
    return stdin.read()


def _word(value: str, stdin: TextIO | None) -> BraidWord:
    return parse_word(_text(value, stdin).strip())


def _one_stdin(*values: str) -> None:
    if values.count("-") > 1:
        raise UsageError("only one argument may be read from standard input")


def _perm(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    p = underlying_permutation(_word(args.word, stdin))
    return _Answer(format_int_list(p.to_list()), p.to_list())


def _minimal(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    answer = is_minimal(_word(args.word, stdin))
    return _Answer("true" if answer else "false", answer, EXIT_OK if answer else EXIT_NEGATIVE)


def _descents(compute: Callable[[BraidWord], frozenset[int]]):
    def handler(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
        values = compute(_word(args.word, stdin))
        return _Answer(format_int_set(values), sorted(values))

    return handler


def _factor(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    f = left_weighted_factorization(_word(args.word, stdin))
    return _Answer(f"tau: {format_word(f.tau)}\nomega: {format_word(f.omega)}", f.to_dict())


def _reduce(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    trace = complete_reduce(_word(args.word, stdin), budget=args.budget)
    text = format_trace(trace)
    summary = f"target: {format_word(trace.target)}\nlength: {trace.v_count}"
    if args.trace == "-":
        return _Answer(text.rstrip("\n"), trace.to_dict(), trace=text)
    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.debug("wrote trace to %s", args.trace)
    return _Answer(summary, trace.to_dict(), trace=text if args.trace else None)


def _eq(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    _one_stdin(args.first, args.second)
    answer = monoid_equal(_word(args.first, stdin), _word(args.second, stdin))
    return _Answer("EQUAL" if answer else "NOT EQUAL", answer, EXIT_OK if answer else EXIT_NEGATIVE)


def _coherent(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    _one_stdin(args.f, args.g)
    f = parse_cell(_text(args.f, stdin))
    g = parse_cell(_text(args.g, stdin))
    certificate = coherent(f, g)
    if certificate is None:
        return _Answer(
            "NOT COHERENT: permutations differ",
            {"coherent": False, "reason": "permutations differ"},
            EXIT_NEGATIVE,
        )
    text = format_certificate(certificate)
    return _Answer(
        "COHERENT\n" + text.rstrip("\n"),
        {"coherent": True, "certificate": certificate.to_dict()},
        trace=text,
    )


def _verify(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    if args.file == "-":
        text = _text("-", stdin)
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    check = verify_trace(parse_trace(text))
    if check:
        return _Answer("OK", check.to_dict())
    return _Answer(f"FAIL: {check.message}", check.to_dict(), EXIT_NEGATIVE)


def _confluence(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    report = check_confluence(_word(args.word, stdin), args.budget)
    lines = [
        f"source: {format_word(report.source)}",
        f"states: {report.states_explored}{' (partial)' if report.partial else ''}",
        f"targets: {', '.join(format_word(t) for t in report.targets)}",
        f"v_count: {report.expected_v_count}",
        f"max_length: {report.max_reduction_length}",
        f"diamonds: {report.diamonds_checked}",
    ]
    lines.extend(f"failure: {failure}" for failure in report.failures)
    lines.append("PASS" if report else "FAIL")
    return _Answer("\n".join(lines), report.to_dict(), EXIT_OK if report else EXIT_NEGATIVE)


def _cubes(args: argparse.Namespace, stdin: TextIO | None) -> _Answer:
    names = args.paths or [p.value for p in PathId]
    side = args.side
    reports = [
        verify_homotopy(NamedPath.named(name, side), args.grid, args.tol) for name in names
    ]
    lines = [line for report in reports for line in homotopy_report_lines(report)]
    passed = all(reports)
    return _Answer(
        "\n".join(lines),
        [r.to_dict() for r in reports],
        EXIT_OK if passed else EXIT_NEGATIVE,
    )


_HANDLERS: dict[str, Callable[[argparse.Namespace, TextIO | None], _Answer]] = {
    "perm": _perm,
    "minimal": _minimal,
    "startset": _descents(starting_set),
    "finishset": _descents(finishing_set),
    "factor": _factor,
    "reduce": _reduce,
    "eq": _eq,
    "coherent": _coherent,
    "verify": _verify,
    "confluence": _confluence,
    "cubes": _cubes,
}


def _inputs(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"verb", "json", "verbose"}
    return {
        key: (str(value) if isinstance(value, Fraction) else value)
        for key, value in vars(args).items()
        if key not in skip
    }


def _envelope(args: argparse.Namespace, answer: _Answer) -> str:
    body: dict[str, Any] = {"verb": args.verb, "input": _inputs(args), "result": answer.result}
    if answer.trace is not None:
        body["trace"] = answer.trace
    return json.dumps(body, indent=2)


def run(argv: Sequence[str], stdin: TextIO | None = None) -> CliResult:
    """Run one command line and return what it prints and its exit code."""
    try:
        args = _build_parser().parse_args(list(argv))
    except UsageError as e:
        return CliResult("", f"error: {e}\n", EXIT_INPUT_ERROR)
    except SystemExit as e:
        # --help and --version print directly and exit
        return CliResult("", "", int(e.code or 0))

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)

    try:
        answer = _HANDLERS[args.verb](args, stdin)
    except (FormatError, BraidError, TermError, CubeError, UsageError, OSError) as e:
        return CliResult("", f"error: {e}\n", EXIT_INPUT_ERROR)

    out = _envelope(args, answer) if args.json else answer.text
    return CliResult(out + "\n", "", answer.exit_code)


def main() -> None:
    result = run(sys.argv[1:], sys.stdin)
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
