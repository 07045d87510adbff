"""Command-line front end: compile, run, check, export.

Exit codes: 0 ok, 1 pattern syntax error, 2 construction ambiguity,
3 coloring violation, 4 I/O or artifact error, 5 runtime ambiguity,
6 weight conflicts (from ``check``, or ``compile --strict``).
"""

from __future__ import annotations

import argparse
import sys

from . import artifact
from .analysis import (
    InterleaveSpecError,
    check_coloring,
    find_weight_conflicts,
    is_functional,
    load_interleave_spec,
)
from .core import Policy, Transducer
from .evaluate import AmbiguousOutputError, Evaluator
from .glushkov import AmbiguousPatternError, compile_source
from .parser import PatternSyntaxError
from .syntax import quote

EXIT_OK = 0
EXIT_SYNTAX = 1
EXIT_AMBIGUOUS = 2
EXIT_COLORING = 3
EXIT_IO = 4
EXIT_RUNTIME_AMBIGUOUS = 5
EXIT_CONFLICTS = 6

REJECT_MARKER = "<<REJECT>>"
AMBIGUOUS_MARKER = "<<AMBIGUOUS>>"


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as e:
        return _fail(str(e), e.code)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexfst",
        description="Compile weighted patterns to transducers and run them.",
    )
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("compile", help="compile a pattern file to a machine artifact")
    p.add_argument("pattern", help="file holding one pattern")
    p.add_argument("-a", "--alphabets", help="interleaved-alphabet spec file to check against")
    p.add_argument("-p", "--policy", choices=["min", "max"], default="max")
    p.add_argument("--strict", action="store_true", help="treat weight conflicts as errors")
    p.add_argument("-o", "--output", required=True, help="artifact path to write")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("run", help="evaluate inputs against a compiled machine")
    p.add_argument("machine", help="artifact path")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help="evaluate this string")
    group.add_argument("--stdin", action="store_true", help="evaluate each line of stdin")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("check", help="report functionality and coloring verdicts")
    p.add_argument("machine", help="artifact path")
    p.add_argument("-a", "--alphabets", help="interleaved-alphabet spec file")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("export", help="write a graph description of a machine")
    p.add_argument("machine", help="artifact path")
    p.add_argument("--format", choices=["dot"], default="dot")
    p.set_defaults(func=_cmd_export)

    return parser


def _load_machine(path: str) -> Transducer:
    try:
        return artifact.load_file(path)
    except OSError as e:
        raise _CliError(f"cannot read {path}: {e}", EXIT_IO) from None
    except artifact.ArtifactError as e:
        raise _CliError(f"{path}: {e}", EXIT_IO) from None


def _fail(message: str, code: int) -> int:
    print(f"lexfst: {message}", file=sys.stderr)
    return code


def _cmd_compile(args) -> int:
    try:
        with open(args.pattern, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as e:
        return _fail(f"cannot read {args.pattern}: {e}", EXIT_IO)

    try:
        machine = compile_source(source, Policy(args.policy))
    except PatternSyntaxError as e:
        return _fail(f"{args.pattern}:{e}", EXIT_SYNTAX)
    except AmbiguousPatternError as e:
        return _fail(f"{args.pattern}:{e}", EXIT_AMBIGUOUS)
    except OverflowError as e:
        return _fail(f"{args.pattern}: {e}", EXIT_AMBIGUOUS)

    if args.alphabets:
        try:
            spec = load_interleave_spec(args.alphabets)
        except OSError as e:
            return _fail(f"cannot read {args.alphabets}: {e}", EXIT_IO)
        except InterleaveSpecError as e:
            return _fail(f"{args.alphabets}: {e}", EXIT_IO)
        violations = check_coloring(machine, spec)
        if violations:
            for v in violations:
                print(f"lexfst: coloring: {v.message}", file=sys.stderr)
            return EXIT_COLORING

    witnesses = find_weight_conflicts(machine)
    for w in witnesses:
        print(
            f"lexfst: warning: weight conflict: {w.describe()}; "
            "add weight annotations to disambiguate",
            file=sys.stderr,
        )
    if witnesses and args.strict:
        return EXIT_CONFLICTS

    try:
        artifact.dump_file(machine, args.output)
    except OSError as e:
        return _fail(f"cannot write {args.output}: {e}", EXIT_IO)
    print(
        f"wrote {args.output}: {machine.state_count} states, "
        f"{len(machine.transitions)} transitions, policy {machine.policy.value}"
    )
    return EXIT_OK


def _cmd_run(args) -> int:
    machine = _load_machine(args.machine)
    evaluator = Evaluator(machine)
    inputs = [args.input] if args.input is not None else _stdin_lines()
    ambiguous = False
    for line in inputs:
        try:
            result = evaluator.evaluate(line)
        except AmbiguousOutputError:
            print(AMBIGUOUS_MARKER)
            ambiguous = True
            continue
        except ValueError as e:
            return _fail(str(e), EXIT_IO)
        print(quote(result) if result is not None else REJECT_MARKER)
    return EXIT_RUNTIME_AMBIGUOUS if ambiguous else EXIT_OK


def _stdin_lines():
    for line in sys.stdin:
        yield line.rstrip("\n")


def _cmd_check(args) -> int:
    machine = _load_machine(args.machine)
    report = is_functional(machine)
    if report.certified:
        print("functional: certified")
    else:
        print(f"functional: unknown ({len(report.witnesses)} weight conflicts)")
        for w in report.witnesses:
            print(f"  conflict: {w.describe()}")

    violations = ()
    if args.alphabets:
        try:
            spec = load_interleave_spec(args.alphabets)
        except OSError as e:
            return _fail(f"cannot read {args.alphabets}: {e}", EXIT_IO)
        except InterleaveSpecError as e:
            return _fail(f"{args.alphabets}: {e}", EXIT_IO)
        violations = check_coloring(machine, spec)
        if violations:
            print(f"coloring: {len(violations)} violations")
            for v in violations:
                print(f"  {v.rule}: {v.message}")
        else:
            print("coloring: ok")

    if report.witnesses:
        return EXIT_CONFLICTS
    if violations:
        return EXIT_COLORING
    return EXIT_OK


def _cmd_export(args) -> int:
    machine = _load_machine(args.machine)
    if args.format == "dot":
        sys.stdout.write(to_dot(machine))
    return EXIT_OK


def _dot_symbol(code: int) -> str:
    ch = chr(code)
    if ch.isascii() and ch.isprintable() and ch not in "\"\\":
        return ch
    return f"U+{code:04X}"


def _dot_quote(text: str) -> str:
    # single-quoted effect string inside a dot double-quoted label
    parts = []
    for ch in text:
        if ch == "\\":
            parts.append("\\\\")
        elif ch == '"':
            parts.append('\\"')
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            parts.append(f"U+{ord(ch):04X}")
        else:
            parts.append(ch)
    return "'" + "".join(parts) + "'"


def to_dot(machine: Transducer) -> str:
    """Graphviz rendering: accepting states double-circled with their final
    effect, edges labelled ``[lo-hi] : 'out' / w``."""
    lines = ["digraph machine {", "  rankdir=LR;"]
    for state in range(machine.state_count):
        label = f"q{state}"
        if state == machine.initial:
            label += " (start)"
        color = machine.colors.get(state)
        if color is not None:
            label += f" {color}"
        eff = machine.tau.get(state)
        if eff is not None:
            shape = "doublecircle"
            label += f"\\ntau {_dot_quote(eff.out)} / {eff.w}"
        else:
            shape = "circle"
        lines.append(f'  q{state} [shape={shape}, label="{label}"];')
    for t in machine.transitions:
        edge = (
            f"[{_dot_symbol(t.label.lo)}-{_dot_symbol(t.label.hi)}] : "
            f"{_dot_quote(t.eff.out)} / {t.eff.w}"
        )
        lines.append(f'  q{t.src} -> q{t.dst} [label="{edge}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sys.exit(main())
