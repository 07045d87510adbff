"""Line-based text serialization of compiled machines.

Format (UTF-8, one record per line):

    FST1
    policy min|max
    states <N>
    initial <K>
    state <id> [tau '<out>' <w>] [color <name>]     # one line per state
    trans <src> <lo> <hi> <dst> '<out>' <w>         # lo/hi are decimal code points

Quoted strings use the same escapes as pattern literals.  Saving and
re-loading reproduces the machine exactly, including transition order.
"""

from __future__ import annotations

from .core import Effect, Policy, RangeLabel, Transducer, Transition
from .syntax import quote, scan_quoted

MAGIC = "FST1"


class ArtifactError(ValueError):
    pass


def dumps(machine: Transducer) -> str:
    lines = [
        MAGIC,
        f"policy {machine.policy.value}",
        f"states {machine.state_count}",
        f"initial {machine.initial}",
    ]
    for state in range(machine.state_count):
        parts = ["state", str(state)]
        eff = machine.tau.get(state)
        if eff is not None:
            parts += ["tau", quote(eff.out), str(eff.w)]
        color = machine.colors.get(state)
        if color is not None:
            parts += ["color", color]
        lines.append(" ".join(parts))
    for t in machine.transitions:
        lines.append(
            f"trans {t.src} {t.label.lo} {t.label.hi} {t.dst} {quote(t.eff.out)} {t.eff.w}"
        )
    return "\n".join(lines) + "\n"


def loads(text: str) -> Transducer:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ArtifactError(f"not a machine artifact (missing {MAGIC} header)")

    def fail(lineno: int, message: str) -> ArtifactError:
        return ArtifactError(f"line {lineno}: {message}")

    def header(lineno: int, key: str) -> str:
        if lineno > len(lines):
            raise ArtifactError(f"truncated artifact, missing '{key}' line")
        fields = lines[lineno - 1].split()
        if len(fields) != 2 or fields[0] != key:
            raise fail(lineno, f"expected '{key} <value>'")
        return fields[1]

    policy_name = header(2, "policy")
    try:
        policy = Policy(policy_name)
    except ValueError:
        raise fail(2, f"unknown policy {policy_name!r}") from None
    state_count = _int(header(3, "states"), 3)
    initial = _int(header(4, "initial"), 4)

    tau: dict[int, Effect] = {}
    colors: dict[int, str] = {}
    transitions: list[Transition] = []
    expected_state = 0
    lineno = 4
    for raw in lines[4:]:
        lineno += 1
        if not raw.strip():
            continue
        try:
            fields = _fields(raw)
        except ValueError as e:
            raise fail(lineno, str(e)) from None
        kind = fields[0]
        if kind == ("word", "state"):
            if expected_state >= state_count:
                raise fail(lineno, "more state lines than declared states")
            sid = _int(_word(fields, 1, lineno), lineno)
            if sid != expected_state:
                raise fail(lineno, f"state lines must be dense and ordered; expected {expected_state}")
            expected_state += 1
            i = 2
            if i < len(fields) and fields[i] == ("word", "tau"):
                if i + 2 >= len(fields) or fields[i + 1][0] != "str":
                    raise fail(lineno, "expected tau '<out>' <w>")
                out = fields[i + 1][1]
                w = _int(_word(fields, i + 2, lineno), lineno)
                tau[sid] = Effect(out, w)
                i += 3
            if i < len(fields) and fields[i] == ("word", "color"):
                if i + 1 >= len(fields):
                    raise fail(lineno, "expected color <name>")
                colors[sid] = _word(fields, i + 1, lineno)
                i += 2
            if i != len(fields):
                raise fail(lineno, "trailing fields on state line")
        elif kind == ("word", "trans"):
            if len(fields) != 7 or fields[5][0] != "str":
                raise fail(lineno, "expected trans <src> <lo> <hi> <dst> '<out>' <w>")
            src = _int(_word(fields, 1, lineno), lineno)
            lo = _int(_word(fields, 2, lineno), lineno)
            hi = _int(_word(fields, 3, lineno), lineno)
            dst = _int(_word(fields, 4, lineno), lineno)
            out = fields[5][1]
            w = _int(_word(fields, 6, lineno), lineno)
            try:
                label = RangeLabel(lo, hi)
            except ValueError as e:
                raise fail(lineno, str(e)) from None
            transitions.append(Transition(src, label, dst, Effect(out, w)))
        else:
            raise fail(lineno, f"unrecognized record {raw.strip()!r}")

    if expected_state != state_count:
        raise ArtifactError(
            f"artifact declares {state_count} states but lists {expected_state}"
        )
    try:
        return Transducer(
            state_count=state_count,
            initial=initial,
            transitions=tuple(transitions),
            tau=tau,
            colors=colors,
            policy=policy,
        )
    except ValueError as e:
        raise ArtifactError(str(e)) from None


def dump_file(machine: Transducer, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(machine))


def load_file(path) -> Transducer:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _fields(line: str) -> list[tuple[str, str]]:
    fields: list[tuple[str, str]] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch == " ":
            i += 1
            continue
        if ch == "'":
            value, i = scan_quoted(line, i)
            fields.append(("str", value))
            continue
        j = i
        while j < n and line[j] != " ":
            j += 1
        fields.append(("word", line[i:j]))
        i = j
    return fields


def _word(fields: list[tuple[str, str]], i: int, lineno: int) -> str:
    if i >= len(fields) or fields[i][0] != "word":
        raise ArtifactError(f"line {lineno}: malformed record")
    return fields[i][1]


def _int(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ArtifactError(f"line {lineno}: expected an integer, found {text!r}") from None
