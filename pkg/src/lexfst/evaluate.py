"""Machine evaluation: sparse dynamic programming with backtracking.

One column of cells per input position tracks every state the machine can
occupy, each cell remembering the transition that produced it.  After the
last column the best accepting cell is chosen and its backpointer chain
yields the output.  Competing cells compare by transition weight first;
only exact ties walk the chains further back, and the walks stop at the
candidates' first common cell.  Machines free of weight conflicts settle
every comparison in O(1), giving linear evaluation overall; heavily
conflicted machines (which `compile` warns about) can tie repeatedly
across long-separated chains and pay for the walks.

Two interchangeable kernels fill the columns: a compiled extension
(``lexfst._kernel``, built from Cython) and a pure-Python fallback.  The
extension is picked automatically when importable; set the environment
variable ``LEXFST_PURE_PYTHON=1`` to force the fallback.  Results are
identical; see ``benchmarks/bench_eval.py`` for the speed difference.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass

from . import _pykernel
from ._pykernel import AMB_CELL, AMB_FINAL, AMB_NONE, EvalOutcome, MachinePrep
from .core import Transducer, check_text, codes_of

try:
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _kernel = None

if os.environ.get("LEXFST_PURE_PYTHON"):
    _kernel = None

#: backend picked at import time: "c" when the compiled kernel is available
DEFAULT_BACKEND = "c" if _kernel is not None else "python"


class AmbiguousOutputError(RuntimeError):
    """Two equally-weighted paths with different outputs survived.

    Raised during evaluation when the machine turns out not to be
    functional on the given input; machines certified free of weight
    conflicts never trigger this.
    """


@dataclass(frozen=True)
class Cell:
    """Backpointer record: where this state was entered from.

    The start cell uses the sentinel values (-1, -1, 0).
    """

    prev_state: int
    trans: int
    weight: int


_START_CELL = Cell(-1, -1, 0)


class DpTable:
    """The filled evaluation table, one sparse column per input position."""

    def __init__(self, state_count: int, columns: tuple[tuple[tuple[int, Cell], ...], ...]):
        self.state_count = state_count
        self.columns = columns

    def __len__(self) -> int:
        return len(self.columns)

    def cell(self, state: int, col: int) -> Cell | None:
        for s, c in self.columns[col]:
            if s == state:
                return c
        return None

    def column_states(self, col: int) -> tuple[int, ...]:
        return tuple(s for s, _ in self.columns[col])


@dataclass(frozen=True)
class EvalStats:
    cells: int
    probes: int


class Evaluator:
    """Reusable evaluator for one machine; amortizes the flattening work.

    Safe to share across threads: evaluation never mutates the prepared
    arrays.
    """

    def __init__(self, machine: Transducer, backend: str | None = None):
        if backend is None:
            backend = DEFAULT_BACKEND
        if backend not in ("c", "python"):
            raise ValueError(f"unknown backend: {backend!r}")
        if backend == "c" and _kernel is None:
            raise ValueError("compiled kernel is not available")
        self.machine = machine
        self.backend = backend
        self._prep = MachinePrep(machine)

    def _outcome(self, text: str) -> EvalOutcome:
        if self.backend == "c":
            codes = array("q", map(ord, check_text(text)))
            return EvalOutcome(*_kernel.run(self._prep, codes))
        outcome, _ = _pykernel.run_sparse(self._prep, codes_of(text))
        return outcome

    def evaluate(self, text: str) -> str | None:
        """The machine's output for ``text``, or None when it rejects."""
        outcome = self._outcome(text)
        _raise_if_ambiguous(outcome)
        return outcome.output

    def evaluate_with_stats(self, text: str) -> tuple[str | None, EvalStats]:
        outcome = self._outcome(text)
        _raise_if_ambiguous(outcome)
        return outcome.output, EvalStats(outcome.cells, outcome.probes)

    def trace(self, text: str) -> DpTable:
        """Fill and return the table without selecting a result.

        Always runs the Python kernel; the table is an inspection aid.
        """
        _, pool = _pykernel.run_sparse(self._prep, codes_of(text), want_pool=True)
        columns = []
        for col in range(len(pool.col_start) - 1):
            entries = []
            for ci in range(pool.col_start[col], pool.col_start[col + 1]):
                prev = pool.prev[ci]
                cell = Cell(
                    pool.state[prev] if prev >= 0 else -1,
                    pool.trans[ci],
                    pool.weight[ci],
                )
                entries.append((pool.state[ci], cell))
            entries.sort(key=lambda item: item[0])
            columns.append(tuple(entries))
        return DpTable(self.machine.state_count, tuple(columns))


def _raise_if_ambiguous(outcome: EvalOutcome) -> None:
    if outcome.amb_kind == AMB_CELL:
        raise AmbiguousOutputError(
            f"equally-weighted paths with different outputs converge on state "
            f"{outcome.amb_state} after {outcome.amb_pos + 1} symbol(s)"
        )
    if outcome.amb_kind == AMB_FINAL:
        raise AmbiguousOutputError(
            "equally-weighted accepting paths with different outputs at end of input"
        )


def evaluate(machine: Transducer, text: str) -> str | None:
    """One-shot evaluation; build an Evaluator to amortize over many inputs."""
    return Evaluator(machine).evaluate(text)


def trace(machine: Transducer, text: str) -> DpTable:
    """The filled evaluation table for ``text``."""
    return Evaluator(machine).trace(text)


def evaluate_dense(machine: Transducer, text: str) -> str | None:
    """Evaluate via the dense reference matrix; used to cross-check."""
    outcome = _pykernel.run_dense(machine, codes_of(text))
    _raise_if_ambiguous(outcome)
    return outcome.output
