"""Pure-Python evaluation kernel plus the machine flattening it runs on.

The compiled extension (``lexfst._kernel``) performs the same sparse column
fill over the same flattened arrays; this module is the fallback and the
behavioural reference for it.  ``run_dense`` is an independent fill over an
explicit state x position matrix (and a brute-force transition scan instead
of the breakpoint index), kept around to cross-check the sparse path.

Candidate resolution is order independent: each cell keeps the best
incoming candidate under the machine's policy, plus a flag that records
whether two best candidates with different resolved outputs tied.  A
strictly better candidate clears the flag, so after all candidates arrive
the flag is set exactly when the cell's optimum is output-ambiguous.
"""

from __future__ import annotations

from array import array
from bisect import bisect_left
from typing import NamedTuple

from .core import Policy, Transducer
from .rangeindex import RangeIndex

AMB_NONE = 0
AMB_CELL = 1
AMB_FINAL = 2


class MachinePrep:
    """Transducer flattened into parallel arrays for the kernels."""

    __slots__ = (
        "n_states",
        "initial",
        "policy_is_max",
        "trans_dst",
        "trans_w",
        "trans_out",
        "bp_off",
        "bp_val",
        "row_off",
        "row_trans",
        "tau_has",
        "tau_w",
        "tau_out",
    )

    def __init__(self, machine: Transducer):
        n = machine.state_count
        ts = machine.transitions
        self.n_states = n
        self.initial = machine.initial
        self.policy_is_max = machine.policy is Policy.MAX
        self.trans_dst = array("q", (t.dst for t in ts))
        self.trans_w = array("q", (t.eff.w for t in ts))
        self.trans_out = [t.eff.out for t in ts]

        by_src = machine.transitions_by_source()
        bp_off = array("q", [0])
        bp_val = array("q")
        row_off = array("q", [0])
        row_trans = array("q")
        for ids in by_src:
            if ids:
                index = RangeIndex.build([ts[i].label for i in ids])
                for point, row in zip(index.breakpoints, index.rows):
                    bp_val.append(point)
                    for local in row:
                        row_trans.append(ids[local])
                    row_off.append(len(row_trans))
            bp_off.append(len(bp_val))
        self.bp_off = bp_off
        self.bp_val = bp_val
        self.row_off = row_off
        self.row_trans = row_trans

        self.tau_has = bytearray(n)
        self.tau_w = array("q", bytes(8 * n))
        self.tau_out: list[str | None] = [None] * n
        for state, eff in machine.tau.items():
            self.tau_has[state] = 1
            self.tau_w[state] = eff.w
            self.tau_out[state] = eff.out


class EvalOutcome(NamedTuple):
    accepted: bool
    output: str | None
    amb_kind: int  # AMB_NONE / AMB_CELL / AMB_FINAL
    amb_pos: int  # input index for AMB_CELL, input length for AMB_FINAL
    amb_state: int
    cells: int
    probes: int


class Pool(NamedTuple):
    """Sparse cell storage: parallel lists plus column offsets."""

    state: list[int]
    prev: list[int]  # index into the pool, -1 for the start cell
    trans: list[int]  # transition id, -1 for the start cell
    weight: list[int]
    col_start: list[int]


def _cmp_tail(prev, weight, a: int, b: int) -> int:
    # Compare the weight sequences of two same-column cells, last step first.
    while a != b:
        wa = weight[a]
        wb = weight[b]
        if wa != wb:
            return 1 if wa > wb else -1
        a = prev[a]
        b = prev[b]
    return 0


def _path_output(prev, trans, trans_out, cell: int) -> str:
    parts = []
    while trans[cell] >= 0:
        parts.append(trans_out[trans[cell]])
        cell = prev[cell]
    parts.reverse()
    return "".join(parts)


def _segments_to_ancestor(prev, trans, trans_out, a: int, b: int) -> tuple[str, str]:
    # Outputs emitted since the two chains diverged; everything before the
    # common ancestor cell is shared, so resolved outputs differ exactly
    # when these segments (plus whatever the caller appends) differ.
    ids_a: list[int] = []
    ids_b: list[int] = []
    while a != b:
        ids_a.append(trans[a])
        ids_b.append(trans[b])
        a = prev[a]
        b = prev[b]
    seg_a = "".join(trans_out[t] for t in reversed(ids_a))
    seg_b = "".join(trans_out[t] for t in reversed(ids_b))
    return seg_a, seg_b


def run_sparse(prep: MachinePrep, codes, want_pool: bool = False):
    """Fill columns sparsely; returns (EvalOutcome, Pool or None)."""
    bp_off = prep.bp_off
    bp_val = prep.bp_val
    row_off = prep.row_off
    row_trans = prep.row_trans
    tdst = prep.trans_dst
    tw = prep.trans_w
    tout = prep.trans_out
    is_max = prep.policy_is_max
    n = prep.n_states

    state = [prep.initial]
    prev = [-1]
    trans = [-1]
    weight = [0]
    flag = [False]
    col_start = [0, 1]

    seen = [-1] * n
    cell_at = [0] * n
    seen[prep.initial] = 0
    probes = 0

    for j, x in enumerate(codes):
        col = j + 1
        for ci in range(col_start[j], col_start[j + 1]):
            p = state[ci]
            base = bp_off[p]
            end = bp_off[p + 1]
            k = bisect_left(bp_val, x, base, end)
            if k == end:
                continue
            for ridx in range(row_off[k], row_off[k + 1]):
                tid = row_trans[ridx]
                probes += 1
                q = tdst[tid]
                w = tw[tid]
                if seen[q] != col:
                    seen[q] = col
                    cell_at[q] = len(state)
                    state.append(q)
                    prev.append(ci)
                    trans.append(tid)
                    weight.append(w)
                    flag.append(False)
                    continue
                cidx = cell_at[q]
                if w != weight[cidx]:
                    c = 1 if w > weight[cidx] else -1
                else:
                    c = _cmp_tail(prev, weight, ci, prev[cidx])
                if c == 0:
                    if not flag[cidx]:
                        seg_new, seg_old = _segments_to_ancestor(
                            prev, trans, tout, ci, prev[cidx]
                        )
                        if seg_new + tout[tid] != seg_old + tout[trans[cidx]]:
                            flag[cidx] = True
                elif (c > 0) == is_max:
                    prev[cidx] = ci
                    trans[cidx] = tid
                    weight[cidx] = w
                    flag[cidx] = False
        col_start.append(len(state))
        if not want_pool:
            amb_state = -1
            for ci in range(col_start[col], col_start[col + 1]):
                if flag[ci] and (amb_state < 0 or state[ci] < amb_state):
                    amb_state = state[ci]
            if amb_state >= 0:
                return (
                    EvalOutcome(False, None, AMB_CELL, j, amb_state, len(state), probes),
                    None,
                )

    pool = Pool(state, prev, trans, weight, col_start) if want_pool else None

    # pick the best accepting cell in the last column
    tau_has = prep.tau_has
    tau_w = prep.tau_w
    best = -1
    best_amb = False
    for ci in range(col_start[-2], col_start[-1]):
        q = state[ci]
        if not tau_has[q]:
            continue
        if best < 0:
            best = ci
            continue
        tb = tau_w[state[best]]
        tq = tau_w[q]
        if tq != tb:
            c = 1 if tq > tb else -1
        else:
            c = _cmp_tail(prev, weight, ci, best)
        if c == 0:
            if not best_amb:
                seg_new, seg_old = _segments_to_ancestor(prev, trans, tout, ci, best)
                if seg_new + prep.tau_out[q] != seg_old + prep.tau_out[state[best]]:
                    best_amb = True
        elif (c > 0) == is_max:
            best = ci
            best_amb = False

    if best < 0:
        return EvalOutcome(False, None, AMB_NONE, 0, -1, len(state), probes), pool
    if best_amb and not want_pool:
        return (
            EvalOutcome(False, None, AMB_FINAL, len(codes), state[best], len(state), probes),
            None,
        )
    output = _path_output(prev, trans, tout, best) + prep.tau_out[state[best]]
    return EvalOutcome(True, output, AMB_NONE, 0, -1, len(state), probes), pool


def run_dense(machine: Transducer, codes) -> EvalOutcome:
    """Reference fill over an explicit state x (len+1) matrix.

    Works straight off the machine: every occupied state scans all of its
    transitions and tests labels by bounds comparison, no breakpoint index
    involved.  Exists to cross-check ``run_sparse``.
    """
    n = machine.state_count
    ts = machine.transitions
    is_max = machine.policy is Policy.MAX
    by_src = machine.transitions_by_source()

    cols = len(codes) + 1
    matrix: list[list] = [[None] * n for _ in range(cols)]
    # cell layout: [prev_state, transition id, weight, ambiguity flag]
    matrix[0][machine.initial] = [-1, -1, 0, False]
    cells = 1
    probes = 0

    def cmp_tail(col: int, sa: int, sb: int) -> int:
        while sa != sb:
            ca = matrix[col][sa]
            cb = matrix[col][sb]
            if ca[2] != cb[2]:
                return 1 if ca[2] > cb[2] else -1
            sa = ca[0]
            sb = cb[0]
            col -= 1
        return 0

    def path_out(col: int, s: int) -> str:
        parts = []
        while True:
            cell = matrix[col][s]
            if cell[1] < 0:
                break
            parts.append(ts[cell[1]].eff.out)
            s = cell[0]
            col -= 1
        parts.reverse()
        return "".join(parts)

    def segments(col: int, sa: int, sb: int) -> tuple[str, str]:
        ids_a: list[int] = []
        ids_b: list[int] = []
        while sa != sb:
            ca = matrix[col][sa]
            cb = matrix[col][sb]
            ids_a.append(ca[1])
            ids_b.append(cb[1])
            sa = ca[0]
            sb = cb[0]
            col -= 1
        seg_a = "".join(ts[t].eff.out for t in reversed(ids_a))
        seg_b = "".join(ts[t].eff.out for t in reversed(ids_b))
        return seg_a, seg_b

    for j, x in enumerate(codes):
        row = matrix[j]
        nxt = matrix[j + 1]
        for p in range(n):
            if row[p] is None:
                continue
            for tid in by_src[p]:
                t = ts[tid]
                if not t.label.contains(x):
                    continue
                probes += 1
                q = t.dst
                w = t.eff.w
                cell = nxt[q]
                if cell is None:
                    nxt[q] = [p, tid, w, False]
                    cells += 1
                    continue
                if w != cell[2]:
                    c = 1 if w > cell[2] else -1
                else:
                    c = cmp_tail(j, p, cell[0])
                if c == 0:
                    if not cell[3]:
                        seg_new, seg_old = segments(j, p, cell[0])
                        if seg_new + t.eff.out != seg_old + ts[cell[1]].eff.out:
                            cell[3] = True
                elif (c > 0) == is_max:
                    nxt[q] = [p, tid, w, False]
        for q in range(n):
            cell = nxt[q]
            if cell is not None and cell[3]:
                return EvalOutcome(False, None, AMB_CELL, j, q, cells, probes)

    last = len(codes)
    best_state = -1
    best_amb = False
    for q in range(n):
        if matrix[last][q] is None or q not in machine.tau:
            continue
        if best_state < 0:
            best_state = q
            continue
        tb = machine.tau[best_state].w
        tq = machine.tau[q].w
        if tq != tb:
            c = 1 if tq > tb else -1
        else:
            c = cmp_tail(last, q, best_state)
        if c == 0:
            if not best_amb:
                seg_new, seg_old = segments(last, q, best_state)
                if seg_new + machine.tau[q].out != seg_old + machine.tau[best_state].out:
                    best_amb = True
        elif (c > 0) == is_max:
            best_state = q
            best_amb = False

    if best_state < 0:
        return EvalOutcome(False, None, AMB_NONE, 0, -1, cells, probes)
    if best_amb:
        return EvalOutcome(False, None, AMB_FINAL, len(codes), best_state, cells, probes)
    output = path_out(last, best_state) + machine.tau[best_state].out
    return EvalOutcome(True, output, AMB_NONE, 0, -1, cells, probes)
