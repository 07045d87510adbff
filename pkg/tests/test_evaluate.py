import random

import pytest

from corpus import FIGURE1_SOURCE, all_strings, certified_corpus, figure1_hand_machine, random_ast
from lexfst import (
    AmbiguousOutputError,
    DEFAULT_BACKEND,
    Effect,
    Evaluator,
    Policy,
    RangeLabel,
    Transducer,
    Transition,
    compile_ast,
    compile_source,
    desugar,
    evaluate,
    evaluate_dense,
    lex_compare,
    trace,
)
from lexfst.glushkov import AmbiguousPatternError

BACKENDS = ["python"] + (["c"] if DEFAULT_BACKEND == "c" else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def test_hand_machine_follows_the_weight_order(backend):
    machine = figure1_hand_machine(policy=Policy.MIN)
    assert Evaluator(machine, backend=backend).evaluate("ab") == "30"
    machine_max = figure1_hand_machine(policy=Policy.MAX)
    assert Evaluator(machine_max, backend=backend).evaluate("ab") == "0430"


def test_hand_machine_rejections(backend):
    ev = Evaluator(figure1_hand_machine(), backend=backend)
    assert ev.evaluate("a") is None  # no accepting state mid-way
    assert ev.evaluate("") is None
    assert ev.evaluate("b") is None
    assert ev.evaluate("abb") is None


def test_compiled_machine_matches_hand_machine(backend):
    for policy, expected in [(Policy.MIN, "30"), (Policy.MAX, "0430")]:
        machine = compile_source(FIGURE1_SOURCE, policy)
        assert Evaluator(machine, backend=backend).evaluate("ab") == expected


def test_empty_input_accepted_at_start_state(backend):
    machine = Transducer(state_count=1, tau={0: Effect("d", 3)})
    assert Evaluator(machine, backend=backend).evaluate("") == "d"


def test_trace_columns():
    machine = figure1_hand_machine()
    table = trace(machine, "ab")
    assert len(table) == 3
    assert table.column_states(0) == (0,)
    assert set(table.column_states(1)) == {1, 2}
    assert table.column_states(2) == (3,)
    start = table.cell(0, 0)
    assert (start.prev_state, start.trans) == (-1, -1)

    assert len(trace(machine, "")) == 1
    dead = trace(machine, "z")
    assert len(dead) == 2
    assert dead.column_states(1) == ()


def test_trace_columns_are_the_reachable_superpositions():
    corpus = certified_corpus(seed=5150, count=15)
    for _, machine in corpus:
        ev = Evaluator(machine)
        for text in all_strings("abc", 3):
            table = ev.trace(text)
            current = {machine.initial}
            assert set(table.column_states(0)) == current
            for j, ch in enumerate(text):
                current = {
                    t.dst
                    for t in machine.transitions
                    if t.src in current and t.label.contains(ord(ch))
                }
                assert set(table.column_states(j + 1)) == current


def test_trace_determines_evaluate():
    # recompute the result from the table alone and compare
    corpus = certified_corpus(seed=77, count=25)
    for _, machine in corpus:
        ev = Evaluator(machine)
        for text in all_strings("abc", 3):
            assert _result_from_table(machine, ev.trace(text), text) == ev.evaluate(text)


def _result_from_table(machine, table, text):
    last = len(table) - 1
    candidates = []
    for state in table.column_states(last):
        eff = machine.tau.get(state)
        if eff is None:
            continue
        weights = [eff.w]
        outputs = [eff.out]
        col, cur = last, state
        while True:
            cell = table.cell(cur, col)
            if cell.trans < 0:
                break
            weights.append(cell.weight)
            outputs.append(machine.transitions[cell.trans].eff.out)
            cur = cell.prev_state
            col -= 1
        weights.reverse()
        outputs.reverse()
        candidates.append((weights, "".join(outputs)))
    if not candidates:
        return None
    want = 1 if machine.policy is Policy.MAX else -1
    best = candidates[0]
    for cand in candidates[1:]:
        if lex_compare(cand[0], best[0]) == want:
            best = cand
    return best[1]


def test_parallel_equal_paths_with_distinct_outputs_raise(backend):
    machine = Transducer(
        state_count=3,
        transitions=(
            Transition(0, RangeLabel(97, 97), 1, Effect("x", 1)),
            Transition(0, RangeLabel(97, 97), 2, Effect("y", 1)),
        ),
        tau={1: Effect("", 0), 2: Effect("", 0)},
    )
    ev = Evaluator(machine, backend=backend)
    with pytest.raises(AmbiguousOutputError):
        ev.evaluate("a")
    assert ev.evaluate("") is None  # untouched inputs still work


def test_parallel_equal_paths_with_equal_outputs_pick_deterministically(backend):
    machine = Transducer(
        state_count=2,
        transitions=(
            Transition(0, RangeLabel(97, 98), 1, Effect("x", 1)),
            Transition(0, RangeLabel(98, 99), 1, Effect("x", 1)),
        ),
        tau={1: Effect("!", 0)},
    )
    ev = Evaluator(machine, backend=backend)
    assert ev.evaluate("b") == "x!"


def test_cell_conflict_detected_mid_input(backend):
    # both branches converge on one state after 'a' with equal weights but
    # different accumulated outputs
    machine = Transducer(
        state_count=2,
        transitions=(
            Transition(0, RangeLabel(97, 97), 1, Effect("x", 0)),
            Transition(0, RangeLabel(97, 97), 1, Effect("y", 0)),
            Transition(1, RangeLabel(98, 98), 1, Effect("", 0)),
        ),
        tau={1: Effect("", 0)},
    )
    with pytest.raises(AmbiguousOutputError, match="after 1 symbol"):
        Evaluator(machine, backend=backend).evaluate("ab")


def test_final_tau_tie_with_distinct_outputs_raises(backend):
    machine = Transducer(
        state_count=3,
        transitions=(
            Transition(0, RangeLabel(97, 97), 1, Effect("", 1)),
            Transition(0, RangeLabel(97, 97), 2, Effect("", 1)),
        ),
        tau={1: Effect("x", 5), 2: Effect("y", 5)},
    )
    with pytest.raises(AmbiguousOutputError, match="end of input"):
        Evaluator(machine, backend=backend).evaluate("a")


def test_weight_tie_resolved_by_earlier_weights(backend):
    # both paths end with weight 0; the step before differs
    machine = Transducer(
        state_count=5,
        transitions=(
            Transition(0, RangeLabel(97, 97), 1, Effect("p", 1)),
            Transition(0, RangeLabel(97, 97), 2, Effect("q", 2)),
            Transition(1, RangeLabel(98, 98), 3, Effect("", 0)),
            Transition(2, RangeLabel(98, 98), 4, Effect("", 0)),
        ),
        tau={3: Effect("", 0), 4: Effect("", 0)},
        policy=Policy.MAX,
    )
    assert Evaluator(machine, backend=backend).evaluate("ab") == "q"
    machine_min = Transducer(
        state_count=machine.state_count,
        transitions=machine.transitions,
        tau=dict(machine.tau),
        policy=Policy.MIN,
    )
    assert Evaluator(machine_min, backend=backend).evaluate("ab") == "p"


def test_evaluate_is_deterministic(backend):
    machine = compile_source("(('ab':'x' 1)|('a':'y' 2 'b'))* :'!'")
    ev = Evaluator(machine, backend=backend)
    outs = {ev.evaluate("abab") for _ in range(5)}
    assert len(outs) == 1


def test_backends_and_dense_reference_agree():
    rng = random.Random(123)
    tried = 0
    while tried < 80:
        ast = desugar(random_ast(rng, rng.randint(1, 4), weighted=True))
        try:
            machine = compile_ast(ast, rng.choice([Policy.MIN, Policy.MAX]))
        except (AmbiguousPatternError, OverflowError):
            continue
        tried += 1
        evaluators = [Evaluator(machine, backend=b) for b in BACKENDS]
        for text in all_strings("abc", 3):
            results = []
            for ev in evaluators:
                try:
                    results.append(("ok", ev.evaluate(text)))
                except AmbiguousOutputError:
                    results.append(("ambiguous", None))
            try:
                results.append(("ok", evaluate_dense(machine, text)))
            except AmbiguousOutputError:
                results.append(("ambiguous", None))
            assert len(set(results)) == 1, (ast, text, results)


def test_stats_bounds(backend):
    machine = figure1_hand_machine()
    ev = Evaluator(machine, backend=backend)
    out, stats = ev.evaluate_with_stats("ab")
    assert out == "30"
    assert stats.cells == 4  # q0 | q1,q2 | q3
    assert stats.cells <= machine.state_count * 3
    # probes never exceed the summed out-degree over occupied cells
    table = ev.trace("ab")
    degree = [0] * machine.state_count
    for t in machine.transitions:
        degree[t.src] += 1
    budget = sum(degree[s] for col in range(len(table)) for s in table.column_states(col))
    assert stats.probes <= budget


def test_reusable_evaluator_is_consistent_with_one_shot(backend):
    machine = compile_source(FIGURE1_SOURCE, Policy.MIN)
    assert Evaluator(machine, backend=backend).evaluate("ab") == evaluate(machine, "ab")


def test_surrogate_input_rejected():
    machine = compile_source("'a'")
    with pytest.raises(ValueError):
        evaluate(machine, "\ud800")


def test_wildcard_covers_astral_symbols(backend):
    machine = compile_source(". :'!'")
    ev = Evaluator(machine, backend=backend)
    assert ev.evaluate("\U0001F600") == "!"
    assert ev.evaluate("a") == "!"
    assert ev.evaluate("") is None


def test_class_spanning_the_surrogate_gap(backend):
    machine = compile_source("[\\u0041-\U0001F600]")
    ev = Evaluator(machine, backend=backend)
    assert ev.evaluate("Z") == ""
    assert ev.evaluate("\U0001F600") == ""
    assert ev.evaluate("\U0001F601") is None
