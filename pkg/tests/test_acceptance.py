"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
come.  Time limits are asserted inside the tests.
"""

import random
import time
from contextlib import contextmanager

import pytest

from corpus import (
    FIGURE1_SOURCE,
    RUNNING_SOURCE,
    all_strings,
    certified_corpus,
    figure1_hand_machine,
    random_ast,
)
from lexfst import (
    Effect,
    Evaluator,
    IDENTITY,
    Policy,
    RangeLabel,
    assemble,
    begins,
    compile_source,
    desugar,
    empty_effect,
    ends,
    links,
    localize,
    parse,
)
from lexfst.analysis import (
    ConflictWitness,
    check_coloring,
    find_weight_conflicts,
    parse_interleave_spec,
)
from lexfst.evaluate import AmbiguousOutputError
from lexfst.glushkov import AmbiguousPatternError
from lexfst.oracle import AMBIGUOUS, best, valuate
from lexfst.rangeindex import RangeIndex


@contextmanager
def criterion(number, name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} {name}: FAIL")
        raise
    print(f"ACCEPTANCE {number} {name}: PASS")


@pytest.fixture(scope="module")
def oracle_corpus():
    # 300 certified machines over {a,b,c}; patterns carry no path-dependent
    # weights, so the sum-collapsing oracle ranks exactly like the machine
    return certified_corpus(seed=20260810, count=300, max_depth=5)


def test_criterion_1_figure_reproduction():
    with criterion(1, "figure-1 reproduction"):
        start = time.perf_counter()
        machine_min = compile_source(FIGURE1_SOURCE, Policy.MIN)
        machine_max = compile_source(FIGURE1_SOURCE, Policy.MAX)
        assert Evaluator(machine_min).evaluate("ab") == "30"
        assert Evaluator(machine_max).evaluate("ab") == "0430"
        assert time.perf_counter() - start < 1.0


def test_criterion_2_construction_worked_example():
    with criterion(2, "construction worked example"):
        loc = localize(desugar(parse(RUNNING_SOURCE)))
        assert empty_effect(loc.root) == Effect("", 9)
        assert ends(loc.root) == {3: Effect("", 7), 5: Effect("", 9)}
        assert begins(loc.root) == {1: Effect("a", 0), 4: IDENTITY}
        assert links(loc.root) == {
            (1, 2): IDENTITY,
            (2, 3): Effect("bc", 0),
            (4, 5): IDENTITY,
            (5, 4): IDENTITY,
        }


def test_criterion_3_compactness():
    with criterion(3, "compactness"):
        start = time.perf_counter()
        rng = random.Random(33)
        built = 0
        while built < 500:
            ast = desugar(random_ast(rng, rng.randint(1, 6), weighted=True))
            loc = localize(ast)
            try:
                machine = assemble(loc)
            except (AmbiguousPatternError, OverflowError):
                continue
            built += 1
            assert machine.state_count == loc.positions + 1
            assert len(machine.transitions) == len(begins(loc.root)) + len(links(loc.root))
            for t in machine.transitions:
                assert t.label.lo <= t.label.hi  # every label is a real range
        assert time.perf_counter() - start < 10.0


def test_criterion_4_range_index():
    with criterion(4, "range index"):
        start = time.perf_counter()
        index = RangeIndex.build([RangeLabel(1, 50), RangeLabel(20, 80)])
        assert index.breakpoints == (0, 19, 50, 80)
        for x in range(0, 101):
            expected = {j for j, r in enumerate(index.ranges) if r.lo <= x <= r.hi}
            assert set(index.lookup(x)) == expected
        rng = random.Random(44)
        for _ in range(40):
            ranges = []
            for _ in range(rng.randint(1, 20)):
                lo = rng.randint(0, 300)
                ranges.append(RangeLabel(lo, rng.randint(lo, 300)))
            idx = RangeIndex.build(ranges)
            for x in range(0, 301):
                expected = {j for j, r in enumerate(ranges) if r.lo <= x <= r.hi}
                assert set(idx.lookup(x)) == expected
        assert time.perf_counter() - start < 5.0


def test_criterion_5_oracle_equivalence(oracle_corpus):
    with criterion(5, "oracle equivalence"):
        start = time.perf_counter()
        inputs = list(all_strings("abc", 4))
        for ast, machine in oracle_corpus:
            relation = valuate(ast, 4)
            evaluator = Evaluator(machine)
            for text in inputs:
                expected = best(relation, text, machine.policy)
                assert expected is not AMBIGUOUS
                assert evaluator.evaluate(text) == expected
        assert time.perf_counter() - start < 60.0


def test_criterion_6_functionality_soundness(oracle_corpus):
    with criterion(6, "functionality soundness"):
        violations = 0
        inputs = list(all_strings("abc", 4))
        for ast, machine in oracle_corpus:
            assert not find_weight_conflicts(machine)  # corpus is certified
            relation = valuate(ast, 4)
            evaluator = Evaluator(machine)
            for text in inputs:
                try:
                    evaluator.evaluate(text)
                except AmbiguousOutputError:
                    violations += 1
                if best(relation, text, machine.policy) is AMBIGUOUS:
                    violations += 1
        assert violations == 0


def test_criterion_7_conflict_detection():
    with criterion(7, "conflict detection"):
        assert find_weight_conflicts(figure1_hand_machine(w2=2, w3=3)) == ()
        witnesses = find_weight_conflicts(figure1_hand_machine(w2=2, w3=2))
        assert witnesses == (
            ConflictWitness(states=(1, 2), target=3, label=RangeLabel(98, 98), weight=2),
        )


def test_criterion_8_interleaving_check():
    with criterion(8, "interleaving check"):
        spec = parse_interleave_spec(
            "alphabet Sigma = [a-m]\n"
            "alphabet Gamma = [n-z]\n"
            "initial: Sigma\n"
            "pairs: Sigma->Gamma, Gamma->Sigma\n"
            "final: Gamma\n"
            "epsilon: forbidden\n"
        )
        valid = compile_source("('a' 'z' 'a' | 'a') 'z'")
        invalid = compile_source("('a' 'z' | 'a') 'z'")
        assert check_coloring(valid, spec) == ()
        assert check_coloring(invalid, spec) != ()


def test_criterion_9_quadratic_evaluation_bound():
    with criterion(9, "quadratic evaluation bound"):
        # 49 positions; overlapping alternatives keep every column occupied
        body = " ".join("('a'|[a-b])" for _ in range(24)) + " [a-b]"
        machine = compile_source(f"({body})*")
        assert machine.state_count == 50
        rng = random.Random(50)
        text = "".join(rng.choice("ab") for _ in range(10_000))
        evaluator = Evaluator(machine)
        start = time.perf_counter()
        _, stats = evaluator.evaluate_with_stats(text)
        elapsed = time.perf_counter() - start
        assert stats.cells <= machine.state_count * (len(text) + 1)
        assert stats.cells > len(text)  # the fill stayed live to the end
        assert elapsed < 1.0
