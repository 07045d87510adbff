import random

import pytest

from corpus import FIGURE1_SOURCE, RUNNING_SOURCE, all_strings, certified_corpus, random_ast
from lexfst import (
    AmbiguousPatternError,
    Effect,
    IDENTITY,
    Policy,
    RangeLabel,
    assemble,
    begins,
    compile_ast,
    compile_source,
    desugar,
    empty_effect,
    ends,
    links,
    localize,
    parse,
)
from lexfst.evaluate import Evaluator
from lexfst.glushkov import Localized
from lexfst.oracle import AMBIGUOUS, best, valuate
from lexfst.syntax import Atom, Concat, Epsilon, OutputConcat, Star, Union, WeightAfter


def loc_of(source: str) -> Localized:
    return localize(desugar(parse(source)))


def atom_pos(pos: int, ch: str = "a") -> Atom:
    return Atom(ord(ch), ord(ch), pos=pos)


def test_localize_running_example():
    loc = loc_of(RUNNING_SOURCE)
    assert {p: chr(lbl.lo) for p, (lbl, _) in loc.alpha.items()} == {
        1: "a",
        2: "a",
        3: "c",
        4: "b",
        5: "d",
    }


def test_localize_trivia():
    assert loc_of("''").alpha == {}
    loc = loc_of("[a-z]")
    assert loc.alpha == {1: (RangeLabel(97, 122), None)}


def test_localize_keeps_annotations():
    loc = loc_of("'a'@S 'b'@G")
    assert loc.alpha == {
        1: (RangeLabel(97, 97), "S"),
        2: (RangeLabel(98, 98), "G"),
    }


def test_empty_effect_running_example():
    assert empty_effect(loc_of(RUNNING_SOURCE).root) == Effect("", 9)


def test_empty_effect_epsilon():
    assert empty_effect(Epsilon()) == IDENTITY


def test_empty_effect_union_conflict():
    tree = Union(OutputConcat(Epsilon(), "x"), Epsilon())
    with pytest.raises(AmbiguousPatternError):
        empty_effect(tree)
    # even equal non-absent sides are rejected
    with pytest.raises(AmbiguousPatternError):
        empty_effect(Union(Epsilon(), Epsilon()))


def test_empty_effect_star_conflict():
    with pytest.raises(AmbiguousPatternError):
        empty_effect(Star(OutputConcat(Epsilon(), "x")))
    # a weight-only empty match collapses to the neutral effect
    assert empty_effect(Star(WeightAfter(Epsilon(), 7))) == IDENTITY


def test_begins_running_example():
    assert begins(loc_of(RUNNING_SOURCE).root) == {
        1: Effect("a", 0),
        4: IDENTITY,
    }


def test_begins_trivia():
    assert begins(Epsilon()) == {}
    # a starred head makes the next position initially reachable
    assert begins(loc_of("'a'* 'b'").root) == {1: IDENTITY, 2: IDENTITY}


def test_ends_running_example():
    assert ends(loc_of(RUNNING_SOURCE).root) == {
        3: Effect("", 7),
        5: Effect("", 9),
    }


def test_ends_trivia():
    assert ends(Epsilon()) == {}
    assert ends(OutputConcat(atom_pos(1), "d")) == {1: Effect("d", 0)}


def test_links_running_example():
    assert links(loc_of(RUNNING_SOURCE).root) == {
        (1, 2): IDENTITY,
        (2, 3): Effect("bc", 0),
        (4, 5): IDENTITY,
        (5, 4): IDENTITY,
    }


def test_links_trivia():
    assert links(atom_pos(1)) == {}


def test_links_loop_dedupes_equal_effects():
    tree = Star(Star(WeightAfter(atom_pos(1), 5)))
    assert links(tree) == {(1, 1): Effect("", 5)}


def test_links_loop_conflict_raises():
    tree = Star(Concat(Star(WeightAfter(atom_pos(1), 5)), WeightAfter(Epsilon(), 3)))
    with pytest.raises(AmbiguousPatternError, match="weight annotations"):
        links(tree)


def test_assemble_two_branch_pattern():
    machine = compile_source(FIGURE1_SOURCE, Policy.MIN)
    assert machine.state_count == 5
    assert len(machine.transitions) == 4
    fanout = [t for t in machine.transitions if t.src == 0]
    assert len(fanout) == 2
    assert all(t.label == RangeLabel(97, 97) for t in fanout)
    internal = [t for t in machine.transitions if t.src != 0]
    assert len(internal) == 2
    assert all(t.label == RangeLabel(98, 98) for t in internal)
    assert len(machine.tau) == 2
    assert all(eff.out.endswith("0") for eff in machine.tau.values())
    assert 0 not in machine.tau  # the pattern rejects the empty input


def test_assemble_running_example():
    loc = loc_of(RUNNING_SOURCE)
    machine = assemble(loc)
    assert machine.state_count == 6
    assert len(machine.transitions) == 6  # 4 links + 2 begins
    assert dict(machine.tau) == {
        3: Effect("", 7),
        5: Effect("", 9),
        0: Effect("", 9),
    }


def test_assemble_epsilon():
    machine = compile_source("''")
    assert machine.state_count == 1
    assert machine.transitions == ()
    assert dict(machine.tau) == {0: IDENTITY}


def test_assemble_star_of_epsilon():
    machine = compile_source("''*")
    assert machine.state_count == 1
    assert dict(machine.tau) == {0: IDENTITY}


def test_assemble_carries_colors():
    machine = compile_source("'a'@S 'b'@G")
    assert dict(machine.colors) == {1: "S", 2: "G"}


def test_compactness_and_shape_on_random_patterns():
    rng = random.Random(99)
    built = 0
    while built < 120:
        ast = desugar(random_ast(rng, rng.randint(1, 5), weighted=True))
        loc = localize(ast)
        try:
            machine = assemble(loc)
        except (AmbiguousPatternError, OverflowError):
            continue
        built += 1
        first = begins(loc.root)
        pairs = links(loc.root)
        assert machine.state_count == loc.positions + 1
        assert len(machine.transitions) == len(first) + len(pairs)
        for t in machine.transitions:
            assert t.dst != 0, "no transition may enter the start state"
            assert t.label == loc.alpha[t.dst][0], "incoming labels must match the position"
            assert t.label.lo <= t.label.hi  # no empty labels anywhere


def test_weight_overflow_is_reported():
    big = 2**62
    with pytest.raises(OverflowError):
        compile_source(f"'a' {big} {big}")


def test_compiled_machines_agree_with_the_oracle():
    # certified machines must reproduce the brute-force relation's best pick
    corpus = certified_corpus(seed=4242, count=60)
    inputs = list(all_strings("abc", 3))
    for ast, machine in corpus:
        relation = valuate(ast, 3)
        evaluator = Evaluator(machine)
        for text in inputs:
            expected = best(relation, text, machine.policy)
            got = evaluator.evaluate(text)
            assert expected is not AMBIGUOUS
            assert got == expected, (ast, text)
