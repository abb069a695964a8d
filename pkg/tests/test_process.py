import pytest
from hypothesis import given, settings, strategies as st

from spectrumkit.errors import BudgetExceeded, ParseError, UnknownAction
from spectrumkit.process import (NIL, CanonicalProcess, Prefix, Sum, canonicalize, capped, class_cap, depth,
                                 enumerate_universe, initials, parse_process, projected_class_count, traces,
                                 transitions)

import oracles


def P(text):
    return canonicalize(parse_process(text))


def term_strategy(alphabet=("a", "b"), max_leaves=6):
    leaves = st.just(NIL)
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Prefix, st.sampled_from(alphabet), inner),
            st.builds(Sum, inner, inner),
        ),
        max_leaves=max_leaves,
    )


# parsing


def test_parse_nil():
    assert parse_process("0") == NIL


def test_parse_sum_of_prefixes():
    expected = Sum(Prefix("a", Prefix("b", NIL)), Prefix("a", NIL))
    assert parse_process("a.b.0 + a.0") == expected


def test_parse_rejects_action_outside_alphabet():
    with pytest.raises(UnknownAction) as info:
        parse_process("a.(b.0 + c.0)", alphabet=["a", "b"])
    assert "c" in str(info.value)


@pytest.mark.parametrize("text", ["", "a.", "a.0 +", "(a.0", "a.0)", "A.0", "a b", "a.0 + + b.0"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_process(text)


@given(term_strategy())
def test_print_parse_roundtrip(term):
    assert parse_process(str(term)) == term


@given(term_strategy())
def test_canonical_text_parses_back_to_same_class(term):
    p = canonicalize(term)
    assert canonicalize(parse_process(p.text)) is p


# transitions and derived sets


def test_transitions_examples():
    assert transitions(NIL) == set()
    assert transitions(parse_process("a.0 + b.0")) == {("a", NIL), ("b", NIL)}
    assert transitions(parse_process("a.0 + a.0")) == {("a", NIL)}
    assert transitions(P("a.0 + b.0")) == {("a", P("0")), ("b", P("0"))}


def test_initials_examples():
    assert initials(parse_process("0")) == frozenset()
    assert initials(parse_process("a.0 + b.0")) == {"a", "b"}
    assert initials(parse_process("a.b.0")) == {"a"}


def test_traces_examples():
    assert traces(parse_process("0")) == {()}
    assert traces(parse_process("a.b.0")) == {(), ("a",), ("a", "b")}
    # frozen from oracles.traces
    assert traces(parse_process("a.b.0 + a.c.0")) == {(), ("a",), ("a", "b"), ("a", "c")}


def test_depth_examples():
    assert depth(parse_process("0")) == 0
    assert depth(parse_process("a.b.0 + a.0")) == 2
    assert depth(parse_process("a.0 + b.0")) == 1


@given(term_strategy())
def test_derived_sets_agree_with_term_oracle(term):
    assert initials(term) == oracles.initials(term)
    assert traces(term) == oracles.traces(term)
    assert depth(term) == oracles.depth(term)
    assert canonicalize(term).complete_traces == oracles.complete_traces(term)


@given(term_strategy())
def test_trace_invariants(term):
    ts = traces(term)
    assert () in ts
    for a, child in transitions(term):
        assert {(a,) + t for t in traces(child)} <= ts
    assert (depth(term) == 0) == (not initials(term))


# canonical forms


def test_idempotent_sum():
    assert P("a.0 + a.0") is P("a.0")


def test_commutative_sum():
    assert P("a.0 + b.0") is P("b.0 + a.0")


def test_nested_idempotence():
    assert P("a.(b.0 + b.0)") is P("a.b.0")


def test_canonical_identity_is_bisimilarity_exhaustively():
    terms = oracles.terms(["a", "b"], 2, max_width=2)[:120]
    for s in terms:
        for t in terms:
            assert (canonicalize(s) is canonicalize(t)) == oracles.bisim(s, t), (s, t)


@given(term_strategy(), term_strategy())
@settings(max_examples=200)
def test_canonical_identity_is_bisimilarity(s, t):
    assert (canonicalize(s) is canonicalize(t)) == oracles.bisim(s, t)


@given(term_strategy())
def test_to_term_roundtrip(term):
    p = canonicalize(term)
    assert canonicalize(p.to_term()) is p
    assert oracles.bisim(p.to_term(), term)


# enumeration


def test_enumerate_small_universes():
    one = enumerate_universe(["a"], 1)
    assert {p.text for p in one} == {"0", "a.0"}
    two = enumerate_universe(["a"], 2)
    assert set(two.members) == {P("0"), P("a.0"), P("a.a.0"), P("a.0 + a.a.0")}


@pytest.mark.parametrize("alphabet,max_depth", [(["a"], 0), (["a"], 1), (["a"], 2), (["a"], 3), (["a", "b"], 1),
                                                 (["a", "b"], 2), (["a", "b", "c"], 1)])
def test_universe_size_matches_closed_form(alphabet, max_depth):
    u = enumerate_universe(alphabet, max_depth)
    assert len(u) == oracles.class_count(len(alphabet), max_depth)
    assert projected_class_count(len(alphabet), max_depth) == len(u)


def test_universe_of_two_actions_depth_two_has_256_classes():
    assert len(enumerate_universe(["a", "b"], 2)) == 256


def test_universe_covers_every_small_term():
    u = enumerate_universe(["a", "b"], 2)
    for term in oracles.terms(["a", "b"], 2, max_width=2):
        assert canonicalize(term) in u.index


def test_universe_is_sorted_closed_and_duplicate_free():
    u = enumerate_universe(["a", "b"], 2)
    keys = [p.sort_key for p in u]
    assert keys == sorted(keys)
    assert len(set(u.members)) == len(u)
    for p in u:
        for _, c in p.children:
            assert c in u.index


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_universe(["a", "b"], 3)
    with pytest.raises(BudgetExceeded):
        enumerate_universe(["a", "b"], 2, cap=100)


def test_class_cap_from_environment(monkeypatch):
    monkeypatch.setenv("SPECTRUMKIT_CLASS_CAP", "10")
    assert class_cap() == 10
    with pytest.raises(BudgetExceeded):
        enumerate_universe(["a", "b"], 2)


def test_class_cap_override_beats_environment(monkeypatch):
    monkeypatch.setenv("SPECTRUMKIT_CLASS_CAP", "10")
    with capped(1000):
        assert class_cap() == 1000
        assert len(enumerate_universe(["a", "b"], 2)) == 256


def test_canonical_processes_are_interned():
    assert CanonicalProcess(()) is P("0")
    assert CanonicalProcess((("a", P("0")),)) is P("a.0")
