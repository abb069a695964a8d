import random

import pytest
from hypothesis import given, settings, strategies as st

from spectrumkit.branching import max_succ, minimal_unsimulated, preorder, sim_class_set, simulated_below
from spectrumkit.logic import BRANCHING, Semantics
from spectrumkit.primality import conformance_chain
from spectrumkit.process import canonicalize, enumerate_universe, parse_process
from spectrumkit.spectrum import equiv

import oracles

U2 = enumerate_universe(["a", "b"], 2)
MEMBERS = st.sampled_from(U2.members)
RELATIONS = ["S", "CS", "RS", "TS", "2S", "BS", "CONF"]


def P(text):
    return canonicalize(parse_process(text))


def test_preorder_examples():
    assert preorder("S", P("a.0"), P("a.0 + b.0")).holds
    verdict = preorder("RS", P("a.0"), P("a.0 + b.0"))
    assert not verdict.holds
    assert verdict.witness.path == () and "initials" in verdict.witness.reason
    assert not preorder("TS", P("a.b.0 + a.c.0"), P("a.(b.0 + c.0)")).holds
    assert preorder("S", P("a.b.0 + a.c.0"), P("a.(b.0 + c.0)")).holds
    assert preorder("BS", P("a.0 + a.0"), P("a.0")).holds
    assert preorder("BS", P("a.0"), P("a.0 + a.0")).holds


def test_preorder_accepts_terms():
    assert preorder("S", parse_process("a.0"), parse_process("a.0 + b.0")).holds


def test_equiv_examples():
    assert equiv("BS", P("a.0 + b.0"), P("b.0 + a.0"))
    assert equiv("T", P("a.b.0 + a.c.0"), P("a.(b.0 + c.0)"))
    assert not equiv("F", P("a.b.0 + a.c.0"), P("a.(b.0 + c.0)"))


def test_preorder_rejects_linear_semantics():
    with pytest.raises(ValueError):
        preorder("T", P("0"), P("0"))


@pytest.mark.parametrize("sem", RELATIONS)
def test_relations_agree_with_term_oracle(sem):
    rng = random.Random(sem)
    relation = oracles.BRANCHING[sem]
    for _ in range(600):
        p, q = rng.choice(U2.members), rng.choice(U2.members)
        assert preorder(sem, p, q).holds == relation(p.to_term(), q.to_term()), (sem, p, q)


@pytest.mark.parametrize("sem", RELATIONS)
@given(p=MEMBERS, q=MEMBERS, r=MEMBERS)
@settings(max_examples=60)
def test_preorders_are_reflexive_and_transitive(sem, p, q, r):
    assert preorder(sem, p, p).holds
    if preorder(sem, p, q).holds and preorder(sem, q, r).holds:
        assert preorder(sem, p, r).holds


@given(p=MEMBERS, q=MEMBERS)
@settings(max_examples=300)
def test_branching_chain(p, q):
    finer_to_coarser = ["BS", "2S", "TS", "RS", "CS", "S"]
    verdicts = [preorder(s, p, q).holds for s in finer_to_coarser]
    for finer, coarser in zip(verdicts, verdicts[1:]):
        assert not finer or coarser


@given(p=MEMBERS, q=MEMBERS)
@settings(max_examples=300)
def test_bisimulation_preorder_is_identity_of_classes(p, q):
    assert preorder("BS", p, q).holds == (p is q)


@given(p=MEMBERS, q=MEMBERS)
@settings(max_examples=200)
def test_witness_is_present_exactly_on_failure(p, q):
    for sem in RELATIONS:
        v = preorder(sem, p, q)
        assert (v.witness is None) == v.holds
        if not v.holds:
            # the path follows moves of p, or of q for the two-sided clauses
            assert v.witness.path in p.traces | q.traces


def test_sim_class_set_examples():
    u1 = enumerate_universe(["a"], 1)
    assert sim_class_set(P("0"), u1) == {P("0")}
    assert sim_class_set(P("a.0"), u1) == {P("0"), P("a.0")}
    assert sim_class_set(P("a.0"), enumerate_universe(["a"], 2)) == {P("0"), P("a.0")}


@given(MEMBERS)
def test_sim_class_set_is_the_simulation_down_set(p):
    expected = {q for q in U2 if oracles.sim(q.to_term(), p.to_term())}
    assert sim_class_set(p, U2) == expected
    assert simulated_below(p) == expected


def test_max_succ_examples():
    assert max_succ(P("a.0 + a.b.0"), "a") == {P("b.0")}
    assert max_succ(P("a.0"), "a") == {P("0")}
    assert max_succ(P("b.0"), "a") == frozenset()


@given(MEMBERS, st.sampled_from(["a", "b"]))
def test_max_succ_is_the_set_of_maximal_successors(p, a):
    kids = p.successors(a)
    result = max_succ(p, a)
    assert result <= set(kids)
    for k in kids:
        assert any(oracles.sim(k.to_term(), m.to_term()) for m in result)
    for m in result:
        for n in result:
            assert m is n or not oracles.sim(m.to_term(), n.to_term())


@given(MEMBERS)
@settings(max_examples=60)
def test_minimal_unsimulated_processes(p):
    found = minimal_unsimulated(p, ("a", "b"))
    for r in found:
        assert not oracles.sim(r.to_term(), p.to_term())
        assert r.depth <= p.depth + 1
    # every process of the next depth that p cannot simulate sits above one of them
    u3_candidates = [q for q in U2 if q.depth <= p.depth + 1]
    for q in u3_candidates:
        if not oracles.sim(q.to_term(), p.to_term()):
            assert any(oracles.sim(r.to_term(), q.to_term()) for r in found)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_conformance_chain(k):
    assert preorder("CONF", conformance_chain(k + 1), conformance_chain(k)).holds
    assert not preorder("CONF", conformance_chain(k), conformance_chain(k + 1)).holds


def test_conformance_chain_members():
    assert conformance_chain(1) is P("a.b.0")
    assert conformance_chain(2) is P("a.b.0 + a.a.b.0")


def test_branching_constants():
    assert [s.value for s in BRANCHING] == ["S", "CS", "RS", "TS", "2S", "BS"]
    assert Semantics.parse("2s") is Semantics.TWO_S
