import pytest
from hypothesis import given, settings, strategies as st

from spectrumkit.errors import ParseError, UnknownAction
from spectrumkit.logic import (FF, TT, ZERO, And, Box, Diamond, Neg, Or, ReadySet, Semantics, TraceSet, conj,
                               desugar, disj, grammar_check, modal_depth, nnf, parse_formula, sat_mask, sat_set,
                               satisfies)
from spectrumkit.primality import FormulaSampler
from spectrumkit.process import canonicalize, enumerate_universe, parse_process
from spectrumkit.spectrum import up_masks

import oracles

ACTS = ("a", "b")
U2 = enumerate_universe(ACTS, 2)
U_A1 = enumerate_universe(["a"], 1)


def P(text):
    return canonicalize(parse_process(text))


def F(text):
    return parse_formula(text)


def formula_strategy(alphabet=ACTS):
    atoms = st.one_of(
        st.sampled_from([TT, FF, ZERO]),
        st.builds(ReadySet, st.sets(st.sampled_from(alphabet))),
        st.builds(TraceSet, st.sets(st.lists(st.sampled_from(alphabet), max_size=2).map(tuple)).map(
            lambda ts: ts | {()})),
    )
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            st.builds(Diamond, st.sampled_from(alphabet), inner),
            st.builds(Box, st.sampled_from(alphabet), inner),
            st.builds(Neg, inner),
            st.lists(inner, min_size=2, max_size=3).map(And),
            st.lists(inner, min_size=2, max_size=3).map(Or),
        ),
        max_leaves=6,
    )


# parsing and printing


def test_parse_diamond():
    f = F("<a>tt")
    assert isinstance(f, Diamond) and f.action == "a" and f.body == TT


def test_parse_conjunction_of_box_and_diamond():
    f = F("[a]ff /\\ <b>tt")
    assert isinstance(f, And)
    assert set(f.children) == {Box("a", FF), Diamond("b", TT)}


def test_parse_sugar_and_sequences():
    assert F("0f") == ZERO
    assert F("ready{a,b}") == ReadySet({"a", "b"})
    assert F("traces{-,a,ab}") == TraceSet({(), ("a",), ("a", "b")})
    assert F("<tau:ab>tt") == Diamond("a", Diamond("b", TT))
    assert F("[tau:-]ff") == FF


def test_parse_unknown_action():
    with pytest.raises(UnknownAction):
        parse_formula("<c>tt", alphabet=ACTS)


@pytest.mark.parametrize("text", ["", "<a>", "tt /\\", "(tt", "<A>tt", "tt tt", "#"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text)


@given(formula_strategy())
def test_print_parse_roundtrip(f):
    assert parse_formula(f.text) == f


# satisfaction


def test_satisfies_examples():
    assert satisfies(P("a.b.0"), F("<a><b>tt"))
    assert not satisfies(P("a.0 + b.0"), F("[a]ff"))
    assert satisfies(P("b.0"), F("[a]ff"))
    assert not satisfies(P("a.0"), ZERO)
    assert satisfies(P("0"), ZERO)


def test_sugar_semantics():
    p = P("a.b.0 + b.0")
    assert satisfies(p, ReadySet({"a", "b"}))
    assert not satisfies(p, ReadySet({"a"}))
    assert satisfies(p, TraceSet({(), ("a",), ("a", "b"), ("b",)}))
    assert not satisfies(p, TraceSet({(), ("a",), ("b",)}))


def test_empty_trace_set_is_unsatisfiable():
    assert sat_set(TraceSet(()), U2) == frozenset()


@given(formula_strategy(), st.sampled_from(U2.members))
@settings(max_examples=300)
def test_satisfaction_agrees_with_desugared_oracle(f, p):
    assert satisfies(p, f) == oracles.holds_desugared(p.to_term(), f, ACTS)


@given(formula_strategy())
@settings(max_examples=200)
def test_sat_mask_agrees_with_pointwise_satisfaction(f):
    mask = sat_mask(f, U2)
    for i, p in enumerate(U2.members):
        assert bool(mask >> i & 1) == satisfies(p, f)


@given(formula_strategy())
@settings(max_examples=200)
def test_desugar_and_nnf_preserve_meaning(f):
    assert sat_mask(desugar(f, ACTS), U2) == sat_mask(f, U2)
    assert sat_mask(nnf(f, ACTS), U2) == sat_mask(f, U2)
    assert sat_mask(nnf(f, ACTS, negate=True), U2) == U2.full_mask & ~sat_mask(f, U2)


def test_sat_set_examples():
    assert sat_set(TT, U2) == frozenset(U2.members)
    assert sat_set(FF, U2) == frozenset()
    assert sat_set(F("<a>tt"), U_A1) == {P("a.0")}


def test_modal_depth():
    assert modal_depth(F("tt")) == 0
    assert modal_depth(F("<a>[b]ff /\\ <a>tt")) == 2
    assert modal_depth(ZERO) == 1
    assert modal_depth(F("traces{-,ab}")) == 3


# smart constructors


def test_conj_disj_units_and_zeros():
    a = F("<a>tt")
    assert conj() == TT and disj() == FF
    assert conj(a, TT) == a and disj(a, FF) == a
    assert conj(a, FF) == FF and disj(a, TT) == TT
    assert conj(a, a) == a
    assert conj(a, conj(F("<b>tt"), a)) == conj(F("<b>tt"), a)


@given(st.lists(formula_strategy(), min_size=1, max_size=4))
@settings(max_examples=100)
def test_smart_constructors_are_sound(fs):
    conj_mask = U2.full_mask
    disj_mask = 0
    for f in fs:
        conj_mask &= sat_mask(f, U2)
        disj_mask |= sat_mask(f, U2)
    assert sat_mask(conj(*fs), U2) == conj_mask
    assert sat_mask(disj(*fs), U2) == disj_mask


# grammars


def test_grammar_examples():
    assert grammar_check("T", F("<a>tt /\\ <b>tt"))
    assert not grammar_check("T", F("<a>(tt /\\ tt)"))
    assert grammar_check("F", F("<a>([a]ff /\\ [b]ff)"))


@pytest.mark.parametrize("sem,text,ok", [
    ("S", "<a>(<b>tt /\\ <a>tt)", True),
    ("S", "[a]ff", False),
    ("CS", "<a>0f", True),
    ("CS", "<a>[b]ff", False),
    ("RS", "<a>[b]ff /\\ [a]ff", True),
    ("RS", "<a>~<b><a>tt", False),
    ("RS", "<a>~<b>tt", True),
    ("TS", "[a][b]ff /\\ <a>tt", True),
    ("2S", "<a>~<b><a>tt", True),
    ("BS", "~(<a>tt /\\ [b]ff)", True),
    ("CT", "<a>0f /\\ <b>tt", True),
    ("CT", "<a>(0f /\\ 0f)", False),
    ("R", "<a>ready{b}", True),
    ("R", "<a>(ready{b} /\\ <a>tt)", False),
    ("FT", "<a>([b]ff /\\ <b>tt)", True),
    ("FT", "<a>(<a>tt /\\ <b>tt)", False),
    ("RT", "ready{a} /\\ <a>ready{}", True),
    ("PF", "<a>traces{-,b}", True),
    ("IF", "<a>[b]ff", True),
    ("IF", "<a>[b]<a>tt", False),
    ("IS", "<a>[b][a]ff", True),
    ("PS", "<a>(<b>tt /\\ [a]ff)", True),
    ("CONF", "<!a>tt /\\ <!b><!a>ff", True),
    ("CONF", "<!b>[a]ff", False),
    ("CONF", "<a>tt", False),
])
def test_grammar_membership_table(sem, text, ok):
    assert grammar_check(sem, F(text), ACTS) is ok


@pytest.mark.parametrize("sem", [s.value for s in Semantics if s is not Semantics.CONF])
def test_sampled_formulas_belong_to_their_grammar_and_are_upward_closed(sem):
    sampler = FormulaSampler(sem, ACTS, seed=7)
    ups = up_masks(sem, U2)
    for f in sampler.take(40):
        assert grammar_check(sem, f, ACTS)
        mask = sat_mask(f, U2)
        for i in range(len(U2)):
            if mask >> i & 1:
                assert ups[i] & ~mask == 0, (sem, f.text, U2.members[i].text)
