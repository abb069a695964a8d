"""Characteristic and anti-characteristic formulae, and decomposition.

``chi(X, p)`` is satisfied exactly by the processes above ``p`` in ≼_X.
``bar_chi(X, p)`` is false at ``p`` and true at every process that is not
below ``p``.  Together they split any consistent formula ``f`` with a
minimal model ``p`` as ``f ≡ chi(p) ∨ (bar_chi(p) ∧ f)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from . import linear
from .branching import max_succ, maximal_elements, minimal_elements, simulated
from .errors import BudgetExceeded
from .linear import PairActs, PairClasses, PairTraces, TraceObs, Word
from .logic import (FF, TT, ZERO, Box, Diamond, Formula, Neg, ReadySet, Semantics, TraceSet, box_seq, conj,
                    diamond_seq, disj, modal_depth, sat_mask, words_up_to)
from .process import CanonicalProcess, Process, Universe, canonicalize, enumerate_universe

S = Semantics

DEFAULT_DISJUNCT_CAP = 200_000
FULL_MODE_CAP = 4096


def _alphabet(context) -> tuple[str, ...]:
    """Accept a :class:`Universe` or an iterable of actions."""
    if isinstance(context, Universe):
        return context.alphabet
    acts = tuple(sorted(set(context)))
    if not acts:
        raise ValueError("an alphabet with at least one action is required")
    return acts


def _supported(semantics) -> Semantics:
    semantics = Semantics.parse(semantics)
    if semantics is S.CONF:
        raise ValueError("conformance simulation has no finite characterization; chi is undefined")
    return semantics


# ---------------------------------------------------------------------------
# Simulation helpers shared by the possible/impossible-simulation families


@lru_cache(maxsize=1 << 16)
def chi_sim(p: CanonicalProcess) -> Formula:
    """Characteristic formula of ``p`` for simulation: ``⋀ <a>chi_sim(p')``."""
    return conj(*(Diamond(a, chi_sim(c)) for a, c in p.children))


@lru_cache(maxsize=1 << 16)
def _sim_by(p: CanonicalProcess, alphabet: tuple) -> Formula:
    return conj(*(Box(a, disj(*(_sim_by(c, alphabet) for c in p.successors(a)))) for a in alphabet))


def sim_by(p: Process, alphabet: Sequence[str]) -> Formula:
    """Satisfied exactly by the processes simulated by ``p``."""
    return _sim_by(canonicalize(p), _alphabet(alphabet))


# ---------------------------------------------------------------------------
# B sets


@dataclass(frozen=True)
class BSet:
    semantics: Semantics
    positive: frozenset
    negative: frozenset
    mode: str = "reduced"

    @property
    def members(self) -> frozenset:
        return self.positive | self.negative

    def __len__(self) -> int:
        return len(self.members)

    def conjunction(self) -> Formula:
        return conj(*sorted(self.members, key=lambda f: f.text))


def _negative_part(semantics: Semantics, p: CanonicalProcess, alphabet: tuple) -> list[Formula]:
    if semantics is S.S:
        return []
    if semantics is S.CS:
        return [] if p.children else [ZERO]
    if semantics is S.RS:
        return [Box(a, FF) for a in alphabet if a not in p.initials]
    if semantics is S.TS:
        return [box_seq(t, FF) for t in linear.minimal_nontraces(p.traces, alphabet)]
    if semantics is S.TWO_S:
        return [Box(a, disj(*(_two_sim_negative(c, alphabet) for c in max_succ(p, a)))) for a in alphabet]
    # BS
    return [Box(a, disj(*(_chi_branching(semantics, c, alphabet) for c in p.successors(a)))) for a in alphabet]


@lru_cache(maxsize=1 << 16)
def _two_sim_negative(p: CanonicalProcess, alphabet: tuple) -> Formula:
    return conj(*_negative_part(S.TWO_S, p, alphabet))


@lru_cache(maxsize=1 << 18)
def _chi_branching(semantics: Semantics, p: CanonicalProcess, alphabet: tuple) -> Formula:
    positive = [Diamond(a, _chi_branching(semantics, c, alphabet)) for a, c in p.children]
    return conj(*positive, *_negative_part(semantics, p, alphabet))


def _full_positive(semantics: Semantics, p: CanonicalProcess, alphabet: tuple) -> frozenset:
    result = {TT}
    for a, c in p.children:
        below = sorted(_full_bset(semantics, c, alphabet).members, key=lambda f: f.text)
        if len(below) > FULL_MODE_CAP.bit_length():
            raise BudgetExceeded(f"full B set below {p}", 1 << len(below), FULL_MODE_CAP)
        for k in range(len(below) + 1):
            for chosen in combinations(below, k):
                result.add(Diamond(a, conj(*chosen)))
    return frozenset(result)


@lru_cache(maxsize=1 << 12)
def _full_bset(semantics: Semantics, p: CanonicalProcess, alphabet: tuple) -> BSet:
    return BSet(semantics, _full_positive(semantics, p, alphabet),
                frozenset(_negative_part(semantics, p, alphabet)), "full")


def b_set(semantics: Semantics | str, p: Process, alphabet, mode: str = "reduced") -> BSet:
    """The finite generating set whose conjunction is ``chi(X, p)``.

    Reduced mode puts one ``<a>chi(p')`` per transition into B⁺; full mode
    adds ``<a>⋀Ψ`` for every subset Ψ of B(p′) and is guarded by a size cap.
    Linear semantics have B = {tt} ∪ {φ[x]} over the canonical observations.
    """
    semantics = _supported(semantics)
    p = canonicalize(p)
    acts = _alphabet(alphabet)
    if semantics.is_linear:
        formulas = {obs_formula(semantics, x, acts) for x in linear.observations(semantics, p, acts)}
        return BSet(semantics, frozenset({TT} | formulas), frozenset(), mode)
    if mode == "full":
        return _full_bset(semantics, p, acts)
    if mode != "reduced":
        raise ValueError(f"unknown mode {mode!r}")
    positive = {TT} | {Diamond(a, _chi_branching(semantics, c, acts)) for a, c in p.children}
    return BSet(semantics, frozenset(positive), frozenset(_negative_part(semantics, p, acts)), mode)


# ---------------------------------------------------------------------------
# Characteristic formulae


def chi(semantics: Semantics | str, p: Process, alphabet) -> Formula:
    """The characteristic formula of ``p`` within the logic of ``semantics``."""
    semantics = _supported(semantics)
    p = canonicalize(p)
    acts = _alphabet(alphabet)
    if semantics.is_linear:
        return _chi_linear(semantics, p, acts)
    return _chi_branching(semantics, p, acts)


@lru_cache(maxsize=1 << 18)
def _chi_linear(semantics: Semantics, p: CanonicalProcess, alphabet: tuple) -> Formula:
    return conj(*(obs_formula(semantics, x, alphabet) for x in linear.observations(semantics, p, alphabet)))


def _set_formula(semantics: Semantics, element: Iterable, alphabet: tuple) -> Formula:
    family, mode = linear._KIND[semantics]
    element = frozenset(element)
    if family == "acts":
        if mode == "exact":
            return ReadySet(element)
        return conj(*(Box(a, FF) for a in sorted(element)))
    if family == "traces":
        if mode == "exact":
            return TraceSet(element)
        return conj(*(box_seq(t, FF) for t in sorted(element, key=lambda t: (len(t), t))))
    if mode == "exact":
        tops = maximal_elements(element, simulated)
        return conj(conj(*(chi_sim(r) for r in tops)), disj(*(_sim_by(r, alphabet) for r in tops)))
    return conj(*(Neg(chi_sim(r)) for r in minimal_elements(element, simulated)))


def obs_formula(semantics: Semantics | str, x, alphabet) -> Formula:
    """The formula φ[x] satisfied exactly by the processes having observation ``x``.

    Process sets are reduced to their ≼_S-maximal (possible) or minimal
    (impossible) members, which gives an equivalent formula.
    """
    semantics = Semantics.parse(semantics)
    acts = _alphabet(alphabet)
    if isinstance(x, TraceObs):
        return diamond_seq(x.trace, ZERO if semantics is S.CT else TT)
    if isinstance(x, Word):
        acc: Formula = TT
        for item in reversed(x.items):
            if isinstance(item, str):
                acc = Diamond(item, acc)
            else:
                acc = conj(_set_formula(semantics, item, acts), acc)
        return acc
    if isinstance(x, (PairActs, PairTraces, PairClasses)):
        return diamond_seq(x.trace, _set_formula(semantics, linear._pair_element(x), acts))
    raise TypeError(f"not an observation: {x!r}")


# ---------------------------------------------------------------------------
# Anti-characteristic formulae


def bar_chi(semantics: Semantics | str, p: Process, alphabet, cap: int = DEFAULT_DISJUNCT_CAP) -> Formula:
    """A formula false at ``p`` and true at every process not below ``p``.

    For linear semantics the disjuncts range over the observations of all
    processes of depth ≤ depth(p) that ``p`` lacks, so the alphabet and depth
    must admit enumerating that universe.
    """
    semantics = _supported(semantics)
    p = canonicalize(p)
    acts = _alphabet(alphabet)
    if semantics.is_linear:
        return _bar_chi_linear(semantics, p, acts, cap)
    if semantics is S.BS:
        return Neg(_chi_branching(S.BS, p, acts))
    return _bar_chi_branching(semantics, p, acts)


@lru_cache(maxsize=1 << 16)
def _bar_chi_branching(semantics: Semantics, p: CanonicalProcess, alphabet: tuple) -> Formula:
    moves = [Diamond(a, conj(*(_bar_chi_branching(semantics, c, alphabet) for c in p.successors(a))))
             for a in alphabet]
    if semantics is S.CS and p.children:
        moves.append(ZERO)
    elif semantics is S.RS:
        moves.extend(Box(a, FF) for a in sorted(p.initials))
    elif semantics is S.TS:
        moves.extend(diamond_seq(t, TT) for t in linear.minimal_nontraces(p.traces, alphabet))
        moves.extend(box_seq(t, FF) for t in p.traces if t)
    elif semantics is S.TWO_S:
        moves.append(_not_simulating(p, alphabet))
    return disj(*moves)


@lru_cache(maxsize=1 << 16)
def _not_simulating(p: CanonicalProcess, alphabet: tuple) -> Formula:
    """Satisfied by every ``q`` that does not simulate ``p``."""
    return disj(*(Box(a, FF) for a in sorted(p.initials)),
                *(Box(a, _not_simulating(c, alphabet)) for a, c in p.children))


@lru_cache(maxsize=64)
def _universe_items(semantics: Semantics, alphabet: tuple, depth: int) -> tuple:
    items = set()
    for member in enumerate_universe(alphabet, depth).members:
        items.update(linear.canonical_obs(semantics, member).items)
    return tuple(linear._sorted_items(items))


@lru_cache(maxsize=1 << 14)
def _bar_chi_linear(semantics: Semantics, p: CanonicalProcess, alphabet: tuple, cap: int) -> Formula:
    disjuncts = [diamond_seq(t, TT) for t in words_up_to(alphabet, p.depth + 1) if len(t) == p.depth + 1]
    for item in _universe_items(semantics, alphabet, p.depth):
        if not linear.item_covered(semantics, item, p):
            disjuncts.append(obs_formula(semantics, linear.item_observation(semantics, item, alphabet), alphabet))
            if len(disjuncts) > cap:
                raise BudgetExceeded(f"anti-characteristic formula of {p} for {semantics.value}",
                                     len(disjuncts), cap)
    return disj(*disjuncts)


# ---------------------------------------------------------------------------
# Decomposition


@dataclass(frozen=True)
class Decomposition:
    pivot: CanonicalProcess
    chi: Formula
    remainder: Formula


@dataclass(frozen=True)
class AlreadyCharacteristic:
    pivot: CanonicalProcess
    chi: Formula


@dataclass(frozen=True)
class Inconsistent:
    pass


def model_universe(f: Formula, alphabet, extra_depth: int = 0) -> Universe:
    """The universe searched for models of ``f``: depth = modal depth of ``f``."""
    return enumerate_universe(_alphabet(alphabet), modal_depth(f) + extra_depth)


def decompose(semantics: Semantics | str, f: Formula, universe: Universe):
    """Split ``f`` around a minimal model, within ``universe``.

    Returns :class:`Inconsistent` when ``f`` has no model in ``universe``,
    :class:`AlreadyCharacteristic` when its models are exactly those above a
    single minimal one, and otherwise a :class:`Decomposition` whose
    ``chi`` and ``remainder`` together cover the models of ``f``.
    """
    from .primality import minimal_models, up_closure_mask

    semantics = _supported(semantics)
    models = minimal_models(semantics, f, universe)
    if not models:
        return Inconsistent()
    pivot = models[0]
    characteristic = chi(semantics, pivot, universe)
    if sat_mask(f, universe) == up_closure_mask(semantics, pivot, universe):
        return AlreadyCharacteristic(pivot, characteristic)
    return Decomposition(pivot, characteristic, conj(bar_chi(semantics, pivot, universe), f))
