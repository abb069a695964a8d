"""Linear-time semantics via observation sets.

``p ≼_X q`` holds when every observation of ``p`` is an observation of
``q``.  The observation sets are infinite for most semantics, so the
decision procedure works on a finite canonical summary: for each state
reachable along a trace we keep one decisive datum (its initials, its trace
set, or the set of processes it simulates), and for word semantics the
fully annotated paths built from those data.

:func:`xfin_bruteforce` enumerates the bounded observation sets literally
and serves as an independent oracle for the canonical procedure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .branching import PreorderVerdict, Witness, minimal_unsimulated, sim_class_set, simulated, simulated_below
from .errors import BudgetExceeded
from .logic import LINEAR, Semantics, words_up_to
from .process import CanonicalProcess, Process, Universe, canonicalize, enumerate_universe, format_trace

S = Semantics

# Decisive datum per state and how two data are compared.
#   family: "acts" (initials), "traces" (trace set), "classes" (simulated processes)
#   mode:   "refusal" (observation avoids the datum), "exact" (observation equals it)
_KIND = {
    S.F: ("acts", "refusal"), S.R: ("acts", "exact"),
    S.IF: ("traces", "refusal"), S.PF: ("traces", "exact"),
    S.IS: ("classes", "refusal"), S.PS: ("classes", "exact"),
    S.FT: ("acts", "refusal"), S.RT: ("acts", "exact"),
    S.IFT: ("traces", "refusal"), S.PFT: ("traces", "exact"),
    S.IST: ("classes", "refusal"), S.PST: ("classes", "exact"),
}
PAIR_SEMANTICS = (S.F, S.R, S.IF, S.PF, S.IS, S.PS)


# ---------------------------------------------------------------------------
# Observations


@dataclass(frozen=True)
class TraceObs:
    """A trace (T) or complete trace (CT)."""

    trace: tuple


@dataclass(frozen=True)
class PairActs:
    """``(τ, Y)`` with ``Y`` a set of actions (F: refused, R: ready)."""

    trace: tuple
    actions: frozenset


@dataclass(frozen=True)
class PairTraces:
    """``(τ, Γ)`` with ``Γ`` a set of traces (IF: impossible, PF: possible)."""

    trace: tuple
    traces: frozenset


@dataclass(frozen=True)
class PairClasses:
    """``(τ, ℙ)`` with ``ℙ`` a set of processes (IS: impossible, PS: possible)."""

    trace: tuple
    classes: frozenset


@dataclass(frozen=True)
class Word:
    """A word over actions (``str``) and set elements (``frozenset``)."""

    items: tuple

    @property
    def actions(self) -> tuple:
        return tuple(x for x in self.items if isinstance(x, str))


Observation = TraceObs | PairActs | PairTraces | PairClasses | Word


class SimClass:
    """The set of processes simulated by ``rep``; compared by that set only."""

    __slots__ = ("rep", "members", "_hash")

    def __init__(self, rep: CanonicalProcess):
        self.rep = rep
        self.members = simulated_below(rep)
        self._hash = hash(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimClass) and self.members == other.members

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: "SimClass") -> bool:
        return self.members <= other.members

    def __repr__(self) -> str:
        return f"SimClass({self.rep})"


@lru_cache(maxsize=1 << 16)
def sim_class(p: CanonicalProcess) -> SimClass:
    return SimClass(p)


def _datum(family: str, p: CanonicalProcess):
    if family == "acts":
        return p.initials
    if family == "traces":
        return p.traces
    return sim_class(p)


# ---------------------------------------------------------------------------
# Canonical observation sets


@dataclass(frozen=True)
class CanonicalObsSet:
    """Finite summary of X(p).

    ``items`` holds traces (T, CT), pairs ``(τ, datum)`` (pair semantics), or
    annotated paths ``(datum₀, a₁, datum₁, …, a_k, datum_k)`` (word semantics).
    """

    semantics: Semantics
    items: frozenset

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def reachable(p: CanonicalProcess) -> Iterator[tuple[tuple, CanonicalProcess]]:
    """Every ``(τ, p′)`` with ``p --τ--> p′``, duplicates removed."""
    seen = set()
    stack = [((), p)]
    while stack:
        trace, state = stack.pop()
        if (trace, state) in seen:
            continue
        seen.add((trace, state))
        yield trace, state
        stack.extend((trace + (a,), c) for a, c in state.children)


def annotated_paths(p: CanonicalProcess, family: str) -> frozenset:
    """Paths from the root to every node, each state replaced by its datum."""
    result = set()

    def walk(state, prefix):
        path = prefix + (_datum(family, state),)
        result.add(path)
        for a, c in state.children:
            walk(c, path + (a,))

    walk(p, ())
    return frozenset(result)


@lru_cache(maxsize=1 << 18)
def _canonical_items(semantics: Semantics, p: CanonicalProcess) -> frozenset:
    if semantics is S.T:
        return p.traces
    if semantics is S.CT:
        return p.complete_traces
    family, _ = _KIND[semantics]
    if semantics.is_word:
        return annotated_paths(p, family)
    return frozenset((trace, _datum(family, state)) for trace, state in reachable(p))


def canonical_obs(semantics: Semantics | str, p: Process, universe: Universe | None = None) -> CanonicalObsSet:
    """The canonical summary of X(p).

    ``universe`` is accepted for interface symmetry; simulated-process sets
    are generated directly from ``p`` and need no universe.
    """
    semantics = _linear(semantics)
    return CanonicalObsSet(semantics, _canonical_items(semantics, canonicalize(p)))


def _linear(semantics) -> Semantics:
    semantics = Semantics.parse(semantics)
    if semantics not in LINEAR:
        raise ValueError(f"{semantics} is not a linear semantics")
    return semantics


def _path_actions(path: tuple) -> tuple:
    return path[1::2]


def _path_data(path: tuple) -> tuple:
    return path[0::2]


def _group_by_trace(items) -> dict:
    grouped: dict = {}
    for trace, datum in items:
        grouped.setdefault(trace, []).append(datum)
    return grouped


def item_covered(semantics: Semantics, item, q: CanonicalProcess) -> bool:
    """Whether the observation summarised by ``item`` lies in X(q)."""
    theirs = _canonical_items(semantics, q)
    if semantics in (S.T, S.CT) or _KIND[semantics][1] == "exact":
        return item in theirs
    if semantics in PAIR_SEMANTICS:
        trace, datum = item
        return any(t == trace and d <= datum for t, d in theirs)
    actions, data = _path_actions(item), _path_data(item)
    return any(_path_actions(other) == actions and all(d <= e for d, e in zip(_path_data(other), data))
               for other in theirs)


@lru_cache(maxsize=1 << 20)
def _included(semantics: Semantics, p: CanonicalProcess, q: CanonicalProcess):
    """``None`` when X(p) ⊆ X(q), otherwise a canonical item of p missing in q."""
    mine = _canonical_items(semantics, p)
    theirs = _canonical_items(semantics, q)
    if semantics in (S.T, S.CT) or _KIND[semantics][1] == "exact":
        missing = mine - theirs
        return _sorted_items(missing)[0] if missing else None
    for item in _sorted_items(mine):
        if not item_covered(semantics, item, q):
            return item
    return None


def _sorted_items(items) -> list:
    return sorted(items, key=lambda item: _item_key(item))


def _item_key(item) -> tuple:
    if isinstance(item, tuple) and item and isinstance(item[0], tuple):
        return (len(item[0]), item[0], _datum_key(item[1]))
    return (len(item), tuple(_datum_key(x) if not isinstance(x, str) else (0, x) for x in item))


def _datum_key(d) -> tuple:
    if isinstance(d, SimClass):
        return (len(d.members), d.rep.sort_key)
    if isinstance(d, frozenset):
        return (len(d), sorted(d))
    return (0, str(d))


def linear_preorder(semantics: Semantics | str, p: Process, q: Process, universe: Universe | None = None,
                    alphabet: Sequence[str] | None = None) -> PreorderVerdict:
    """Decide ``X(p) ⊆ X(q)`` by canonical matching.

    On failure the witness carries an observation of ``p`` that ``q`` lacks;
    refusal-style witnesses are shrunk greedily while they still separate.
    ``alphabet`` (or that of ``universe``) is used only to phrase the witness.
    """
    semantics = _linear(semantics)
    p, q = canonicalize(p), canonicalize(q)
    missing = _included(semantics, p, q)
    if missing is None:
        return PreorderVerdict(True)
    if alphabet is None:
        alphabet = universe.alphabet if universe is not None else sorted(p.actions | q.actions) or ("a",)
    x = item_observation(semantics, missing, alphabet)
    x = _shrink(semantics, x, q)
    return PreorderVerdict(False, Witness(_observation_trace(x), f"{describe(x)} is in X(p) but not X(q)", x))


def holds(semantics: Semantics, p: CanonicalProcess, q: CanonicalProcess) -> bool:
    """Boolean fast path of :func:`linear_preorder` for canonical arguments."""
    return _included(semantics, p, q) is None


def _observation_trace(x) -> tuple:
    return x.actions if isinstance(x, Word) else x.trace


# ---------------------------------------------------------------------------
# From canonical items to observations


def minimal_nontraces(traces: frozenset, alphabet: Sequence[str]) -> frozenset:
    """Shortest extensions ``τa`` of traces that are not traces themselves."""
    return frozenset(t + (a,) for t in traces for a in alphabet if t + (a,) not in traces)


def _set_element(semantics: Semantics, datum, alphabet):
    family, mode = _KIND[semantics]
    if mode == "exact":
        return datum.members if family == "classes" else datum
    if family == "acts":
        return frozenset(alphabet) - datum
    if family == "traces":
        return minimal_nontraces(datum, alphabet)
    return frozenset(minimal_unsimulated(datum.rep, tuple(alphabet)))


def item_observation(semantics: Semantics | str, item, alphabet: Sequence[str]) -> Observation:
    """The strongest observation summarised by a canonical item.

    For refusal-style semantics the complement of the datum is infinite or
    large; it is replaced by its minimal elements, which yields an equivalent
    observation (same membership on every process).
    """
    semantics = _linear(semantics)
    alphabet = tuple(sorted(alphabet))
    if semantics in (S.T, S.CT):
        return TraceObs(item)
    if semantics.is_word:
        items = tuple(x if i % 2 else _set_element(semantics, x, alphabet) for i, x in enumerate(item))
        return Word(items)
    trace, datum = item
    element = _set_element(semantics, datum, alphabet)
    family, _ = _KIND[semantics]
    cls = {"acts": PairActs, "traces": PairTraces, "classes": PairClasses}[family]
    return cls(trace, element)


def observations(semantics: Semantics | str, p: Process, alphabet: Sequence[str]) -> list:
    """The observations of every canonical item of ``p``, in canonical order."""
    obs = canonical_obs(semantics, p)
    return [item_observation(obs.semantics, item, alphabet) for item in _sorted_items(obs.items)]


# ---------------------------------------------------------------------------
# Membership


def _compatible(semantics: Semantics, element: frozenset, state: CanonicalProcess) -> bool:
    family, mode = _KIND[semantics]
    if family == "acts":
        datum = state.initials
    elif family == "traces":
        datum = state.traces
    else:
        datum = sim_class(state).members
    return element == datum if mode == "exact" else not (element & datum)


def obs_member(semantics: Semantics | str, x: Observation, p: Process, universe: Universe | None = None) -> bool:
    """Whether ``x ∈ X(p)``."""
    semantics = _linear(semantics)
    p = canonicalize(p)
    items = _canonical_items(semantics, p)
    if semantics in (S.T, S.CT):
        return isinstance(x, TraceObs) and x.trace in items
    if semantics.is_word:
        if not isinstance(x, Word):
            return False
        return _word_member(semantics, x, items)
    family, mode = _KIND[semantics]
    element = _pair_element(x)
    grouped = _group_by_trace(items)
    for datum in grouped.get(x.trace, ()):
        raw = datum.members if family == "classes" else datum
        if (raw == element) if mode == "exact" else not (raw & element):
            return True
    return False


def _pair_element(x) -> frozenset:
    if isinstance(x, PairActs):
        return x.actions
    if isinstance(x, PairTraces):
        return x.traces
    return x.classes


def _word_member(semantics: Semantics, word: Word, paths: frozenset) -> bool:
    family, mode = _KIND[semantics]
    # split the word into the set elements attached to each visited state
    slots: list[list] = [[]]
    acts = []
    for x in word.items:
        if isinstance(x, str):
            acts.append(x)
            slots.append([])
        else:
            slots[-1].append(frozenset(x))
    for path in paths:
        if _path_actions(path) != tuple(acts):
            continue
        data = _path_data(path)
        if all(_fits(family, mode, element, datum) for elements, datum in zip(slots, data) for element in elements):
            return True
    return False


def _fits(family: str, mode: str, element: frozenset, datum) -> bool:
    raw = datum.members if family == "classes" else datum
    return element == raw if mode == "exact" else not (element & raw)


def normalize_word(semantics: Semantics | str, word: Word) -> Word:
    """Merge consecutive set elements.

    Refusal-style elements merge by union.  Equality-style elements merge
    only when identical; two different ones can never both hold at a state,
    and they are left in place.
    """
    semantics = _linear(semantics)
    _, mode = _KIND[semantics]
    out: list = []
    for x in word.items:
        if out and not isinstance(x, str) and not isinstance(out[-1], str):
            if mode == "refusal":
                out[-1] = out[-1] | x
                continue
            if out[-1] == x:
                continue
        out.append(x if isinstance(x, str) else frozenset(x))
    return Word(tuple(out))


def _shrink(semantics: Semantics, x, q: CanonicalProcess):
    """Drop set members from a refusal-style witness while it stays outside X(q)."""
    if semantics not in _KIND or _KIND[semantics][1] != "refusal":
        return x
    if isinstance(x, Word):
        items = list(x.items)
        for i, element in enumerate(items):
            if isinstance(element, str):
                continue
            for member in sorted(element, key=_member_key):
                smaller = items[i] - {member}
                trial = Word(tuple(items[:i] + [smaller] + items[i + 1:]))
                if not obs_member(semantics, trial, q):
                    items[i] = smaller
        return Word(tuple(items))
    element = _pair_element(x)
    for member in sorted(element, key=_member_key):
        trial = _replace_element(x, element - {member})
        if not obs_member(semantics, trial, q):
            element = element - {member}
    return _replace_element(x, element)


def _member_key(m):
    if isinstance(m, CanonicalProcess):
        return (1, m.sort_key)
    if isinstance(m, tuple):
        return (0, len(m), m)
    return (0, 0, m)


def _replace_element(x, element):
    if isinstance(x, PairActs):
        return PairActs(x.trace, frozenset(element))
    if isinstance(x, PairTraces):
        return PairTraces(x.trace, frozenset(element))
    return PairClasses(x.trace, frozenset(element))


# ---------------------------------------------------------------------------
# Rendering


def _fmt_trace(t: tuple) -> str:
    return format_trace(t) or "ε"


def _fmt_element(element) -> str:
    parts = []
    for m in sorted(element, key=_member_key):
        if isinstance(m, CanonicalProcess):
            parts.append(m.text)
        elif isinstance(m, tuple):
            parts.append(_fmt_trace(m))
        else:
            parts.append(m)
    return "{" + ", ".join(parts) + "}"


def describe(x: Observation) -> str:
    """Human-readable rendering, e.g. ``(a,{c})`` or ``a{a,b}``."""
    if isinstance(x, TraceObs):
        return _fmt_trace(x.trace)
    if isinstance(x, Word):
        return "".join(m if isinstance(m, str) else _fmt_element(m).replace(", ", ",") for m in x.items) or "ε"
    return f"({_fmt_trace(x.trace)},{_fmt_element(_pair_element(x)).replace(', ', ',')})"


_PAIR_KEYS = {
    S.F: ("pair-acts", "refuse"), S.R: ("pair-acts", "ready"),
    S.IF: ("pair-traces", "impossible"), S.PF: ("pair-traces", "possible"),
    S.IS: ("pair-classes", "impossible"), S.PS: ("pair-classes", "possible"),
}
_WORD_KEYS = {
    S.FT: "refuse", S.RT: "ready", S.IFT: "impossible", S.PFT: "possible",
    S.IST: "impossible", S.PST: "possible",
}


def _json_element(element) -> list:
    out = []
    for m in sorted(element, key=_member_key):
        if isinstance(m, CanonicalProcess):
            out.append(m.text)
        elif isinstance(m, tuple):
            out.append(format_trace(m))
        else:
            out.append(m)
    return out


def observation_to_json(semantics: Semantics | str, x: Observation) -> dict:
    """JSON encoding: ``{"kind": "pair-acts", "trace": "a", "refuse": ["b"]}`` and siblings."""
    semantics = _linear(semantics)
    if isinstance(x, TraceObs):
        kind = "complete-trace" if semantics is S.CT else "trace"
        return {"kind": kind, "trace": format_trace(x.trace)}
    if isinstance(x, Word):
        key = _WORD_KEYS[semantics]
        items = [m if isinstance(m, str) else {key: _json_element(m)} for m in x.items]
        return {"kind": "word", "items": items}
    kind, key = _PAIR_KEYS[semantics]
    return {"kind": kind, "trace": format_trace(x.trace), key: _json_element(_pair_element(x))}


def observation_json(semantics, x) -> str:
    return json.dumps(observation_to_json(semantics, x), sort_keys=True)


# ---------------------------------------------------------------------------
# Literal bounded enumeration (validation oracle)


@dataclass(frozen=True)
class ObservationBudget:
    """Bounds for :func:`xfin_bruteforce`.

    ``set_size`` caps the cardinality of impossible-trace / impossible-process
    sets, ``word_length`` overrides the 2·depth+1 bound on words, and
    ``element_depth`` overrides depth+1 as the bound on the traces and
    processes that may appear in those sets.  Comparing two processes needs
    the same bounds on both sides.
    """

    set_size: int | None = None
    word_length: int | None = None
    element_depth: int | None = None
    max_items: int = 2_000_000


def _bounded_subsets(pool: Sequence, limit: int | None) -> Iterator[frozenset]:
    top = len(pool) if limit is None else min(limit, len(pool))
    for k in range(top + 1):
        for chosen in combinations(pool, k):
            yield frozenset(chosen)


def _element_pool(semantics: Semantics, p: CanonicalProcess, alphabet, budget: ObservationBudget):
    """Candidate set elements for the impossible-style semantics."""
    family, _ = _KIND[semantics]
    if family == "acts":
        return list(_bounded_subsets(sorted(alphabet), None))
    if family == "traces":
        if budget.set_size is None:
            raise BudgetExceeded("impossible-trace sets need a set_size budget", None, 0)
        depth = p.depth + 1 if budget.element_depth is None else budget.element_depth
        return list(_bounded_subsets(words_up_to(alphabet, depth), budget.set_size))
    if budget.set_size is None:
        raise BudgetExceeded("impossible-process sets need a set_size budget", None, 0)
    depth = p.depth + 1 if budget.element_depth is None else budget.element_depth
    universe = enumerate_universe(alphabet, depth)
    return list(_bounded_subsets(universe.members, budget.set_size))


def _state_matches(semantics: Semantics, element: frozenset, state: CanonicalProcess, alphabet) -> bool:
    family, mode = _KIND[semantics]
    if family == "acts":
        datum = state.initials
    elif family == "traces":
        datum = state.traces
    else:
        universe = enumerate_universe(alphabet, state.depth)
        datum = sim_class_set(state, universe)
    return element == datum if mode == "exact" else not (element & datum)


def _exact_elements(semantics: Semantics, state: CanonicalProcess, alphabet) -> list:
    family, _ = _KIND[semantics]
    if family == "acts":
        return [state.initials]
    if family == "traces":
        return [state.traces]
    return [sim_class_set(state, enumerate_universe(alphabet, state.depth))]


def xfin_bruteforce(semantics: Semantics | str, p: Process, alphabet: Sequence[str],
                    budget: ObservationBudget | None = None) -> frozenset:
    """Enumerate the bounded observation set of ``p`` straight from the definitions.

    Simulated-process sets are computed by filtering an enumerated universe
    and words by running the arrow system, so nothing here reuses the
    canonical summaries.
    """
    return _xfin(_linear(semantics), canonicalize(p), tuple(sorted(alphabet)), budget or ObservationBudget())


@lru_cache(maxsize=4096)
def _xfin(semantics: Semantics, p: CanonicalProcess, alphabet: tuple, budget: ObservationBudget) -> frozenset:
    states = _unfold(p)
    if semantics is S.T:
        return frozenset(TraceObs(t) for t, _ in states)
    if semantics is S.CT:
        return frozenset(TraceObs(t) for t, s in states if not s.children)
    family, mode = _KIND[semantics]
    if not semantics.is_word:
        cls = {"acts": PairActs, "traces": PairTraces, "classes": PairClasses}[family]
        result = set()
        if mode == "exact":
            for trace, state in states:
                for element in _exact_elements(semantics, state, alphabet):
                    result.add(cls(trace, element))
            return frozenset(result)
        pool = _element_pool(semantics, p, alphabet, budget)
        for trace, state in states:
            for element in pool:
                if _state_matches(semantics, element, state, alphabet):
                    result.add(cls(trace, element))
                    if len(result) > budget.max_items:
                        raise BudgetExceeded(f"X^fin({p}) for {semantics}", len(result), budget.max_items)
        return frozenset(result)
    length = 2 * p.depth + 1 if budget.word_length is None else budget.word_length
    pool = None if mode == "exact" else _element_pool(semantics, p, alphabet, budget)
    words: set = set()

    def emit(state, prefix, room):
        words.add(Word(prefix))
        if len(words) > budget.max_items:
            raise BudgetExceeded(f"X^fin({p}) for {semantics}", len(words), budget.max_items)
        if room == 0:
            return
        for a, c in state.children:
            emit(c, prefix + (a,), room - 1)
        options = _exact_elements(semantics, state, alphabet) if pool is None else \
            [e for e in pool if _state_matches(semantics, e, state, alphabet)]
        for element in options:
            emit(state, prefix + (element,), room - 1)

    emit(p, (), length)
    return frozenset(words)


def _unfold(p: CanonicalProcess) -> list[tuple[tuple, CanonicalProcess]]:
    """All (trace, state) pairs by plain recursive unfolding."""
    out = [((), p)]
    for a, c in p.children:
        out.extend(((a,) + t, s) for t, s in _unfold(c))
    return out
