"""Branching-time preorders on finite trees, plus conformance simulation.

Each preorder is the largest relation closed under its defining clauses.  On
finite trees that relation is computed by structural recursion over pairs of
canonical processes, memoized per pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable

from .errors import BudgetExceeded
from .logic import Semantics
from .process import CanonicalProcess, Process, Universe, canonicalize, class_cap


@dataclass(frozen=True)
class Witness:
    """Where a preorder check fails.

    ``path`` is the action sequence leading from the root pair to the pair
    whose defining clause breaks; ``observation`` is filled in for linear
    semantics with an element of X(p) missing from X(q).
    """

    path: tuple = ()
    reason: str = ""
    observation: object = None

    def __str__(self) -> str:
        where = ".".join(self.path) if self.path else "root"
        return f"at {where}: {self.reason}"


@dataclass(frozen=True)
class PreorderVerdict:
    holds: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.holds


_CACHE_SIZE = 1 << 20


def _step(related: Callable, p: CanonicalProcess, q: CanonicalProcess) -> bool:
    """Every move of ``p`` is answered by an equally labelled move of ``q``."""
    return all(any(related(p1, q1) for q1 in q.successors(a)) for a, p1 in p.children)


@lru_cache(maxsize=_CACHE_SIZE)
def simulated(p: CanonicalProcess, q: CanonicalProcess) -> bool:
    return p is q or _step(simulated, p, q)


@lru_cache(maxsize=_CACHE_SIZE)
def _complete_sim(p, q) -> bool:
    return (not p.children) == (not q.children) and _step(_complete_sim, p, q)


@lru_cache(maxsize=_CACHE_SIZE)
def _ready_sim(p, q) -> bool:
    return p.initials == q.initials and _step(_ready_sim, p, q)


@lru_cache(maxsize=_CACHE_SIZE)
def _trace_sim(p, q) -> bool:
    return p.traces == q.traces and _step(_trace_sim, p, q)


@lru_cache(maxsize=_CACHE_SIZE)
def _two_sim(p, q) -> bool:
    return simulated(q, p) and _step(_two_sim, p, q)


@lru_cache(maxsize=_CACHE_SIZE)
def _bisim(p, q) -> bool:
    return _step(_bisim, p, q) and _step(_bisim, q, p)


@lru_cache(maxsize=_CACHE_SIZE)
def _conformance(p, q) -> bool:
    if not p.initials <= q.initials:
        return False
    return all(any(_conformance(p1, q1) for p1 in p.successors(a))
               for a, q1 in q.children if a in p.initials)


_RELATIONS = {
    Semantics.S: simulated,
    Semantics.CS: _complete_sim,
    Semantics.RS: _ready_sim,
    Semantics.TS: _trace_sim,
    Semantics.TWO_S: _two_sim,
    Semantics.BS: _bisim,
    Semantics.CONF: _conformance,
}


def _fmt(actions) -> str:
    return "{" + ",".join(sorted(actions)) + "}"


def _local_failure(semantics: Semantics, p: CanonicalProcess, q: CanonicalProcess) -> str | None:
    """The non-recursive clause of ``semantics`` when it fails at (p, q)."""
    if semantics is Semantics.CS and (not p.children) != (not q.children):
        return "termination differs: exactly one side has no initials"
    if semantics is Semantics.RS and p.initials != q.initials:
        return f"initials differ: I(p)={_fmt(p.initials)}, I(q)={_fmt(q.initials)}"
    if semantics is Semantics.TS and p.traces != q.traces:
        return "trace sets differ"
    if semantics is Semantics.TWO_S and not simulated(q, p):
        return f"q={q} is not simulated by p={p}"
    if semantics is Semantics.CONF and not p.initials <= q.initials:
        return f"initials not included: I(p)={_fmt(p.initials)}, I(q)={_fmt(q.initials)}"
    return None


def _explain(semantics, related, p, q, path=()) -> Witness:
    reason = _local_failure(semantics, p, q)
    if reason is not None:
        return Witness(path, reason)
    # (action, move, answers, side): a move by ``side`` and the other side's replies
    moves = []
    if semantics is not Semantics.CONF:
        moves += [(a, p1, q.successors(a), "p") for a, p1 in p.children]
    if semantics in (Semantics.BS, Semantics.CONF):
        moves += [(a, q1, p.successors(a), "q") for a, q1 in q.children
                  if semantics is Semantics.BS or a in p.initials]
    for a, mine, answers, side in moves:
        pairs = [(mine, o) if side == "p" else (o, mine) for o in answers]
        if any(related(*pair) for pair in pairs):
            continue
        if len(pairs) == 1:
            return _explain(semantics, related, *pairs[0], path + (a,))
        other = "q" if side == "p" else "p"
        return Witness(path + (a,), f"{side} --{a}--> {mine} has no matching {a}-move in {other}")
    return Witness(path, "no failing clause found")


def preorder(semantics: Semantics | str, p: Process, q: Process) -> PreorderVerdict:
    """Decide ``p ≼ q`` for a branching semantics or conformance."""
    semantics = Semantics.parse(semantics)
    if semantics not in _RELATIONS:
        raise ValueError(f"{semantics} is not a branching semantics; use linear_preorder")
    p, q = canonicalize(p), canonicalize(q)
    related = _RELATIONS[semantics]
    if related(p, q):
        return PreorderVerdict(True)
    return PreorderVerdict(False, _explain(semantics, related, p, q))


def related(semantics: Semantics, p: CanonicalProcess, q: CanonicalProcess) -> bool:
    """Boolean fast path of :func:`preorder` for canonical arguments."""
    return _RELATIONS[semantics](p, q)


def sim_class_set(p: Process, universe: Universe) -> frozenset:
    """Members of ``universe`` simulated by ``p``."""
    p = canonicalize(p)
    return frozenset(c for c in universe.members if simulated(c, p))


@lru_cache(maxsize=1 << 16)
def simulated_below(p: CanonicalProcess) -> frozenset:
    """Every canonical process simulated by ``p``, generated directly.

    ``r ≼_S p`` iff each move ``r --a--> r'`` is matched by some
    ``p --a--> p'`` with ``r' ≼_S p'``, so the answer is the set of all
    processes whose children are drawn from those pairs.
    """
    pool = sorted({(a, r) for a, p1 in p.children for r in simulated_below(p1)},
                  key=lambda ar: (ar[0], ar[1].sort_key))
    cap = class_cap()
    if len(pool) > cap.bit_length():
        raise BudgetExceeded(f"processes simulated by {p}", 1 << len(pool), cap)
    return frozenset(CanonicalProcess(chosen)
                     for k in range(len(pool) + 1) for chosen in combinations(pool, k))


def max_succ(p: Process, action: str) -> frozenset:
    """The ``action``-successors of ``p`` not strictly simulated by a sibling."""
    kids = canonicalize(p).successors(action)
    return frozenset(k for k in kids
                     if not any(simulated(k, o) and not simulated(o, k) for o in kids))


def minimal_unsimulated(p: CanonicalProcess, alphabet: tuple) -> tuple:
    """The ≼_S-minimal processes not simulated by ``p`` (one per ≡_S class).

    A minimal such process has a single move ``a.r`` where ``r`` escapes every
    ``a``-successor of ``p``; escaping several successors at once means
    joining one minimal escape for each of them.
    """
    return _minimal_unsimulated(p, tuple(sorted(alphabet)))


@lru_cache(maxsize=1 << 16)
def _minimal_unsimulated(p: CanonicalProcess, alphabet: tuple) -> tuple:
    candidates = []
    for a in alphabet:
        options = [_minimal_unsimulated(k, alphabet) for k in p.successors(a)]
        choices = [()]
        for opts in options:
            choices = [chosen + (m,) for chosen in choices for m in opts]
        for chosen in choices:
            candidates.append(CanonicalProcess([(a, CanonicalProcess(pair for m in chosen for pair in m.children))]))
    return minimal_elements(candidates, simulated)


def minimal_elements(items, leq) -> tuple:
    """≼-minimal items, one per equivalence class, in sort order."""
    ordered = sorted(set(items), key=lambda x: x.sort_key)
    minimal = [x for x in ordered if not any(leq(y, x) and not leq(x, y) for y in ordered)]
    result: list = []
    for x in minimal:
        if not any(leq(x, y) and leq(y, x) for y in result):
            result.append(x)
    return tuple(result)


def maximal_elements(items, leq) -> tuple:
    return minimal_elements(items, lambda x, y: leq(y, x))
