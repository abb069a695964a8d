"""Independent reference implementations used only by the tests.

Everything here works on raw syntactic terms, straight from the textbook
definitions, with no canonical forms, memo tables or bit masks.
"""

from __future__ import annotations

from itertools import combinations, product

from spectrumkit.logic import And, Bottom, Box, ConfDiamond, Diamond, Neg, Or, Top, desugar
from spectrumkit.process import NIL, Nil, Prefix, Sum


def moves(p):
    """Transitions of a term by the two operational rules, as a list."""
    if isinstance(p, Nil):
        return []
    if isinstance(p, Prefix):
        return [(p.action, p.cont)]
    return moves(p.left) + moves(p.right)


def initials(p):
    return {a for a, _ in moves(p)}


def traces(p):
    result = {()}
    for a, c in moves(p):
        result |= {(a,) + t for t in traces(c)}
    return result


def complete_traces(p):
    if not moves(p):
        return {()}
    return {(a,) + t for a, c in moves(p) for t in complete_traces(c)}


def depth(p):
    return max(len(t) for t in traces(p))


# ---------------------------------------------------------------------------
# Branching relations, literally


def _step(rel, p, q):
    return all(any(a == b and rel(p1, q1) for b, q1 in moves(q)) for a, p1 in moves(p))


def sim(p, q):
    return _step(sim, p, q)


def complete_sim(p, q):
    return (not moves(p)) == (not moves(q)) and _step(complete_sim, p, q)


def ready_sim(p, q):
    return initials(p) == initials(q) and _step(ready_sim, p, q)


def trace_sim(p, q):
    return traces(p) == traces(q) and _step(trace_sim, p, q)


def two_sim(p, q):
    return sim(q, p) and _step(two_sim, p, q)


def bisim(p, q):
    return _step(bisim, p, q) and _step(bisim, q, p)


def conformance(p, q):
    if not initials(p) <= initials(q):
        return False
    return all(any(a == b and conformance(p1, q1) for b, p1 in moves(p))
               for a, q1 in moves(q) if a in initials(p))


BRANCHING = {"S": sim, "CS": complete_sim, "RS": ready_sim, "TS": trace_sim, "2S": two_sim, "BS": bisim,
             "CONF": conformance}


# ---------------------------------------------------------------------------
# Linear observation sets for the pair semantics, by definition


def reachable(p, prefix=()):
    yield prefix, p
    for a, c in moves(p):
        yield from reachable(c, prefix + (a,))


def failures(p, alphabet):
    subsets = [frozenset(s) for k in range(len(alphabet) + 1) for s in combinations(sorted(alphabet), k)]
    return {(t, y) for t, s in reachable(p) for y in subsets if not y & initials(s)}


def readies(p):
    return {(t, frozenset(initials(s))) for t, s in reachable(p)}


def possible_futures(p):
    return {(t, frozenset(traces(s))) for t, s in reachable(p)}


def linear_inclusion(name, p, q, alphabet):
    """X(p) ⊆ X(q) for T, CT, F, R, PF computed from literal observation sets."""
    if name == "T":
        return traces(p) <= traces(q)
    if name == "CT":
        return complete_traces(p) <= complete_traces(q) and traces(p) <= traces(q)
    if name == "F":
        return failures(p, alphabet) <= failures(q, alphabet)
    if name == "R":
        return readies(p) <= readies(q)
    if name == "PF":
        return possible_futures(p) <= possible_futures(q)
    raise ValueError(name)


# ---------------------------------------------------------------------------
# Satisfaction of core formulae on terms


def holds(p, f):
    """Satisfaction of a desugared formula, clause by clause."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(holds(p, c) for c in f.children)
    if isinstance(f, Or):
        return any(holds(p, c) for c in f.children)
    if isinstance(f, Neg):
        return not holds(p, f.body)
    if isinstance(f, Diamond):
        return any(a == f.action and holds(c, f.body) for a, c in moves(p))
    if isinstance(f, Box):
        return all(holds(c, f.body) for a, c in moves(p) if a == f.action)
    if isinstance(f, ConfDiamond):
        kids = [c for a, c in moves(p) if a == f.action]
        return bool(kids) and all(holds(c, f.body) for c in kids)
    raise TypeError(f"sugar left in {f}")


def holds_desugared(p, f, alphabet):
    return holds(p, desugar(f, alphabet))


# ---------------------------------------------------------------------------
# Syntactic enumeration


def terms(alphabet, max_depth, max_width=2):
    """Every term built from at most ``max_width`` prefixes per level, as right-nested sums."""
    if max_depth == 0:
        return [NIL]
    smaller = terms(alphabet, max_depth - 1, max_width)
    prefixes = [Prefix(a, c) for a, c in product(sorted(alphabet), smaller)]
    result = [NIL]
    for width in range(1, max_width + 1):
        for chosen in product(prefixes, repeat=width):
            term = chosen[-1]
            for left in reversed(chosen[:-1]):
                term = Sum(left, term)
            result.append(term)
    return result


def class_count(alphabet_size, max_depth):
    """c(0) = 1 and c(d) = 2^(|Act| · c(d-1))."""
    count = 1
    for _ in range(max_depth):
        count = 2 ** (alphabet_size * count)
    return count
