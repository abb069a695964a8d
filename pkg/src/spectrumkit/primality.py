"""Consistency, primality and characteristic-formula verdicts over a universe.

A formula of a logic L_X has an upward-closed model set.  Its minimal models
(one per ≡_X class) form its representation; the formula is characteristic
exactly when that representation is a single process, and otherwise the
representation splits into two formulas that cover the models while neither
covers them alone, so the formula is not prime.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BudgetExceeded, InvariantViolation
from .logic import (FF, TT, ZERO, Box, ConfDiamond, Diamond, Formula, GRAMMARS, ReadySet, Semantics, TraceSet,
                    box_seq, conj, disj, grammar_check, modal_depth, sat_mask, size)
from .process import (NIL, CanonicalProcess, Prefix, Process, Universe, canonicalize, enumerate_universe,
                      random_process, sum_of)
from .spectrum import holds, up_masks

S = Semantics


def _index(universe: Universe, p: Process) -> int:
    p = canonicalize(p)
    if p not in universe.index:
        raise ValueError(f"{p} is not a member of {universe!r}")
    return universe.index[p]


def up_closure_mask(semantics: Semantics | str, p: Process, universe: Universe) -> int:
    """Members of ``universe`` above ``p`` in ≼_X, as a bit mask."""
    return up_masks(semantics, universe)[_index(universe, p)]


def _minimal_indices(semantics: Semantics, mask: int, universe: Universe, order) -> list[int]:
    ups = up_masks(semantics, universe)
    inside = [i for i in order if mask >> i & 1]
    # i is minimal when every model below it is also above it
    minimal = [i for i in inside
               if all(not (ups[j] >> i & 1) or ups[i] >> j & 1 for j in inside if j != i)]
    chosen: list[int] = []
    for i in minimal:
        if not any(ups[i] >> j & 1 for j in chosen):
            chosen.append(i)
    return chosen


def minimal_models(semantics: Semantics | str, f: Formula, universe: Universe,
                   reverse: bool = False) -> tuple[CanonicalProcess, ...]:
    """≼_X-minimal models of ``f`` in ``universe``, one per ≡_X class.

    Members are scanned in canonical order, so each class is represented by
    its least member by (depth, node count, printed form); ``reverse`` scans
    the other way round and is used to cross-check uniqueness.
    """
    semantics = Semantics.parse(semantics)
    order = range(len(universe) - 1, -1, -1) if reverse else range(len(universe))
    indices = _minimal_indices(semantics, sat_mask(f, universe), universe, order)
    return tuple(universe.members[i] for i in indices)


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Inconsistent:
    name = "inconsistent"


@dataclass(frozen=True)
class Characteristic:
    pivot: CanonicalProcess
    chi: Formula
    name = "characteristic"


@dataclass(frozen=True)
class NonPrime:
    witnesses: tuple[Formula, Formula]
    representation: tuple[CanonicalProcess, ...]
    name = "non-prime"


def verdict(semantics: Semantics | str, f: Formula, universe: Universe):
    """Classify ``f`` as inconsistent, characteristic or not prime within ``universe``."""
    from .charform import chi

    semantics = Semantics.parse(semantics)
    if not grammar_check(semantics, f, universe.alphabet):
        raise ValueError(f"{f} is not a formula of the {semantics.value} logic")
    sat = sat_mask(f, universe)
    if not sat:
        return Inconsistent()
    ups = up_masks(semantics, universe)
    rep = _minimal_indices(semantics, sat, universe, range(len(universe)))
    covered = 0
    for i in rep:
        covered |= ups[i]
    if covered != sat:
        raise InvariantViolation(f"models of {f} are not upward closed under {semantics.value}")
    members = universe.members
    if len(rep) == 1:
        return Characteristic(members[rep[0]], chi(semantics, members[rep[0]], universe))
    first, *rest = (members[i] for i in rep)
    witnesses = (chi(semantics, first, universe), disj(*(chi(semantics, p, universe) for p in rest)))
    return NonPrime(witnesses, tuple(members[i] for i in rep))


def verdicts_agree(semantics: Semantics | str, left, right) -> bool:
    """Same kind of verdict with ≡_X-equivalent pivots or representations."""
    semantics = Semantics.parse(semantics)
    if type(left) is not type(right):
        return False
    if isinstance(left, Characteristic):
        return _equivalent(semantics, left.pivot, right.pivot)
    if isinstance(left, NonPrime):
        return len(left.representation) == len(right.representation) and all(
            any(_equivalent(semantics, p, q) for q in right.representation) for p in left.representation)
    return True


def stable_at_next_depth(semantics: Semantics | str, f: Formula, universe: Universe) -> bool | None:
    """Whether the verdict within ``universe`` survives one more level of depth.

    Minimal models may lie deeper than the modal depth of ``f`` (in CS,
    ``<a>tt`` has the incomparable minimal models a.0, a.a.0, ...), so a
    verdict is only a statement about its universe.  ``None`` means the
    deeper universe is over the class cap.
    """
    try:
        deeper = enumerate_universe(universe.alphabet, universe.max_depth + 1)
    except BudgetExceeded:
        return None
    return verdicts_agree(semantics, verdict(semantics, f, universe), verdict(semantics, f, deeper))


def verdict_record(semantics: Semantics | str, f: Formula, universe: Universe, validate: bool = False) -> dict:
    """JSON-ready summary of :func:`verdict`, optionally re-checked one level deeper."""
    semantics = Semantics.parse(semantics)
    result = verdict(semantics, f, universe)
    record = {"formula": f.text, "semantics": semantics.value, "verdict": result.name,
              "universeBound": {"alphabet": list(universe.alphabet), "maxDepth": universe.max_depth}}
    if validate:
        record["stableAtNextDepth"] = stable_at_next_depth(semantics, f, universe)
    if isinstance(result, Characteristic):
        record["pivot"] = result.pivot.text
        record["chi"] = result.chi.text
    elif isinstance(result, NonPrime):
        record["witnesses"] = [w.text for w in result.witnesses]
        record["representation"] = [p.text for p in result.representation]
    return record


# ---------------------------------------------------------------------------
# Random formulas


_ATOMS = ("tt", "ff", "zero", "ready", "traceset", "boxff", "boxseqff")


class FormulaSampler:
    """Seeded random formulas of one logic, bottom-up over its grammar.

    Every sample passes :func:`grammar_check`, has at most ``max_size`` nodes
    and modal depth at most ``max_depth``.
    """

    def __init__(self, semantics: Semantics | str, alphabet: Sequence[str], max_depth: int = 2,
                 max_size: int = 12, seed: int = 0):
        self.semantics = Semantics.parse(semantics)
        self.grammar = GRAMMARS[self.semantics]
        self.alphabet = tuple(sorted(alphabet))
        self.max_depth = max_depth
        self.max_size = max_size
        self.rng = random.Random(seed)

    def __iter__(self):
        while True:
            yield self.sample()

    def sample(self) -> Formula:
        for _ in range(10_000):
            f = self._gen("phi", self.rng.randint(max(1, self.max_size // 3), self.max_size), self.max_depth)
            if f is None:
                continue
            if size(f) <= self.max_size and modal_depth(f) <= self.max_depth \
                    and grammar_check(self.semantics, f, self.alphabet):
                return f
        raise RuntimeError(f"could not sample a {self.semantics.value} formula")

    def take(self, n: int, consistent_in: Universe | None = None) -> list[Formula]:
        """``n`` samples, distinct while the sampler keeps finding new ones."""
        out: list[Formula] = []
        seen: set[Formula] = set()
        misses = 0
        while len(out) < n:
            f = self.sample()
            if consistent_in is not None and not sat_mask(f, consistent_in):
                continue
            if f in seen and misses < 50 * n:
                misses += 1
                continue
            seen.add(f)
            out.append(f)
        return out

    def _gen(self, nt: str, budget: int, depth: int) -> Formula | None:
        options = list(self.grammar[nt])
        self.rng.shuffle(options)
        # atoms first on small budgets so recursion terminates, last otherwise
        # so that samples are not dominated by tt and ff
        prefer_atoms = budget <= 1 or self.rng.random() < 0.2
        options.sort(key=lambda prod: (prod[0] in _ATOMS) != prefer_atoms)
        for prod in options:
            f = self._production(prod, budget, depth)
            if f is not None:
                return f
        return None

    def _production(self, prod: tuple, budget: int, depth: int) -> Formula | None:
        kind, rng, acts = prod[0], self.rng, self.alphabet
        if kind == "tt":
            return TT
        if kind == "ff":
            return FF if rng.random() < 0.3 else None
        if kind == "zero":
            return ZERO if depth >= 1 else None
        if kind == "ready":
            return ReadySet(a for a in acts if rng.random() < 0.5) if depth >= 1 else None
        if kind == "traceset":
            if depth < 1:
                return None
            return TraceSet(random_process(rng, acts, depth - 1, 2).traces)
        if kind == "boxff":
            return Box(rng.choice(acts), FF) if depth >= 1 else None
        if kind == "boxseqff":
            if depth < 1:
                return None
            return box_seq(tuple(rng.choice(acts) for _ in range(rng.randint(1, depth))), FF)
        if kind in ("dia", "box", "conf"):
            if depth < 1 or budget < 2:
                return None
            body = self._gen(prod[1], budget - 1, depth - 1)
            if body is None:
                return None
            cls = {"dia": Diamond, "box": Box, "conf": ConfDiamond}[kind]
            return cls(rng.choice(acts), body)
        if kind in ("and*", "or*"):
            if budget < 3:
                return None
            left = rng.randint(1, budget - 2)
            parts = [self._gen(prod[1], left, depth), self._gen(prod[1], budget - 1 - left, depth)]
            if None in parts:
                return None
            return conj(*parts) if kind == "and*" else disj(*parts)
        if kind == "ref":
            return self._gen(prod[1], budget, depth)
        if kind in ("and-prefix", "and-pair", "and-triple"):
            if budget < 3:
                return None
            names = prod[1:]
            share = max(1, (budget - 1) // len(names))
            parts = [self._gen(nt, share, depth) for nt in names]
            if None in parts:
                return None
            return conj(*parts)
        raise ValueError(f"unknown production {prod!r}")


def random_formula_pool(semantics: Semantics | str, universe: Universe, n: int, seed: int) -> list[Formula]:
    sampler = FormulaSampler(semantics, universe.alphabet, universe.max_depth, seed=seed)
    return [sampler.sample() for _ in range(n)]


# ---------------------------------------------------------------------------
# Theorem cross-check


@dataclass
class CrossCheckReport:
    semantics: Semantics
    samples: int = 0
    verdicts: dict = field(default_factory=lambda: {"inconsistent": 0, "characteristic": 0, "non-prime": 0})
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _is_cover(target: int, left: int, right: int) -> bool:
    return target & ~(left | right) == 0


def _equivalent(semantics: Semantics, p: CanonicalProcess, q: CanonicalProcess) -> bool:
    return holds(semantics, p, q) and holds(semantics, q, p)


def cross_check_theorem(semantics: Semantics | str, universe: Universe, sampler=None, samples: int = 100,
                        pool_size: int = 200, seed: int = 0) -> CrossCheckReport:
    """Check that consistent-and-prime coincides with characteristic on samples.

    For each sampled formula: its models are upward closed; a characteristic
    verdict matches the characteristic formula of its pivot and survives a
    search for two-formula covers in a random pool; a non-prime verdict's
    witnesses form a genuine cover with neither side sufficient; and the
    minimal models agree when scanned in reverse.  In addition ``chi`` of a
    random member must come back as characteristic for an equivalent pivot.
    """
    from .charform import chi

    semantics = Semantics.parse(semantics)
    rng = random.Random(seed)
    sampler = sampler or FormulaSampler(semantics, universe.alphabet, universe.max_depth, seed=seed)
    pool = random_formula_pool(semantics, universe, pool_size, seed + 1)
    pool_masks = [sat_mask(g, universe) for g in pool]
    ups = up_masks(semantics, universe)
    report = CrossCheckReport(semantics)

    def fail(f, message):
        report.violations.append(f"{f.text}: {message}")

    for _ in range(samples):
        f = sampler.sample() if hasattr(sampler, "sample") else next(sampler)
        report.samples += 1
        sat = sat_mask(f, universe)
        if any(sat >> i & 1 and ups[i] & ~sat for i in range(len(universe))):
            fail(f, "models are not upward closed")
            continue
        result = verdict(semantics, f, universe)
        report.verdicts[result.name] += 1
        if isinstance(result, Characteristic):
            pivot = universe.index[result.pivot]
            if sat_mask(result.chi, universe) != ups[pivot] or sat != ups[pivot]:
                fail(f, "characteristic verdict disagrees with chi of its pivot")
            for k, second in enumerate(pool_masks):
                if not second >> pivot & 1 or sat & ~second == 0:
                    continue
                if any(_is_cover(sat, first, second) and sat & ~first for first in pool_masks):
                    fail(f, f"covered by two pool formulas, one being {pool[k].text}")
                    break
        elif isinstance(result, NonPrime):
            left, right = (sat_mask(w, universe) for w in result.witnesses)
            if not _is_cover(sat, left, right) or sat & ~left == 0 or sat & ~right == 0:
                fail(f, "non-prime witnesses are not a proper cover")
        forward = minimal_models(semantics, f, universe)
        backward = minimal_models(semantics, f, universe, reverse=True)
        if len(forward) != len(backward) or not all(
                any(_equivalent(semantics, p, q) for q in backward) for p in forward):
            fail(f, "minimal models depend on scan order")
        p = rng.choice(universe.members)
        back = verdict(semantics, chi(semantics, p, universe), universe)
        if not isinstance(back, Characteristic) or not _equivalent(semantics, back.pivot, p):
            fail(f, f"chi of {p} is not characteristic for an equivalent pivot")
    return report


# ---------------------------------------------------------------------------
# Conformance regression


def conformance_chain(k: int) -> CanonicalProcess:
    """``Σ_{i=1..k} a^i b.0``."""
    terms = []
    for i in range(1, k + 1):
        body = Prefix("b", NIL)
        for _ in range(i):
            body = Prefix("a", body)
        terms.append(body)
    return canonicalize(sum_of(terms))
