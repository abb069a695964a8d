"""Self-check suites run by ``spectrumkit verify``.

Each suite exercises one family of properties over a bounded universe and
returns a :class:`SuiteReport`; a suite passes when it records no violation.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import linear
from .branching import preorder
from .charform import AlreadyCharacteristic, Decomposition, Inconsistent, bar_chi, chi, decompose
from .linear import ObservationBudget, Word
from .logic import BRANCHING, LINEAR, SPECTRUM, WORD_SEMANTICS, Semantics, sat_mask
from .primality import FormulaSampler, conformance_chain, cross_check_theorem
from .process import Universe, enumerate_universe, random_process
from .spectrum import ARROWS, holds, up_masks

S = Semantics

ENUMERABLE = (S.S, S.CS, S.RS, S.TS, S.TWO_S, S.BS, S.T, S.CT, S.F, S.FT, S.R, S.RT, S.PF, S.PS)
BUDGETED = (S.IF, S.IFT, S.IS, S.IST)
EXACT_ORACLE = (S.T, S.CT, S.F, S.R, S.FT, S.RT, S.PF, S.PS)


@dataclass
class SuiteReport:
    suite: str
    checks: int = 0
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def check(self, condition: bool, message: str) -> None:
        self.checks += 1
        if not condition:
            self.violations.append(message)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": self.checks,
                "violations": self.violations[:50], "notes": self.notes, "seconds": round(self.seconds, 3)}

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}: {self.checks} checks, {len(self.violations)} violations"


@dataclass
class SuiteConfig:
    alphabet: tuple = ("a", "b")
    depth: int = 2
    sample: int | None = None
    seed: int = 0
    semantics: tuple | None = None


def _pairs(universe: Universe, n: int | None, rng: random.Random):
    members = universe.members
    if n is None or n >= len(members) ** 2:
        return list(itertools.product(members, repeat=2))
    return [(rng.choice(members), rng.choice(members)) for _ in range(n)]


def _down_mask(ups, i) -> int:
    return sum(1 << j for j, up in enumerate(ups) if up >> i & 1)


def chi_biconditional(config: SuiteConfig) -> SuiteReport:
    """``q ⊨ chi(X, p)`` iff ``p ≼_X q`` on sampled pairs."""
    report = SuiteReport("chi-biconditional")
    rng = random.Random(config.seed)
    universe = enumerate_universe(config.alphabet, config.depth)
    small = enumerate_universe(config.alphabet[:1], min(config.depth, 2))
    sample = 5000 if config.sample is None else config.sample
    for x in config.semantics or ENUMERABLE + BUDGETED:
        space, pairs = (small, _pairs(small, None, rng)) if x in BUDGETED else (universe, _pairs(universe, sample, rng))
        for p, q in pairs:
            f = chi(x, p, space)
            lhs = bool(sat_mask(f, space) >> space.index[q] & 1)
            report.check(lhs == holds(x, p, q), f"{x}: p={p} q={q}")
    report.notes.append(f"universe {universe!r}, {sample} pairs per semantics; {small!r} exhaustively for "
                        + ", ".join(s.value for s in BUDGETED))
    return report


def barchi_lemmas(config: SuiteConfig) -> SuiteReport:
    """``p ⊭ bar_chi(p)`` and every ``q`` not below ``p`` satisfies it."""
    report = SuiteReport("barchi-lemmas")
    rng = random.Random(config.seed)
    universe = enumerate_universe(config.alphabet, config.depth)
    small = enumerate_universe(config.alphabet[:1], config.depth)
    sample = 50 if config.sample is None else config.sample
    for x in config.semantics or SPECTRUM:
        runs = [(universe, list(universe.members))]
        if x.is_linear:
            # linear anti-characteristic formulae enumerate a universe of their
            # own, so the full universe is sampled and the small one exhausted
            members = list(universe.members)
            runs = [(small, list(small.members)), (universe, rng.sample(members, min(sample, len(members))))]
        for space, subjects in runs:
            ups = up_masks(x, space)
            for p in subjects:
                i = space.index[p]
                mask = sat_mask(bar_chi(x, p, space), space)
                report.check(not mask >> i & 1, f"{x}: {p} satisfies its own bar_chi")
                outside = space.full_mask & ~_down_mask(ups, i)
                report.check(outside & ~mask == 0, f"{x}: some q not below {p} misses bar_chi")
    return report


def decomposition(config: SuiteConfig) -> SuiteReport:
    """``sat(f) = sat(chi(pivot)) ∪ sat(remainder)`` and ``pivot ∉ sat(remainder)``."""
    report = SuiteReport("decomposition")
    universe = enumerate_universe(config.alphabet, config.depth)
    sample = 100 if config.sample is None else config.sample
    for x in config.semantics or SPECTRUM:
        sampler = FormulaSampler(x, universe.alphabet, universe.max_depth, seed=config.seed)
        for f in sampler.take(sample, consistent_in=universe):
            result = decompose(x, f, universe)
            sat = sat_mask(f, universe)
            if isinstance(result, Decomposition):
                left = sat_mask(result.chi, universe)
                right = sat_mask(result.remainder, universe)
                report.check(sat == left | right, f"{x}: {f} is not the union of its parts")
                report.check(not right >> universe.index[result.pivot] & 1, f"{x}: pivot of {f} in remainder")
            elif isinstance(result, AlreadyCharacteristic):
                report.check(sat == sat_mask(result.chi, universe), f"{x}: {f} misreported as characteristic")
            else:
                report.check(isinstance(result, Inconsistent) and not sat, f"{x}: {f} has no decomposition")
    return report


def primality(config: SuiteConfig) -> SuiteReport:
    """Cross-check consistent-and-prime against characteristic on samples."""
    report = SuiteReport("primality")
    universe = enumerate_universe(config.alphabet, config.depth)
    sample = 100 if config.sample is None else config.sample
    for x in config.semantics or SPECTRUM:
        result = cross_check_theorem(x, universe, samples=sample, pool_size=200, seed=config.seed)
        report.checks += result.samples
        report.violations.extend(f"{x}: {v}" for v in result.violations)
        report.notes.append(f"{x}: {result.verdicts}")
    return report


def _oracle_budget(x: Semantics, p, q) -> ObservationBudget:
    d = max(p.depth, q.depth)
    if x in EXACT_ORACLE:
        return ObservationBudget(word_length=2 * d + 1, element_depth=d + 1)
    if x is S.IST:
        # literal IST words over depth d+1 processes are out of reach even here
        return ObservationBudget(set_size=1, word_length=2 * d + 1, element_depth=d)
    return ObservationBudget(set_size=2, word_length=2 * d + 1, element_depth=d + 1)


def oracle_inclusion(x: Semantics, p, q, alphabet) -> bool:
    """Bounded literal inclusion ``X^fin(p) ⊆ X^fin(q)`` under a shared budget."""
    budget = _oracle_budget(x, p, q)
    return linear.xfin_bruteforce(x, p, alphabet, budget) <= linear.xfin_bruteforce(x, q, alphabet, budget)


def linear_oracle(config: SuiteConfig) -> SuiteReport:
    """Canonical linear preorders against literal enumeration of observations.

    Exact for T, CT, F, R, FT, RT, PF, PS; for the impossible families the
    enumeration is budgeted, so only ``preorder ⇒ inclusion`` is required.
    The budgeted families run on the one-action universe.
    """
    report = SuiteReport("linear-oracle")
    rng = random.Random(config.seed)
    universe = enumerate_universe(config.alphabet, config.depth)
    small = enumerate_universe(config.alphabet[:1], min(config.depth, 2))
    sample = 1000 if config.sample is None else config.sample
    for x in config.semantics or EXACT_ORACLE + BUDGETED:
        if x in EXACT_ORACLE:
            for p, q in _pairs(universe, sample, rng):
                verdict = linear.holds(x, p, q)
                report.check(verdict == oracle_inclusion(x, p, q, universe.alphabet), f"{x}: p={p} q={q}")
        else:
            for p, q in _pairs(small, None, rng):
                if linear.holds(x, p, q):
                    report.check(oracle_inclusion(x, p, q, small.alphabet), f"{x}: p={p} q={q}")
                else:
                    report.checks += 1
    return report


def spectrum_lattice(config: SuiteConfig) -> SuiteReport:
    """Every arrow of the spectrum holds between verdicts on sampled pairs."""
    report = SuiteReport("spectrum-lattice")
    rng = random.Random(config.seed)
    universe = enumerate_universe(config.alphabet, config.depth)
    sample = 2000 if config.sample is None else config.sample
    for p, q in _pairs(universe, sample, rng):
        for fine, coarse in ARROWS:
            report.check(not holds(fine, p, q) or holds(coarse, p, q), f"{fine}⇒{coarse}: p={p} q={q}")
        if holds(S.T, p, q):
            report.check(p.depth <= q.depth, f"trace inclusion without depth bound: p={p} q={q}")
    return report


def conformance_chain_suite(config: SuiteConfig) -> SuiteReport:
    """``p_{k+1} ≼_CONF p_k`` and not conversely, for k = 1..4."""
    report = SuiteReport("conformance-chain")
    for k in range(1, 5):
        smaller, larger = conformance_chain(k), conformance_chain(k + 1)
        report.check(bool(preorder(S.CONF, larger, smaller)), f"p_{k + 1} ≼ p_{k} fails")
        report.check(not preorder(S.CONF, smaller, larger), f"p_{k} ≼ p_{k + 1} holds")
    return report


# ---------------------------------------------------------------------------
# Word normalization


def _split_element(x: Semantics, element: frozenset, rng: random.Random) -> list[frozenset]:
    """Break one set element into consecutive pieces with the same meaning."""
    if linear._KIND[x][1] == "exact":
        return [element] * rng.randint(1, 3)
    members = sorted(element, key=linear._member_key)
    pieces: list[set] = [set() for _ in range(rng.randint(1, 3))]
    for m in members:
        rng.choice(pieces).add(m)
    return [frozenset(piece) for piece in pieces]


def random_word(x: Semantics, source, alphabet: Sequence[str], rng: random.Random) -> Word:
    """A word built from an annotated path of ``source``, with sets split or repeated."""
    path = rng.choice(linear._sorted_items(linear.canonical_obs(x, source).items))
    word = linear.item_observation(x, path, alphabet)
    items: list = []
    for element in word.items:
        if isinstance(element, str):
            items.append(element)
        elif rng.random() < 0.8:
            items.extend(_split_element(x, element, rng))
    return Word(tuple(items))


def word_normalization(config: SuiteConfig) -> SuiteReport:
    """Merging consecutive set elements never changes membership; canonical
    words respect the 2·depth+1 length bound; shrinking refusal-style sets
    preserves membership."""
    report = SuiteReport("word-normalization")
    rng = random.Random(config.seed)
    sample = 500 if config.sample is None else config.sample
    alphabet = tuple(config.alphabet)
    for n in range(sample):
        x = rng.choice(config.semantics or WORD_SEMANTICS)
        p = random_process(rng, alphabet, config.depth)
        source = p if rng.random() < 0.5 else random_process(rng, alphabet, config.depth)
        word = random_word(x, source, alphabet, rng)
        merged = linear.normalize_word(x, word)
        member = linear.obs_member(x, word, p)
        report.check(member == linear.obs_member(x, merged, p), f"{x}: {linear.describe(word)} vs {p}")
        report.check(all(not isinstance(a, frozenset) or not isinstance(b, frozenset)
                         for a, b in zip(merged.items, merged.items[1:])),
                     f"{x}: {linear.describe(merged)} keeps adjacent sets")
        for path in linear.canonical_obs(x, p).items:
            report.check(len(path) <= 2 * p.depth + 1, f"{x}: canonical word of {p} too long")
        if member and linear._KIND[x][1] == "refusal":
            smaller = Word(tuple(e if isinstance(e, str) or not e else
                                 frozenset(rng.sample(sorted(e, key=linear._member_key), rng.randint(0, len(e))))
                                 for e in word.items))
            report.check(linear.obs_member(x, smaller, p), f"{x}: shrinking {linear.describe(word)} loses {p}")
    return report


SUITES: dict[str, Callable[[SuiteConfig], SuiteReport]] = {
    "chi-biconditional": chi_biconditional,
    "barchi-lemmas": barchi_lemmas,
    "decomposition": decomposition,
    "primality": primality,
    "linear-oracle": linear_oracle,
    "spectrum-lattice": spectrum_lattice,
    "conformance-chain": conformance_chain_suite,
    "word-normalization": word_normalization,
}


def run_suite(name: str, config: SuiteConfig) -> SuiteReport:
    start = time.perf_counter()
    report = SUITES[name](config)
    report.seconds = time.perf_counter() - start
    return report
