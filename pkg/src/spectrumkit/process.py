"""Finite tree processes: terms, transitions, canonical forms and universes.

Terms follow the grammar ``P ::= 0 | a.P | P + P``.  Every term is a finite
loop-free transition system.  :func:`canonicalize` maps a term to an
interned :class:`CanonicalProcess`, a recursively deduplicated set of
``(action, child)`` pairs; two terms share a canonical value exactly when
they are bisimilar.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from contextvars import ContextVar
import random
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union

from .errors import BudgetExceeded, ParseError, UnknownAction

DEFAULT_CLASS_CAP = 100_000
CLASS_CAP_ENV = "SPECTRUMKIT_CLASS_CAP"

Trace = tuple  # tuple[str, ...]


_cap_override: ContextVar[int | None] = ContextVar("class_cap_override", default=None)


def class_cap() -> int:
    """The active cap on enumerated classes.

    A :func:`capped` block wins over the environment, which wins over the default.
    """
    override = _cap_override.get()
    if override is not None:
        return override
    raw = os.environ.get(CLASS_CAP_ENV)
    if raw is None:
        return DEFAULT_CLASS_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError(f"{CLASS_CAP_ENV} must be positive, got {cap}")
    return cap


@contextmanager
def capped(cap: int):
    """Run a block with ``cap`` as the class cap."""
    if cap < 1:
        raise ValueError(f"class cap must be positive, got {cap}")
    token = _cap_override.set(cap)
    try:
        yield
    finally:
        _cap_override.reset(token)


# ---------------------------------------------------------------------------
# Syntactic terms


@dataclass(frozen=True)
class Nil:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Prefix:
    action: str
    cont: "Process"

    def __str__(self) -> str:
        inner = str(self.cont)
        if isinstance(self.cont, Sum):
            inner = f"({inner})"
        return f"{self.action}.{inner}"


@dataclass(frozen=True)
class Sum:
    left: "Process"
    right: "Process"

    def __str__(self) -> str:
        right = str(self.right)
        if isinstance(self.right, Sum):
            right = f"({right})"
        return f"{self.left} + {right}"


Term = Union[Nil, Prefix, Sum]
NIL = Nil()


def summands(p: Term) -> Iterator[Prefix]:
    """The prefix summands of a term, flattening nested sums."""
    if isinstance(p, Sum):
        yield from summands(p.left)
        yield from summands(p.right)
    elif isinstance(p, Prefix):
        yield p


def sum_of(terms: Sequence[Term]) -> Term:
    """Left-nested sum of ``terms``; the empty sum is ``0``."""
    if not terms:
        return NIL
    result = terms[0]
    for t in terms[1:]:
        result = Sum(result, t)
    return result


# ---------------------------------------------------------------------------
# Canonical processes


class CanonicalProcess:
    """A bisimulation class of finite trees, represented by its children.

    Instances are interned: equal children give the identical object, so
    ``is``/``==`` coincide with bisimilarity and hashing is by identity.
    """

    _interned: dict = {}

    def __new__(cls, children: Iterable[tuple[str, "CanonicalProcess"]] = ()):
        kids = tuple(sorted(set(children), key=lambda ac: (ac[0], ac[1].text)))
        found = cls._interned.get(kids)
        if found is not None:
            return found
        self = object.__new__(cls)
        self.children = kids
        self.initials = frozenset(a for a, _ in kids)
        self.depth = 1 + max((c.depth for _, c in kids), default=-1)
        self.size = 1 + sum(c.size for _, c in kids)
        self.text = _canonical_text(kids)
        by_action: dict[str, tuple] = {}
        for a, c in kids:
            by_action.setdefault(a, ())
            by_action[a] = by_action[a] + (c,)
        self._by_action = by_action
        return cls._interned.setdefault(kids, self)

    def successors(self, action: str) -> tuple["CanonicalProcess", ...]:
        return self._by_action.get(action, ())

    @cached_property
    def actions(self) -> frozenset:
        """Every action occurring anywhere in the tree."""
        found = set(self.initials)
        for _, c in self.children:
            found |= c.actions
        return frozenset(found)

    @cached_property
    def traces(self) -> frozenset:
        result = {()}
        for a, c in self.children:
            result.update((a,) + t for t in c.traces)
        return frozenset(result)

    @cached_property
    def complete_traces(self) -> frozenset:
        if not self.children:
            return frozenset({()})
        return frozenset((a,) + t for a, c in self.children for t in c.complete_traces)

    @property
    def sort_key(self) -> tuple:
        """Deterministic order: depth, then node count, then printed form."""
        return (self.depth, self.size, self.text)

    def __lt__(self, other: "CanonicalProcess") -> bool:
        return self.sort_key < other.sort_key

    def __reduce__(self):
        return (CanonicalProcess, (self.children,))

    def __repr__(self) -> str:
        return f"CanonicalProcess({self.text!r})"

    def __str__(self) -> str:
        return self.text

    def to_term(self) -> Term:
        return sum_of([Prefix(a, c.to_term()) for a, c in self.children])


def _canonical_text(kids) -> str:
    if not kids:
        return "0"
    parts = []
    for a, c in kids:
        inner = c.text if len(c.children) < 2 else f"({c.text})"
        parts.append(f"{a}.{inner}")
    return " + ".join(parts)


NIL_CLASS = CanonicalProcess()

Process = Union[Nil, Prefix, Sum, CanonicalProcess]


def canonicalize(p: Process) -> CanonicalProcess:
    if isinstance(p, CanonicalProcess):
        return p
    return CanonicalProcess((s.action, canonicalize(s.cont)) for s in summands(p))


def join(*ps: CanonicalProcess) -> CanonicalProcess:
    """The sum of canonical processes (least upper bound under simulation)."""
    return CanonicalProcess(pair for p in ps for pair in p.children)


# ---------------------------------------------------------------------------
# Derived attributes, defined on terms and canonical values alike


def transitions(p: Process) -> set:
    """The set of ``(action, successor)`` pairs of ``p``."""
    if isinstance(p, CanonicalProcess):
        return set(p.children)
    return {(s.action, s.cont) for s in summands(p)}


def initials(p: Process) -> frozenset:
    return canonicalize(p).initials


def traces(p: Process) -> frozenset:
    return canonicalize(p).traces


def depth(p: Process) -> int:
    return canonicalize(p).depth


def node_count(p: Process) -> int:
    return canonicalize(p).size


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[a-z][a-zA-Z0-9_]*)|(?P<sym>[0.+()]))")


class _ProcessParser:
    def __init__(self, text: str, alphabet):
        self.text = text
        self.alphabet = frozenset(alphabet) if alphabet is not None else None
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                rest = text[pos:]
                if rest.strip():
                    offset = pos + len(rest) - len(rest.lstrip())
                    raise ParseError(f"unexpected character {text[offset]!r}", text, offset)
                break
            kind = "ident" if m.group("ident") else "sym"
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def expect(self, value: str) -> None:
        _, tok, pos = self.peek()
        if tok != value:
            found = "end of input" if tok is None else repr(tok)
            raise ParseError(f"expected {value!r}, found {found}", self.text, pos)
        self.i += 1

    def parse(self) -> Term:
        term = self.sum()
        _, tok, pos = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok!r}", self.text, pos)
        return term

    def sum(self) -> Term:
        term = self.prefix()
        while self.peek()[1] == "+":
            self.i += 1
            term = Sum(term, self.prefix())
        return term

    def prefix(self) -> Term:
        kind, tok, pos = self.peek()
        if tok == "0":
            self.i += 1
            return NIL
        if tok == "(":
            self.i += 1
            term = self.sum()
            self.expect(")")
            return term
        if kind == "ident":
            if self.alphabet is not None and tok not in self.alphabet:
                raise UnknownAction(tok, self.alphabet)
            self.i += 1
            self.expect(".")
            return Prefix(tok, self.prefix())
        found = "end of input" if tok is None else repr(tok)
        raise ParseError(f"expected a process, found {found}", self.text, pos)


def parse_process(text: str, alphabet: Iterable[str] | None = None) -> Term:
    """Parse ``text``; ``+`` binds loosest and associates to the left."""
    return _ProcessParser(text, alphabet).parse()


# ---------------------------------------------------------------------------
# Universes


def _parse_alphabet(alphabet: Iterable[str]) -> tuple[str, ...]:
    acts = tuple(sorted(set(alphabet)))
    if not acts:
        raise ValueError("alphabet must contain at least one action")
    for a in acts:
        if not re.fullmatch(r"[a-z][a-zA-Z0-9_]*", a):
            raise ValueError(f"invalid action name {a!r}")
    return acts


class Universe:
    """A successor-closed, duplicate-free collection of canonical processes.

    Built by :func:`enumerate_universe` it holds one representative for every
    bisimulation class of depth at most ``max_depth``.  Formula evaluation
    over a universe works on bit masks indexed by member position.
    """

    def __init__(self, alphabet: Iterable[str], members: Iterable[CanonicalProcess],
                 max_depth: int | None = None):
        self.alphabet = _parse_alphabet(alphabet)
        closed: set[CanonicalProcess] = set()
        stack = list(members)
        while stack:
            p = stack.pop()
            if p in closed:
                continue
            closed.add(p)
            stack.extend(c for _, c in p.children)
        self.members: tuple[CanonicalProcess, ...] = tuple(sorted(closed, key=lambda p: p.sort_key))
        stray = set().union(*(p.actions for p in self.members)) - set(self.alphabet)
        if stray:
            raise UnknownAction(min(stray), self.alphabet)
        self.max_depth = max_depth if max_depth is not None else max(p.depth for p in self.members)
        self.index = {p: i for i, p in enumerate(self.members)}
        self.full_mask = (1 << len(self.members)) - 1
        # per action: (member index, mask of its successors) for members with successors
        self.successor_masks: dict[str, list[tuple[int, int]]] = {}
        for a in self.alphabet:
            rows = []
            for i, p in enumerate(self.members):
                kids = p.successors(a)
                mask = 0
                for c in kids:
                    mask |= 1 << self.index[c]
                rows.append((i, mask))
            self.successor_masks[a] = rows
        self.eval_cache: dict = {}

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[CanonicalProcess]:
        return iter(self.members)

    def __contains__(self, p) -> bool:
        return canonicalize(p) in self.index

    def mask_of(self, processes: Iterable[CanonicalProcess]) -> int:
        mask = 0
        for p in processes:
            mask |= 1 << self.index[p]
        return mask

    def from_mask(self, mask: int) -> frozenset:
        return frozenset(p for i, p in enumerate(self.members) if mask >> i & 1)

    def mask_where(self, predicate) -> int:
        mask = 0
        for i, p in enumerate(self.members):
            if predicate(p):
                mask |= 1 << i
        return mask

    def restricted(self, max_depth: int) -> "Universe":
        return Universe(self.alphabet, [p for p in self.members if p.depth <= max_depth], max_depth)

    def __repr__(self) -> str:
        return f"Universe(alphabet={list(self.alphabet)}, max_depth={self.max_depth}, size={len(self)})"


def projected_class_count(alphabet_size: int, max_depth: int, limit_bits: int = 4096) -> int | None:
    """Number of bisimulation classes of depth ≤ ``max_depth``.

    The count satisfies c(0) = 1 and c(d) = 2 ** (|Act| * c(d-1)).  Returns
    ``None`` when the count exceeds ``2 ** limit_bits``.
    """
    count = 1
    for _ in range(max_depth):
        exponent = alphabet_size * count
        if exponent > limit_bits:
            return None
        count = 1 << exponent
    return count


def enumerate_universe(alphabet: Iterable[str], max_depth: int, cap: int | None = None) -> Universe:
    """All bisimulation classes of depth ≤ ``max_depth``, built bottom-up."""
    acts = _parse_alphabet(alphabet)
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    cap = class_cap() if cap is None else cap
    projected = projected_class_count(len(acts), max_depth)
    if projected is None or projected > cap:
        raise BudgetExceeded(f"universe over {{{','.join(acts)}}} at depth {max_depth}", projected, cap)
    layer = [NIL_CLASS]
    for _ in range(max_depth):
        pairs = [(a, c) for a in acts for c in layer]
        layer = [CanonicalProcess(chosen) for chosen in _subsets(pairs)]
    return Universe(acts, layer, max_depth)


def _subsets(items: Sequence) -> Iterator[tuple]:
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def random_process(rng: random.Random, alphabet: Sequence[str], max_depth: int,
                   max_branching: int = 3) -> CanonicalProcess:
    """A random canonical process of depth at most ``max_depth``."""
    if max_depth == 0:
        return NIL_CLASS
    width = rng.randint(0, max_branching)
    return CanonicalProcess(
        (rng.choice(alphabet), random_process(rng, alphabet, rng.randint(0, max_depth - 1), max_branching))
        for _ in range(width)
    )


def format_trace(trace: Trace, compact: bool = True) -> str:
    """Render a trace; single-character actions are run together."""
    if compact and all(len(a) == 1 for a in trace):
        return "".join(trace)
    return ".".join(trace)


def split_trace(text: str, alphabet: Iterable[str]) -> Trace:
    """Inverse of :func:`format_trace`; dots are the unambiguous form."""
    acts = frozenset(alphabet)
    if not text:
        return ()
    if "." in text:
        parts = tuple(text.split("."))
    elif all(ch in acts for ch in text):
        parts = tuple(text)
    else:
        parts = (text,)
    for a in parts:
        if a not in acts:
            raise UnknownAction(a, acts)
    return parts
