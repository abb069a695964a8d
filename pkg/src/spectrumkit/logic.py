"""Modal formulas shared by every logic of the spectrum.

One AST serves all twenty-one logics.  Each logic is a filter on that AST,
expressed as a small grammar table checked by nonterminal membership
(:func:`grammar_check`).

Formulas are immutable and compared by their canonical printed form, so
``And``/``Or`` children are kept sorted and nested conjunctions (resp.
disjunctions) are flattened.  The raw constructors keep duplicates and unit
elements; :func:`conj` and :func:`disj` additionally drop ``tt``/``ff`` units
and duplicates.  Synthesised formulas use the latter.
"""

from __future__ import annotations

import re
from enum import Enum
from itertools import product
from typing import Iterable, Sequence

from .errors import ParseError, UnknownAction
from .process import CanonicalProcess, Process, Universe, canonicalize, format_trace, split_trace


class Semantics(Enum):
    S = "S"
    CS = "CS"
    RS = "RS"
    TS = "TS"
    TWO_S = "2S"
    BS = "BS"
    T = "T"
    CT = "CT"
    F = "F"
    FT = "FT"
    R = "R"
    RT = "RT"
    IF = "IF"
    PF = "PF"
    IFT = "IFT"
    PFT = "PFT"
    IS = "IS"
    PS = "PS"
    IST = "IST"
    PST = "PST"
    CONF = "CONF"

    @classmethod
    def parse(cls, name: str | "Semantics") -> "Semantics":
        if isinstance(name, Semantics):
            return name
        try:
            return cls(name.strip().upper())
        except ValueError:
            known = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown semantics {name!r}; expected one of {known}") from None

    @property
    def is_branching(self) -> bool:
        return self in BRANCHING

    @property
    def is_linear(self) -> bool:
        return self in LINEAR

    @property
    def is_word(self) -> bool:
        return self in WORD_SEMANTICS

    def __str__(self) -> str:
        return self.value


BRANCHING = (Semantics.S, Semantics.CS, Semantics.RS, Semantics.TS, Semantics.TWO_S, Semantics.BS)
LINEAR = (Semantics.T, Semantics.CT, Semantics.F, Semantics.FT, Semantics.R, Semantics.RT,
          Semantics.IF, Semantics.PF, Semantics.IFT, Semantics.PFT,
          Semantics.IS, Semantics.PS, Semantics.IST, Semantics.PST)
WORD_SEMANTICS = (Semantics.FT, Semantics.RT, Semantics.IFT, Semantics.PFT, Semantics.IST, Semantics.PST)
SPECTRUM = BRANCHING + LINEAR
ALL_SEMANTICS = SPECTRUM + (Semantics.CONF,)


# ---------------------------------------------------------------------------
# AST


class Formula:
    """Base class; equality and hashing go through the canonical text."""

    __slots__ = ("text", "_hash")
    precedence = 3  # 1: disjunction, 2: conjunction, 3: everything else

    def _set_text(self, text: str) -> None:
        self.text = text
        self._hash = hash(text)

    def __eq__(self, other) -> bool:
        return isinstance(other, Formula) and self._hash == other._hash and self.text == other.text

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.text}>"

    @property
    def children(self) -> tuple["Formula", ...]:
        return ()


class _Constant(Formula):
    __slots__ = ()

    def __init__(self, text: str):
        self._set_text(text)


class Top(_Constant):
    __slots__ = ()


class Bottom(_Constant):
    __slots__ = ()


class Zero(_Constant):
    """No action is enabled: ``⋀_{a∈Act} [a]ff``."""

    __slots__ = ()


TT = Top("tt")
FF = Bottom("ff")
ZERO = Zero("0f")


class _Junction(Formula):
    __slots__ = ("_children",)
    symbol = ""

    def __init__(self, children: Iterable[Formula]):
        flat: list[Formula] = []
        for c in children:
            if type(c) is type(self):
                flat.extend(c.children)
            else:
                flat.append(c)
        if not flat:
            raise ValueError(f"{type(self).__name__} needs at least one operand")
        flat.sort(key=lambda c: c.text)
        self._children = tuple(flat)
        parts = (f"({c.text})" if c.precedence < self.precedence else c.text for c in flat)
        self._set_text(self.symbol.join(parts))

    @property
    def children(self) -> tuple[Formula, ...]:
        return self._children


class And(_Junction):
    __slots__ = ()
    precedence = 2
    symbol = " /\\ "


class Or(_Junction):
    __slots__ = ()
    precedence = 1
    symbol = " \\/ "


class _Unary(Formula):
    __slots__ = ("body",)

    def _wrap(self) -> str:
        return self.body.text if self.body.precedence == 3 else f"({self.body.text})"

    @property
    def children(self) -> tuple[Formula, ...]:
        return (self.body,)


class _Modal(_Unary):
    __slots__ = ("action",)
    brackets = ("", "")

    def __init__(self, action: str, body: Formula):
        self.action = action
        self.body = body
        left, right = self.brackets
        self._set_text(f"{left}{action}{right}{self._wrap()}")


class Diamond(_Modal):
    __slots__ = ()
    brackets = ("<", ">")


class Box(_Modal):
    """``[a]f``, shorthand for ``~<a>~f``."""

    __slots__ = ()
    brackets = ("[", "]")


class ConfDiamond(_Modal):
    """Conformance modality: ``a`` is enabled and every ``a``-successor satisfies the body."""

    __slots__ = ()
    brackets = ("<!", ">")


class Neg(_Unary):
    __slots__ = ()

    def __init__(self, body: Formula):
        self.body = body
        self._set_text(f"~{self._wrap()}")


class ReadySet(Formula):
    """Exactly the actions in ``actions`` are enabled."""

    __slots__ = ("actions",)

    def __init__(self, actions: Iterable[str]):
        self.actions = frozenset(actions)
        self._set_text("ready{" + ",".join(sorted(self.actions)) + "}")


class TraceSet(Formula):
    """The trace set is exactly ``traces``."""

    __slots__ = ("traces",)

    def __init__(self, traces: Iterable[Sequence[str]]):
        self.traces = frozenset(tuple(t) for t in traces)
        self._set_text("traces{" + format_trace_set(self.traces) + "}")


def format_trace_set(traces: Iterable[tuple]) -> str:
    traces = sorted(traces, key=lambda t: (len(t), t))
    compact = all(len(a) == 1 for t in traces for a in t)
    return ",".join(format_trace(t, compact) or "-" for t in traces)


SUGAR = (Zero, ReadySet, TraceSet)


# ---------------------------------------------------------------------------
# Smart constructors


def conj(*fs: Formula) -> Formula:
    """Conjunction modulo associativity, commutativity, idempotence, unit and zero."""
    seen: dict[str, Formula] = {}
    for f in fs:
        for c in (f.children if isinstance(f, And) else (f,)):
            if c == FF:
                return FF
            if c != TT:
                seen.setdefault(c.text, c)
    if not seen:
        return TT
    if len(seen) == 1:
        return next(iter(seen.values()))
    return And(seen.values())


def disj(*fs: Formula) -> Formula:
    """Disjunction modulo associativity, commutativity, idempotence, unit and zero."""
    seen: dict[str, Formula] = {}
    for f in fs:
        for c in (f.children if isinstance(f, Or) else (f,)):
            if c == TT:
                return TT
            if c != FF:
                seen.setdefault(c.text, c)
    if not seen:
        return FF
    if len(seen) == 1:
        return next(iter(seen.values()))
    return Or(seen.values())


def diamond_seq(trace: Sequence[str], body: Formula) -> Formula:
    """``<a1><a2>...body``; the empty sequence gives ``body`` itself."""
    for a in reversed(tuple(trace)):
        body = Diamond(a, body)
    return body


def box_seq(trace: Sequence[str], body: Formula) -> Formula:
    for a in reversed(tuple(trace)):
        body = Box(a, body)
    return body


# ---------------------------------------------------------------------------
# Desugaring and negation normal form


def words_up_to(alphabet: Sequence[str], length: int) -> list[tuple]:
    """All action sequences of length at most ``length``, shortest first."""
    result = []
    for n in range(length + 1):
        result.extend(product(sorted(alphabet), repeat=n))
    return result


def expand_sugar(f: Formula, alphabet: Sequence[str]) -> Formula:
    """One-step expansion of a sugar node into modal operators."""
    acts = sorted(alphabet)
    if isinstance(f, Zero):
        return conj(*(Box(a, FF) for a in acts))
    if isinstance(f, ReadySet):
        return conj(*(Diamond(a, TT) for a in acts if a in f.actions),
                    *(Box(a, FF) for a in acts if a not in f.actions))
    if isinstance(f, TraceSet):
        longest = max((len(t) for t in f.traces), default=0)
        return conj(*(diamond_seq(t, TT) for t in f.traces),
                    *(box_seq(t, FF) for t in words_up_to(acts, longest + 1) if t not in f.traces))
    return f


def desugar(f: Formula, alphabet: Sequence[str]) -> Formula:
    """An equivalent formula over ``tt, ff, /\\, \\/, <a>, ~`` (and ``<!a>``)."""
    if isinstance(f, SUGAR):
        return desugar(expand_sugar(f, alphabet), alphabet)
    if isinstance(f, Box):
        return Neg(Diamond(f.action, Neg(desugar(f.body, alphabet))))
    if isinstance(f, Diamond):
        return Diamond(f.action, desugar(f.body, alphabet))
    if isinstance(f, ConfDiamond):
        return ConfDiamond(f.action, desugar(f.body, alphabet))
    if isinstance(f, Neg):
        return Neg(desugar(f.body, alphabet))
    if isinstance(f, And):
        return And(desugar(c, alphabet) for c in f.children)
    if isinstance(f, Or):
        return Or(desugar(c, alphabet) for c in f.children)
    return f


def nnf(f: Formula, alphabet: Sequence[str] | None = None, negate: bool = False) -> Formula:
    """Push negations inwards using De Morgan and modal duality.

    Negated sugar nodes are expanded first, which requires ``alphabet``.
    Conformance modalities have no dual here; a negated one stays negated.
    """
    if isinstance(f, Top):
        return FF if negate else TT
    if isinstance(f, Bottom):
        return TT if negate else FF
    if isinstance(f, Neg):
        return nnf(f.body, alphabet, not negate)
    if isinstance(f, And):
        parts = [nnf(c, alphabet, negate) for c in f.children]
        return Or(parts) if negate else And(parts)
    if isinstance(f, Or):
        parts = [nnf(c, alphabet, negate) for c in f.children]
        return And(parts) if negate else Or(parts)
    if isinstance(f, Diamond):
        body = nnf(f.body, alphabet, negate)
        return Box(f.action, body) if negate else Diamond(f.action, body)
    if isinstance(f, Box):
        body = nnf(f.body, alphabet, negate)
        return Diamond(f.action, body) if negate else Box(f.action, body)
    if isinstance(f, ConfDiamond):
        inner = ConfDiamond(f.action, nnf(f.body, alphabet))
        return Neg(inner) if negate else inner
    if isinstance(f, SUGAR):
        if not negate:
            return f
        if alphabet is None:
            raise ValueError(f"negated {f.text} needs an alphabet to expand")
        return nnf(expand_sugar(f, alphabet), alphabet, True)
    raise TypeError(f"not a formula: {f!r}")


def modal_depth(f: Formula) -> int:
    """Maximal nesting of modalities; sugar counts as its expansion."""
    if isinstance(f, _Modal):
        return 1 + modal_depth(f.body)
    if isinstance(f, (Zero, ReadySet)):
        return 1
    if isinstance(f, TraceSet):
        return 1 + max((len(t) for t in f.traces), default=0)
    return max((modal_depth(c) for c in f.children), default=0)


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in f.children)


def actions_of(f: Formula) -> frozenset:
    found = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, _Modal):
            found.add(g.action)
        elif isinstance(g, ReadySet):
            found |= g.actions
        elif isinstance(g, TraceSet):
            found.update(a for t in g.traces for a in t)
        stack.extend(g.children)
    return frozenset(found)


# ---------------------------------------------------------------------------
# Satisfaction


def satisfies(p: Process, f: Formula) -> bool:
    """Whether ``p`` is a model of ``f``.

    Sugar nodes are evaluated directly; over processes whose actions lie in
    the alphabet this agrees with evaluating :func:`desugar` of the node.
    """
    return _holds(canonicalize(p), f, {})


def _holds(p: CanonicalProcess, f: Formula, memo: dict) -> bool:
    key = (p, f)
    if key in memo:
        return memo[key]
    if isinstance(f, Top):
        result = True
    elif isinstance(f, Bottom):
        result = False
    elif isinstance(f, And):
        result = all(_holds(p, c, memo) for c in f.children)
    elif isinstance(f, Or):
        result = any(_holds(p, c, memo) for c in f.children)
    elif isinstance(f, Neg):
        result = not _holds(p, f.body, memo)
    elif isinstance(f, Diamond):
        result = any(_holds(c, f.body, memo) for c in p.successors(f.action))
    elif isinstance(f, Box):
        result = all(_holds(c, f.body, memo) for c in p.successors(f.action))
    elif isinstance(f, ConfDiamond):
        kids = p.successors(f.action)
        result = bool(kids) and all(_holds(c, f.body, memo) for c in kids)
    elif isinstance(f, Zero):
        result = not p.children
    elif isinstance(f, ReadySet):
        result = p.initials == f.actions
    elif isinstance(f, TraceSet):
        result = p.traces == f.traces
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[key] = result
    return result


def sat_mask(f: Formula, universe: Universe) -> int:
    """Models of ``f`` within ``universe`` as a bit mask over its members."""
    cache = universe.eval_cache
    found = cache.get(f)
    if found is not None:
        return found
    if isinstance(f, Top):
        mask = universe.full_mask
    elif isinstance(f, Bottom):
        mask = 0
    elif isinstance(f, And):
        mask = universe.full_mask
        for c in f.children:
            mask &= sat_mask(c, universe)
            if not mask:
                break
    elif isinstance(f, Or):
        mask = 0
        for c in f.children:
            mask |= sat_mask(c, universe)
    elif isinstance(f, Neg):
        mask = universe.full_mask ^ sat_mask(f.body, universe)
    elif isinstance(f, _Modal):
        body = sat_mask(f.body, universe)
        rows = universe.successor_masks.get(f.action)
        if rows is None:
            rows = [(i, 0) for i in range(len(universe))]
        mask = 0
        if isinstance(f, Diamond):
            for i, kids in rows:
                if kids & body:
                    mask |= 1 << i
        elif isinstance(f, Box):
            for i, kids in rows:
                if not kids & ~body:
                    mask |= 1 << i
        else:
            for i, kids in rows:
                if kids and not kids & ~body:
                    mask |= 1 << i
    elif isinstance(f, Zero):
        mask = universe.mask_where(lambda p: not p.children)
    elif isinstance(f, ReadySet):
        mask = universe.mask_where(lambda p: p.initials == f.actions)
    elif isinstance(f, TraceSet):
        mask = universe.mask_where(lambda p: p.traces == f.traces)
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[f] = mask
    return mask


def sat_set(f: Formula, universe: Universe) -> frozenset:
    """``{p ∈ universe | p ⊨ f}``."""
    return universe.from_mask(sat_mask(f, universe))


# ---------------------------------------------------------------------------
# Grammars
#
# A grammar maps nonterminals to productions.  Production kinds:
#   tt, ff, zero, ready, traceset      atoms (zero and ready{} are interchangeable)
#   boxff                             [a]ff
#   boxseqff                          [a1]...[ak]ff with k >= 1
#   dia N, box N, conf N               one modality over N
#   and* N, or* N                      n-ary closure of N
#   ref N                             N itself
#   and-prefix A N                    A /\ N   (N derives tt)
#   and-pair A B                      A /\ B   (both derive tt)
#   and-triple A B N                  A /\ B /\ N


def _closure(nt: str, *extra) -> list:
    return [("tt",), ("ff",), ("and*", nt), ("or*", nt), *extra]


def _linear(psi: list, **others) -> dict:
    return {"phi": _closure("phi", ("ref", "psi")), "psi": psi, **others}


_ANY_UNIVERSAL = _closure("forall", ("box", "forall"))
_ANY_EXISTENTIAL = _closure("exists", ("dia", "exists"))
_IMPOSSIBLE_SIM = _closure("gamma", ("box", "gamma"))

GRAMMARS: dict[Semantics, dict[str, list]] = {
    Semantics.S: {"phi": _closure("phi", ("dia", "phi"))},
    Semantics.CS: {"phi": _closure("phi", ("dia", "phi"), ("zero",))},
    Semantics.RS: {"phi": _closure("phi", ("dia", "phi"), ("boxff",))},
    Semantics.TS: {"phi": _closure("phi", ("dia", "phi"), ("ref", "psi")),
                   "psi": [("ff",), ("box", "psi")]},
    Semantics.TWO_S: {"phi": _closure("phi", ("dia", "phi"), ("ref", "forall")),
                      "forall": _ANY_UNIVERSAL},
    Semantics.BS: {"phi": _closure("phi", ("dia", "phi"), ("box", "phi"))},
    Semantics.CONF: {"phi": _closure("phi", ("conf", "phi"))},
    Semantics.T: _linear([("tt",), ("dia", "psi")]),
    Semantics.CT: _linear([("tt",), ("zero",), ("dia", "psi")]),
    Semantics.F: _linear([("tt",), ("dia", "psi"), ("ref", "gamma")],
                         gamma=[("boxff",), ("and*", "gamma")]),
    Semantics.R: _linear([("tt",), ("ready",), ("dia", "psi")]),
    Semantics.FT: _linear([("tt",), ("boxff",), ("dia", "psi"), ("and-prefix", "refusal", "psi")],
                          refusal=[("boxff",)]),
    Semantics.RT: _linear([("tt",), ("and-prefix", "ready", "psi"), ("dia", "psi")],
                          ready=[("ready",)]),
    Semantics.IF: _linear([("tt",), ("dia", "psi"), ("ref", "gamma")],
                          gamma=[("boxseqff",), ("and*", "gamma")]),
    Semantics.PF: _linear([("tt",), ("traceset",), ("dia", "psi")]),
    Semantics.IFT: _linear([("tt",), ("boxseqff",), ("dia", "psi"), ("and-prefix", "impossible", "psi")],
                           impossible=[("boxseqff",)]),
    Semantics.PFT: _linear([("tt",), ("and-prefix", "possible", "psi"), ("dia", "psi")],
                           possible=[("traceset",)]),
    Semantics.IS: _linear([("tt",), ("dia", "psi"), ("ref", "gamma")], gamma=_IMPOSSIBLE_SIM),
    Semantics.PS: _linear([("tt",), ("dia", "psi"), ("and-pair", "exists", "forall")],
                          exists=_ANY_EXISTENTIAL, forall=_ANY_UNIVERSAL),
    Semantics.IST: _linear([("tt",), ("dia", "psi"), ("and-prefix", "gamma", "psi")], gamma=_IMPOSSIBLE_SIM),
    Semantics.PST: _linear([("tt",), ("dia", "psi"), ("and-triple", "exists", "forall", "psi")],
                           exists=_ANY_EXISTENTIAL, forall=_ANY_UNIVERSAL),
}


class _Membership:
    """Memoized nonterminal membership for one grammar."""

    def __init__(self, semantics: Semantics, alphabet: Sequence[str] | None):
        self.grammar = GRAMMARS[semantics]
        self.alphabet = alphabet
        self.memo: dict = {}

    def member(self, nt: str, f: Formula) -> bool:
        key = (nt, f)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = False  # productions are guarded, so no left recursion reaches here
        result = any(self.matches(prod, f) for prod in self.grammar[nt])
        if not result and isinstance(f, SUGAR) and self.alphabet is not None:
            result = self.member(nt, nnf(expand_sugar(f, self.alphabet), self.alphabet))
        self.memo[key] = result
        return result

    def matches(self, prod: tuple, f: Formula) -> bool:
        kind = prod[0]
        if kind == "tt":
            return f == TT
        if kind == "ff":
            return f == FF
        if kind in ("zero", "ready"):
            empty_ready = isinstance(f, ReadySet) and not f.actions
            return isinstance(f, Zero) or empty_ready or (kind == "ready" and isinstance(f, ReadySet))
        if kind == "traceset":
            return isinstance(f, TraceSet)
        if kind == "boxff":
            return isinstance(f, Box) and f.body == FF
        if kind == "boxseqff":
            return isinstance(f, Box) and (f.body == FF or self.matches(prod, f.body))
        if kind == "dia":
            return isinstance(f, Diamond) and self.member(prod[1], f.body)
        if kind == "box":
            return isinstance(f, Box) and self.member(prod[1], f.body)
        if kind == "conf":
            return isinstance(f, ConfDiamond) and self.member(prod[1], f.body)
        if kind == "and*":
            return isinstance(f, And) and all(self.member(prod[1], c) for c in f.children)
        if kind == "or*":
            return isinstance(f, Or) and all(self.member(prod[1], c) for c in f.children)
        if kind == "ref":
            return self.member(prod[1], f)
        if kind == "and-prefix":
            _, head, tail = prod
            if not isinstance(f, And):
                return self.member(head, f) and self.member(tail, TT)
            rest = [c for c in f.children if not self.member(head, c)]
            if not rest:
                return self.member(tail, TT)
            return len(rest) == 1 and self.member(tail, rest[0])
        if kind == "and-pair":
            _, left, right = prod
            if not isinstance(f, And):
                return ((self.member(left, f) and self.member(right, TT))
                        or (self.member(right, f) and self.member(left, TT)))
            return all(self.member(left, c) or self.member(right, c) for c in f.children)
        if kind == "and-triple":
            _, left, right, tail = prod
            if not isinstance(f, And):
                return self.member(left, f) or self.member(right, f) or self.member(tail, f)
            rest = [c for c in f.children if not (self.member(left, c) or self.member(right, c))]
            if not rest:
                return True
            return len(rest) == 1 and self.member(tail, rest[0])
        raise ValueError(f"unknown production {prod!r}")


def _prepare(f: Formula, alphabet) -> Formula:
    needs_nnf = any(isinstance(g, Neg) for g in _subformulas(f))
    return nnf(f, alphabet) if needs_nnf else f


def _subformulas(f: Formula):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(g.children)


def grammar_check(semantics: Semantics | str, f: Formula, alphabet: Sequence[str] | None = None) -> bool:
    """Whether ``f`` belongs to the logic of ``semantics``.

    Negations are first pushed inwards, so ``~<a>tt`` counts as ``[a]ff``.
    Sugar nodes are accepted where their grammar names them and otherwise
    judged by their expansion, which needs ``alphabet``.
    """
    semantics = Semantics.parse(semantics)
    try:
        g = _prepare(f, alphabet)
    except ValueError:
        return False
    return _Membership(semantics, alphabet).member("phi", g)


def grammar_explain(semantics: Semantics | str, f: Formula, alphabet: Sequence[str] | None = None) -> str | None:
    """``None`` when ``f`` is in the logic, else a description of an offending subformula."""
    semantics = Semantics.parse(semantics)
    try:
        g = _prepare(f, alphabet)
    except ValueError as exc:
        return str(exc)
    checker = _Membership(semantics, alphabet)
    if checker.member("phi", g):
        return None
    nonterminals = list(checker.grammar)
    culprit = g
    while True:
        bad = [c for c in culprit.children if not any(checker.member(nt, c) for nt in nonterminals)]
        if not bad:
            break
        culprit = bad[0]
    return f"{culprit.text} is not derivable in the {semantics.value} logic"


# ---------------------------------------------------------------------------
# Parsing

_IDENT = r"[a-z][a-zA-Z0-9_]*"
_FORMULA_TOKEN = re.compile(rf"""\s*(?:
    <tau:(?P<dseq>[^>]*)>
  | \[tau:(?P<bseq>[^\]]*)\]
  | <!(?P<conf>{_IDENT})>
  | <(?P<dia>{_IDENT})>
  | \[(?P<box>{_IDENT})\]
  | ready\{{(?P<ready>[^}}]*)\}}
  | traces\{{(?P<traces>[^}}]*)\}}
  | (?P<kw>tt|ff|0f)
  | (?P<op>/\\|\\/|~|\(|\))
)""", re.X)


class _FormulaParser:
    def __init__(self, text: str, alphabet: Iterable[str] | None):
        self.text = text
        self.alphabet = frozenset(alphabet) if alphabet is not None else None
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _FORMULA_TOKEN.match(text, pos)
            if m is None:
                if not text[pos:].strip():
                    break
                offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[offset]!r}", text, offset)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) if kind else pos))
            pos = m.end()
        self.i = 0

    def action(self, name: str) -> str:
        if self.alphabet is not None and name not in self.alphabet:
            raise UnknownAction(name, self.alphabet)
        return name

    def trace(self, text: str) -> tuple:
        text = text.strip()
        if text in ("", "-"):
            return ()
        if self.alphabet is None:
            return tuple(text.split(".")) if "." in text else tuple(text)
        return split_trace(text, self.alphabet)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def parse(self) -> Formula:
        f = self.disjunction()
        kind, value, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected {value!r}", self.text, pos)
        return f

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.peek()[1] == "\\/":
            self.i += 1
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(parts)

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[1] == "/\\":
            self.i += 1
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(parts)

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind is None:
            raise ParseError("unexpected end of input", self.text, pos)
        self.i += 1
        if kind == "op" and value == "~":
            return Neg(self.unary())
        if kind == "dia":
            return Diamond(self.action(value), self.unary())
        if kind == "box":
            return Box(self.action(value), self.unary())
        if kind == "conf":
            return ConfDiamond(self.action(value), self.unary())
        if kind == "dseq":
            return diamond_seq(self.trace(value), self.unary())
        if kind == "bseq":
            return box_seq(self.trace(value), self.unary())
        if kind == "kw":
            return {"tt": TT, "ff": FF, "0f": ZERO}[value]
        if kind == "ready":
            names = [n.strip() for n in value.split(",") if n.strip()]
            return ReadySet(self.action(n) for n in names)
        if kind == "traces":
            items = [t for t in value.split(",")] if value.strip() else []
            return TraceSet(self.trace(t) for t in items)
        if kind == "op" and value == "(":
            inner = self.disjunction()
            k, v, p = self.peek()
            if v != ")":
                raise ParseError(f"expected ')', found {v!r}" if v else "expected ')'", self.text, p)
            self.i += 1
            return inner
        raise ParseError(f"unexpected {value!r}", self.text, pos)


def parse_formula(text: str, alphabet: Iterable[str] | None = None) -> Formula:
    """Parse the concrete formula syntax; see the package README for the grammar."""
    return _FormulaParser(text, alphabet).parse()


def format_formula(f: Formula) -> str:
    return f.text
