"""One entry point for all 21 semantics, and the spectrum's implication arrows."""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from . import branching, linear
from .branching import PreorderVerdict
from .logic import ALL_SEMANTICS, Semantics
from .process import CanonicalProcess, Process, Universe, canonicalize

S = Semantics

# finer → coarser: ``p ≼_finer q`` implies ``p ≼_coarser q``
ARROWS: tuple[tuple[Semantics, Semantics], ...] = (
    (S.BS, S.TWO_S), (S.TWO_S, S.TS), (S.TS, S.RS), (S.RS, S.CS), (S.CS, S.S),
    (S.TWO_S, S.PST), (S.TS, S.PFT), (S.RS, S.RT), (S.CS, S.CT), (S.S, S.T),
    (S.RT, S.FT), (S.RT, S.R), (S.FT, S.F), (S.R, S.F),
    (S.RT, S.CT), (S.R, S.CT), (S.F, S.CT), (S.FT, S.CT), (S.CT, S.T),
    (S.PFT, S.IFT), (S.PFT, S.PF), (S.IFT, S.IF), (S.PF, S.IF),
    (S.PST, S.IST), (S.PST, S.PS), (S.IST, S.IS), (S.PS, S.IS),
    (S.PST, S.PFT), (S.PFT, S.RT), (S.IST, S.IFT), (S.IFT, S.FT),
    (S.PS, S.PF), (S.PF, S.R), (S.IS, S.IF), (S.IF, S.F),
)


def check(semantics: Semantics | str, p: Process, q: Process,
          alphabet: Sequence[str] | None = None) -> PreorderVerdict:
    """Decide ``p ≼_X q`` with a witness on failure, for any semantics."""
    semantics = Semantics.parse(semantics)
    if semantics.is_linear:
        return linear.linear_preorder(semantics, p, q, alphabet=alphabet)
    return branching.preorder(semantics, p, q)


def holds(semantics: Semantics, p: CanonicalProcess, q: CanonicalProcess) -> bool:
    """Boolean ``p ≼_X q`` for canonical arguments."""
    if semantics.is_linear:
        return linear.holds(semantics, p, q)
    return branching.related(semantics, p, q)


def equiv(semantics: Semantics | str, p: Process, q: Process) -> bool:
    semantics = Semantics.parse(semantics)
    p, q = canonicalize(p), canonicalize(q)
    return holds(semantics, p, q) and holds(semantics, q, p)


def comparison_matrix(p: Process, q: Process) -> dict[Semantics, tuple[bool, bool]]:
    """``{X: (p ≼_X q, q ≼_X p)}`` for all 21 semantics."""
    p, q = canonicalize(p), canonicalize(q)
    return {x: (holds(x, p, q), holds(x, q, p)) for x in ALL_SEMANTICS}


def arrow_violations(p: Process, q: Process) -> list[tuple[Semantics, Semantics]]:
    """Arrows ``finer → coarser`` whose implication fails on ``(p, q)``."""
    p, q = canonicalize(p), canonicalize(q)
    return [(fine, coarse) for fine, coarse in ARROWS if holds(fine, p, q) and not holds(coarse, p, q)]


@lru_cache(maxsize=64)
def _order_table(semantics: Semantics, universe: Universe) -> tuple[int, ...]:
    members = universe.members
    return tuple(sum(1 << j for j, q in enumerate(members) if holds(semantics, p, q)) for p in members)


def up_masks(semantics: Semantics | str, universe: Universe) -> tuple[int, ...]:
    """For each member index ``i``, the bitmask of members above it in ≼_X."""
    return _order_table(Semantics.parse(semantics), universe)
