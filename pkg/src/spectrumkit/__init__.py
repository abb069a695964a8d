"""Behavioural preorders, characteristic formulae and primality for finite tree processes."""

from .branching import PreorderVerdict, Witness, max_succ, preorder, sim_class_set
from .charform import (AlreadyCharacteristic, BSet, Decomposition, Inconsistent, b_set, bar_chi, chi, decompose,
                       obs_formula, sim_by)
from .errors import BudgetExceeded, InvariantViolation, ParseError, UnknownAction
from .linear import (CanonicalObsSet, ObservationBudget, PairActs, PairClasses, PairTraces, TraceObs, Word,
                     canonical_obs, linear_preorder, normalize_word, obs_member, xfin_bruteforce)
from .logic import (ALL_SEMANTICS, BRANCHING, LINEAR, SPECTRUM, Formula, Semantics, conj, desugar, disj,
                    grammar_check, nnf, parse_formula, sat_set, satisfies)
from .primality import Characteristic, FormulaSampler, NonPrime, cross_check_theorem, minimal_models, verdict
from .process import (CanonicalProcess, Universe, canonicalize, depth, enumerate_universe, initials,
                      parse_process, traces, transitions)
from .spectrum import ARROWS, check, comparison_matrix, equiv

__all__ = [name for name in dir() if not name.startswith("_")]
