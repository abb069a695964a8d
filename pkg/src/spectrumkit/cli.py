"""Command-line interface.

Exit codes: 0 success or the checked property holds, 1 it does not hold,
2 usage or parse error, 3 a size budget was exceeded, 4 an internal
invariant was violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import linear
from .branching import Witness
from .charform import AlreadyCharacteristic, Decomposition, Inconsistent, b_set, bar_chi, chi, decompose
from .errors import BudgetExceeded, InvariantViolation, ParseError, UnknownAction
from .logic import ALL_SEMANTICS, Semantics, grammar_check, grammar_explain, modal_depth, parse_formula, satisfies
from .primality import FormulaSampler, verdict_record
from .process import canonicalize, capped, enumerate_universe, parse_process
from .spectrum import arrow_violations, check, comparison_matrix, equiv
from .verify import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _alphabet(args, required: bool = True) -> tuple[str, ...] | None:
    if args.alphabet is None:
        if required:
            raise UsageError(f"{args.command} needs --alphabet (e.g. --alphabet a,b)")
        return None
    acts = tuple(sorted({a.strip() for a in args.alphabet.split(",") if a.strip()}))
    if not acts:
        raise UsageError("--alphabet must list at least one action")
    return acts


def _semantics(args, allowed=ALL_SEMANTICS) -> Semantics:
    if args.sem is None:
        raise UsageError(f"{args.command} needs --sem")
    sem = Semantics.parse(args.sem)
    if sem not in allowed:
        raise UsageError(f"{args.command} does not support --sem {sem.value}")
    return sem


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


def _witness_json(sem: Semantics, witness: Witness | None):
    if witness is None:
        return None
    out = {"path": list(witness.path), "reason": witness.reason}
    if witness.observation is not None:
        out["observation"] = linear.observation_to_json(sem, witness.observation)
    return out


def _witness_text(witness: Witness | None) -> str:
    if witness is None:
        return ""
    if witness.observation is not None:
        return f"\nwitness: observation {linear.describe(witness.observation)} of p is not an observation of q"
    return f"\nwitness: {witness}"


def cmd_check(args) -> int:
    sem = _semantics(args)
    acts = _alphabet(args, required=False)
    p, q = parse_process(args.p, acts), parse_process(args.q, acts)
    result = check(sem, p, q, alphabet=acts)
    payload = {"semantics": sem.value, "p": str(canonicalize(p)), "q": str(canonicalize(q)),
               "holds": result.holds, "witness": _witness_json(sem, result.witness)}
    status = "holds" if result.holds else "does not hold"
    _emit(args, payload, f"p ≼_{sem.value} q {status}{_witness_text(result.witness)}")
    return EXIT_OK if result.holds else EXIT_NEGATIVE


def cmd_equiv(args) -> int:
    sem = _semantics(args)
    acts = _alphabet(args, required=False)
    p, q = parse_process(args.p, acts), parse_process(args.q, acts)
    same = equiv(sem, p, q)
    payload = {"semantics": sem.value, "p": str(canonicalize(p)), "q": str(canonicalize(q)), "equivalent": same}
    _emit(args, payload, f"p ≡_{sem.value} q {'holds' if same else 'does not hold'}")
    return EXIT_OK if same else EXIT_NEGATIVE


def _bar_chi_or_none(sem, p, acts):
    try:
        return bar_chi(sem, p, acts).text
    except BudgetExceeded:
        return None


def cmd_chi(args) -> int:
    sem = _semantics(args, allowed=ALL_SEMANTICS[:-1])
    acts = _alphabet(args)
    p = canonicalize(parse_process(args.p, acts))
    formula = chi(sem, p, acts)
    if args.format == "json":
        payload = {"semantics": sem.value, "process": p.text, "chi": formula.text,
                   "barChi": _bar_chi_or_none(sem, p, acts), "bSize": len(b_set(sem, p, acts))}
        _emit(args, payload, "")
    else:
        print(formula.text)
    return EXIT_OK


def cmd_barchi(args) -> int:
    sem = _semantics(args, allowed=ALL_SEMANTICS[:-1])
    acts = _alphabet(args)
    p = canonicalize(parse_process(args.p, acts))
    formula = bar_chi(sem, p, acts)
    _emit(args, {"semantics": sem.value, "process": p.text, "barChi": formula.text}, formula.text)
    return EXIT_OK


def cmd_mc(args) -> int:
    acts = _alphabet(args, required=False)
    p = parse_process(args.p, acts)
    f = parse_formula(args.formula, acts)
    result = satisfies(p, f)
    payload = {"process": str(canonicalize(p)), "formula": f.text, "satisfied": result}
    lines = [f"{'satisfied' if result else 'not satisfied'}"]
    if args.sem is not None:
        sem = Semantics.parse(args.sem)
        problem = grammar_explain(sem, f, acts)
        payload["semantics"] = sem.value
        payload["inLogic"] = problem is None
        lines.append(f"in the {sem.value} logic" if problem is None else f"not in the {sem.value} logic: {problem}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if result else EXIT_NEGATIVE


def _universe_for(args, f, acts):
    depth = modal_depth(f) if args.depth is None else args.depth
    return enumerate_universe(acts, depth)


def cmd_decompose(args) -> int:
    sem = _semantics(args, allowed=ALL_SEMANTICS[:-1])
    acts = _alphabet(args)
    f = parse_formula(args.formula, acts)
    if not grammar_check(sem, f, acts):
        raise UsageError(grammar_explain(sem, f, acts))
    universe = _universe_for(args, f, acts)
    result = decompose(sem, f, universe)
    bound = {"alphabet": list(acts), "maxDepth": universe.max_depth}
    if isinstance(result, Inconsistent):
        payload, text = {"formula": f.text, "result": "inconsistent", "universeBound": bound}, "inconsistent"
    elif isinstance(result, AlreadyCharacteristic):
        payload = {"formula": f.text, "result": "characteristic", "pivot": result.pivot.text,
                   "chi": result.chi.text, "universeBound": bound}
        text = f"already characteristic for {result.pivot}\nchi: {result.chi}"
    else:
        assert isinstance(result, Decomposition)
        payload = {"formula": f.text, "result": "decomposition", "pivot": result.pivot.text,
                   "chi": result.chi.text, "remainder": result.remainder.text, "universeBound": bound}
        text = f"pivot: {result.pivot}\nchi: {result.chi}\nremainder: {result.remainder}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_verdict(args) -> int:
    sem = _semantics(args, allowed=ALL_SEMANTICS[:-1])
    acts = _alphabet(args)
    formulas = [parse_formula(text, acts) for text in args.formulas]
    if args.sample:
        depth = 2 if args.depth is None else args.depth
        formulas += FormulaSampler(sem, acts, depth, seed=args.seed).take(args.sample)
    if not formulas:
        raise UsageError("verdict needs formulas or --sample N")
    for f in formulas:
        if not grammar_check(sem, f, acts):
            raise UsageError(grammar_explain(sem, f, acts))
        record = verdict_record(sem, f, _universe_for(args, f, acts), validate=True)
        if args.format == "json":
            print(json.dumps(record, sort_keys=True, ensure_ascii=False))
        else:
            extra = record.get("pivot") or " | ".join(record.get("witnesses", []))
            note = {True: "", False: " [changes at depth {}]", None: " [depth {} not checked]"}
            bound = record["universeBound"]["maxDepth"]
            print(f"{record['formula']}: {record['verdict']}" + (f" ({extra})" if extra else "")
                  + f" at depth {bound}" + note[record["stableAtNextDepth"]].format(bound + 1))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    acts = _alphabet(args, required=False)
    p, q = canonicalize(parse_process(args.p, acts)), canonicalize(parse_process(args.q, acts))
    matrix = comparison_matrix(p, q)
    broken = arrow_violations(p, q) + arrow_violations(q, p)
    if broken:
        raise InvariantViolation("spectrum arrows violated: " + ", ".join(f"{a}⇒{b}" for a, b in broken))
    payload = {"p": p.text, "q": q.text,
               "matrix": {x.value: {"pq": fwd, "qp": bwd} for x, (fwd, bwd) in matrix.items()}}
    rows = [f"{'':5} {'p≼q':>5} {'q≼p':>5}"]
    rows += [f"{x.value:5} {str(fwd):>5} {str(bwd):>5}" for x, (fwd, bwd) in matrix.items()]
    _emit(args, payload, "\n".join(rows))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    acts = _alphabet(args)
    depth = 1 if args.depth is None else args.depth
    universe = enumerate_universe(acts, depth)
    payload = {"alphabet": list(acts), "maxDepth": depth, "count": len(universe),
               "members": [p.text for p in universe.members]}
    _emit(args, payload, "\n".join([f"{len(universe)} classes"] + [p.text for p in universe.members]))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    acts = _alphabet(args, required=False) or ("a", "b")
    semantics = None
    if args.sem is not None:
        semantics = tuple(Semantics.parse(s) for s in args.sem.split(","))
    config = SuiteConfig(alphabet=acts, depth=2 if args.depth is None else args.depth,
                         sample=args.sample, seed=args.seed, semantics=semantics)
    passed = True
    for name in names:
        report = run_suite(name, config)
        passed &= report.passed
        if args.format == "json":
            print(json.dumps(report.to_dict(), sort_keys=True, ensure_ascii=False))
        else:
            print(report.summary())
            for v in report.violations[:10]:
                print(f"  {v}")
    return EXIT_OK if passed else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sem", help="semantics: " + ", ".join(s.value for s in ALL_SEMANTICS))
    common.add_argument("--alphabet", help="comma-separated action names, e.g. a,b")
    common.add_argument("--depth", type=int, help="universe depth bound")
    common.add_argument("--class-cap", type=int, help="cap on enumerated classes")
    common.add_argument("--format", "--emit", dest="format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sample", type=int, help="number of samples")

    parser = argparse.ArgumentParser(prog="spectrumkit", description="Process preorders, characteristic "
                                     "formulae and primality over finite tree processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *positionals):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        for pos, kwargs in positionals:
            cmd.add_argument(pos, **kwargs)
        cmd.set_defaults(func=func)
        return cmd

    add("check", cmd_check, "decide p ≼ q", ("p", {}), ("q", {}))
    add("equiv", cmd_equiv, "decide p ≡ q", ("p", {}), ("q", {}))
    add("chi", cmd_chi, "characteristic formula of p", ("p", {}))
    add("barchi", cmd_barchi, "anti-characteristic formula of p", ("p", {}))
    add("mc", cmd_mc, "model check p against a formula", ("p", {}), ("formula", {}))
    add("decompose", cmd_decompose, "split a formula around a minimal model", ("formula", {}))
    add("verdict", cmd_verdict, "inconsistent / characteristic / non-prime",
        ("formulas", {"nargs": "*"}))
    add("spectrum", cmd_spectrum, "compare p and q under all semantics", ("p", {}), ("q", {}))
    add("enumerate", cmd_enumerate, "list the bisimulation classes of a universe")
    add("verify", cmd_verify, "run a self-check suite", ("suite", {"choices": [*SUITES, "all"]}))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.class_cap is not None and args.class_cap < 1:
            raise UsageError("--class-cap must be at least 1")
        if args.depth is not None and args.depth < 0:
            raise UsageError("--depth must be non-negative")
        if args.class_cap is not None:
            with capped(args.class_cap):
                return args.func(args)
        return args.func(args)
    except (ParseError, UnknownAction, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
