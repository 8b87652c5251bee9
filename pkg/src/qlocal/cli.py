"""Command-line front end: ``qlocal <verb> [options]``.

Exit codes: 0 success, 1 error (bad input or internal failure), 2 a check
failed (for example incompatibility was certified), 3 a budget ran out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .actions import IndexTooLarge
from .catalog import CatalogError, GroupSpec, build_named, corpus_entry, corpus_names, make_group
from .chain import ChainBudgetError
from .compat import (CompatError, DegenerateWitness, HnnBudget, WitnessNotFound, build_witness,
                     necessary_compat_check, problem_from_json, witness_digraph)
from .digraphs import Digraph, local_action, orbital_digraph, strongly_connected, weakly_connected
from .group import GroupError, PermGroup
from .perm import Permutation, PermutationError
from .qp import QPError, classify_qp, is_quasiprimitive
from .structure import (DEFAULT_BUDGET, Budget, BudgetExceeded, composition_multiset, is_soluble,
                        minimal_normal_subgroups, simple_sections)
from .subgroups import TableTooLarge

EXIT_OK, EXIT_ERROR, EXIT_CHECK, EXIT_BUDGET = 0, 1, 2, 3

REASONS = {"degreeEqual": "degrees differ",
           "orbitCountEqual": "orbit counts differ",
           "sectionsEqual": "simple section sets differ",
           "primesEqual": "prime divisors of the orders differ",
           "solubleAgree": "exactly one group is soluble",
           "commonSimpleQuotient": "no common simple quotient"}


class SpecError(ValueError):
    """A group or problem description that does not parse; the message says where."""


class CheckFailed(Exception):
    def __init__(self, report: dict, reason: str):
        super().__init__(reason)
        self.report = report
        self.reason = reason


# -- input parsing ---------------------------------------------------------------------------------

def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _read_source(text: str) -> tuple[str, str]:
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            return fh.read(), text
    if not text.lstrip().startswith(("{", "[")):
        raise SpecError(f"{text}: no such file, and not inline JSON")
    return text, "<inline>"


def _spec_from_data(data, source: str) -> GroupSpec:
    if not isinstance(data, dict):
        raise SpecError(f"{source}: a group spec must be a JSON object")
    if "constructor" not in data and "generators" in data:
        data = {"constructor": "generators", **data}
    try:
        return GroupSpec.from_json(data)
    except CatalogError as exc:
        raise SpecError(f"{source}: {exc}") from None


def _check_generators(data, source: str, path: str = "") -> None:
    """Parse every cycle string up front so errors name the offending entry."""
    if isinstance(data, dict):
        if data.get("constructor", "generators") == "generators" and "generators" in data:
            gens = data["generators"]
            if not isinstance(gens, list):
                raise SpecError(f"{source}: {path}generators must be a list")
            for i, gtext in enumerate(gens):
                try:
                    Permutation.parse(gtext, int(data.get("degree", 0)) or None)
                except (PermutationError, TypeError, ValueError) as exc:
                    raise SpecError(f"{source}: {path}generators[{i}]: {exc}") from None
        for key, val in data.items():
            if isinstance(val, (dict, list)):
                _check_generators(val, source, f"{path}{key}.")
    elif isinstance(data, list):
        for i, val in enumerate(data):
            _check_generators(val, source, f"{path}[{i}].")


def parse_group_spec(text: str) -> tuple[PermGroup, str]:
    """A group from ``catalog:NAME``, inline JSON or a JSON file; returns the group and a label."""
    text = text.strip()
    if text.startswith("catalog:"):
        name = text[len("catalog:"):]
        try:
            return build_named(name), name
        except (CatalogError, GroupError) as exc:
            raise SpecError(f"catalog name {name!r}: {exc}") from None
    body, source = _read_source(text)
    data = _load_json(body, source)
    _check_generators(data, source)
    spec = _spec_from_data(data, source)
    try:
        g = make_group(spec)
    except (PermutationError, CatalogError) as exc:
        raise SpecError(f"{source}: {exc}") from None
    label = spec.args.get("name") or (os.path.basename(source) if source != "<inline>" else spec.constructor)
    return g, label


def parse_problem(text: str):
    body, source = _read_source(text)
    data = _load_json(body, source)
    try:
        return problem_from_json(data)
    except (PermutationError, KeyError, TypeError) as exc:
        raise SpecError(f"{source}: {exc}") from None


# -- reports -------------------------------------------------------------------------------------

def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return
    for line in _human(report):
        out.write(line + "\n")


def _human(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines += _human(val, indent + 1)
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                sub = _human(item, indent + 2)
                lines.append(f"{pad}  -" + sub[0][len(pad) + 3:] if sub else f"{pad}  -")
                lines += sub[1:]
        else:
            lines.append(f"{pad}{key}: {_scalar(val)}")
    return lines


def _scalar(val) -> str:
    if isinstance(val, bool):
        return "yes" if val else "no"
    if isinstance(val, list):
        return "[" + ", ".join(_scalar(v) for v in val) + "]"
    if val is None:
        return "-"
    return str(val)


def _budget(args) -> Budget:
    return replace(DEFAULT_BUDGET, samples=args.budget_samples, max_index=args.budget_max_index,
                   enumeration_limit=args.budget_enumeration, seed=args.seed)


def _hnn_budget(args) -> HnnBudget:
    return replace(HnnBudget(), samples=args.budget_hnn_samples)


# -- verbs ---------------------------------------------------------------------------------------

def cmd_analyze(args) -> dict:
    g, label = parse_group_spec(args.group)
    budget = _budget(args)
    orbs = g.orbits()
    report = {"group": label, "degree": g.degree, "order": g.order(),
              "orbits": [len(o) for o in orbs], "transitive": len(orbs) == 1}
    cm = composition_multiset(g, budget)
    report["composition"] = {"factors": cm.to_dict(), "verified": cm.verified}
    report["soluble"] = is_soluble(g, budget)
    sec = simple_sections(g, budget)
    report["simpleSections"] = {"values": sec.names(), "verified": sec.complete}
    if g.order() > 1:
        mins = minimal_normal_subgroups(g, budget)
        report["minimalNormal"] = {"orders": [w.order() for w in mins], "verified": mins.complete}
    if report["transitive"]:
        verdict = is_quasiprimitive(g, budget)
        report["quasiprimitive"] = {"value": verdict.quasiprimitive, "verified": verdict.complete}
        if verdict and g.order() > 1:
            tag, ev = classify_qp(g, budget)
            report["qpType"] = {"value": tag, "verified": not ev.provisional}
    return report


def cmd_classify(args) -> dict:
    g, label = parse_group_spec(args.group)
    budget = _budget(args)
    if not g.is_transitive():
        raise CheckFailed({"group": label, "quasiprimitive": False}, "group is not transitive")
    verdict = is_quasiprimitive(g, budget)
    if not verdict:
        bad = verdict.intransitive_normal
        raise CheckFailed({"group": label, "quasiprimitive": False,
                           "intransitiveNormalOrder": bad.order() if bad is not None else None},
                          "a minimal normal subgroup is intransitive")
    tag, ev = classify_qp(g, budget)
    report = {"group": label, "degree": g.degree, "order": g.order(), **ev.report(tag),
              "verified": not ev.provisional}
    if ev.stab_projections:
        report["stabilizerProjections"] = ev.stab_projections
    return report


def cmd_compat_check(args) -> dict:
    left, lname = parse_group_spec(args.left)
    right, rname = parse_group_spec(args.right)
    rep = necessary_compat_check(left, right, _budget(args))
    report = {"left": lname, "right": rname, **rep.to_json()}
    if rep.certified_incompatible:
        reasons = [REASONS[k] for k in rep.failures() if rep.verdicts()[k].complete]
        report["reason"] = reasons[0]
        report["reasons"] = reasons
        raise CheckFailed(report, reasons[0])
    if not rep.passed:
        raise BudgetExceeded("necessary conditions inconclusive within the budget: " + ", ".join(rep.failures()))
    return report


def _write_digraph(gamma: Digraph, path: str, name: str = "G") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if path.endswith(".json"):
            fh.write(json.dumps(gamma.to_json(), sort_keys=True) + "\n")
        else:
            fh.write(gamma.to_dot(name))


def cmd_witness(args) -> dict:
    problem = parse_problem(args.problem)
    w = build_witness(problem, seed=args.seed, budget=_hnn_budget(args), max_index=args.budget_max_index)
    report = {"problem": os.path.basename(args.problem), **w.to_json()}
    if not w.ok:
        raise CheckFailed(report, "witness invariants failed")
    if args.digraph:
        try:
            wd = witness_digraph(w, args.budget_max_index)
        except DegenerateWitness as exc:
            raise CheckFailed(report, str(exc)) from None
        report["digraph"] = {"vertices": wd.digraph.vertex_count, "arcs": len(wd.digraph),
                             "outLocalIsomorphic": wd.out_certificate.verdict,
                             "inLocalIsomorphic": wd.in_certificate.verdict, "path": args.digraph}
        _write_digraph(wd.digraph, args.digraph, "witness")
        if not wd.ok:
            raise CheckFailed(report, "local actions are not permutation isomorphic to the targets")
    return report


def cmd_digraph(args) -> dict:
    g, label = parse_group_spec(args.group)
    u, v = args.arc
    if not (0 <= u < g.degree and 0 <= v < g.degree):
        raise SpecError(f"arc ({u}, {v}) out of range for degree {g.degree}")
    gamma = orbital_digraph(g, u, v)
    out_r = local_action(gamma, u, "out")
    in_r = local_action(gamma, u, "in")
    report = {"group": label, "vertices": gamma.vertex_count, "arcs": len(gamma),
              "outDegree": out_r.degree, "inDegree": in_r.degree,
              "outLocal": {"order": out_r.order(), "orbits": out_r.orbit_count()},
              "inLocal": {"order": in_r.order(), "orbits": in_r.orbit_count()},
              "stronglyConnected": strongly_connected(gamma)[0], "weaklyConnected": weakly_connected(gamma)}
    if args.digraph:
        _write_digraph(gamma, args.digraph, "orbital")
        report["path"] = args.digraph
    return report


def cmd_catalog(args) -> dict:
    if args.name is None:
        rows = []
        for name in corpus_names():
            e = corpus_entry(name)
            rows.append({"name": name, "degree": e.degree, "order": e.order, "type": e.qp_type or "not QP"})
        return {"corpus": rows}
    g = build_named(args.name)
    report = {"name": args.name, "degree": g.degree, "order": g.order(),
              "generators": [str(s) for s in g.generators]}
    if args.name in corpus_names():
        e = corpus_entry(args.name)
        report["expectedType"] = e.qp_type or "not QP"
        if e.note:
            report["note"] = e.note
    return report


def cmd_selftest(args) -> dict:
    from .selftest import run_criteria
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_criteria(only, seed=args.seed, log=None if args.json else sys.stdout)
    report = {"criteria": [r.to_json() for r in results], "passed": all(r.ok for r in results)}
    if not report["passed"]:
        raise CheckFailed(report, "failed criteria: " + ", ".join(str(r.number) for r in results if not r.ok))
    return report


VERBS = {"analyze": cmd_analyze, "classify": cmd_classify, "compat-check": cmd_compat_check,
         "witness": cmd_witness, "digraph": cmd_digraph, "catalog": cmd_catalog, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized step")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--budget-samples", type=int, default=DEFAULT_BUDGET.samples,
                        help="random samples per structural search")
    common.add_argument("--budget-max-index", type=int, default=DEFAULT_BUDGET.max_index,
                        help="largest coset space built explicitly")
    common.add_argument("--budget-enumeration", type=int, default=DEFAULT_BUDGET.enumeration_limit,
                        help="largest group enumerated element by element")
    common.add_argument("--budget-hnn-samples", type=int, default=HnnBudget().samples,
                        help="random block pairings tried by the witness search")

    p = argparse.ArgumentParser(prog="qlocal", description="Local actions of vertex-transitive digraphs.")
    sub = p.add_subparsers(dest="verb", required=True)
    a = sub.add_parser("analyze", parents=[common], help="structure report for a group")
    a.add_argument("--group", required=True, help="catalog:NAME, inline JSON or a JSON file")
    c = sub.add_parser("classify", parents=[common], help="quasiprimitive type of a group")
    c.add_argument("--group", required=True)
    k = sub.add_parser("compat-check", parents=[common], help="necessary conditions for a compatible pair")
    k.add_argument("--left", required=True, help="in-local candidate")
    k.add_argument("--right", required=True, help="out-local candidate")
    w = sub.add_parser("witness", parents=[common], help="build a witness digraph for a problem file")
    w.add_argument("--problem", required=True)
    w.add_argument("--digraph", help="write the witness digraph (DOT, or JSON for a .json path)")
    d = sub.add_parser("digraph", parents=[common], help="orbital digraph of a group")
    d.add_argument("--group", required=True)
    d.add_argument("--arc", type=int, nargs=2, required=True, metavar=("U", "V"))
    d.add_argument("--digraph", help="output path (DOT, or JSON for a .json path)")
    g = sub.add_parser("catalog", parents=[common], help="list the corpus or show one named group")
    g.add_argument("name", nargs="?")
    s = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return p


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        report = VERBS[args.verb](args)
    except CheckFailed as exc:
        _emit({**exc.report, "status": "check failed", "reason": exc.reason}, args.json, out)
        return EXIT_CHECK
    except (BudgetExceeded, ChainBudgetError, TableTooLarge, IndexTooLarge, WitnessNotFound) as exc:
        err.write(f"qlocal: budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except (SpecError, CatalogError, CompatError, QPError, PermutationError, GroupError, OSError) as exc:
        err.write(f"qlocal: error: {exc}\n")
        return EXIT_ERROR
    _emit({**report, "status": "ok"}, args.json, out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
