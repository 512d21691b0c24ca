"""Command line front end: analyze a forest file, evaluate closures, run law suites."""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from . import classgroups as cg
from . import ideals as ie
from . import oracle
from . import ordgroups as og
from . import star as st
from .forest import (InvalidForest, ScopeError, SpectralForest, is_h_local, standard_decomposition,
                     validate)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
SUITES = ("axioms", "stable", "lambda-rho", "transfer", "witness.intersez", "closed-sum",
          "invertible-sum", "gamma", "m-canonical", "oracle.exhaustive")


class InputError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


# input files -------------------------------------------------------------------


def fixture_path(name: str) -> Path | None:
    ref = resources.files("starforge") / "fixtures" / f"{name}.yaml"
    return Path(str(ref)) if ref.is_file() else None


def resolve_input(text: str) -> Path:
    p = Path(text)
    if p.is_file():
        return p
    fx = fixture_path(text)
    if fx is not None:
        return fx
    raise InputError([f"{text}: no such file or shipped fixture"])


def load_forest(path: Path) -> tuple[SpectralForest, dict]:
    """Read a forest file, reporting problems as ``file:line:col: message``."""
    src = str(path)
    try:
        text = path.read_text(encoding="utf-8")
        root = yaml.compose(text)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError([f"{src}: {exc}"]) from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{src}:{mark.line + 1}:{mark.column + 1}" if mark else src
        raise InputError([f"{where}: {getattr(exc, 'problem', exc)}"]) from None

    diags = []

    def at(node, msg):
        m = node.start_mark
        diags.append(f"{src}:{m.line + 1}:{m.column + 1}: {msg}")

    if not isinstance(root, yaml.MappingNode):
        raise InputError([f"{src}:1:1: expected a mapping with a 'forest' key"])
    top = {k.value: v for k, v in root.value}
    trees = top.get("forest")
    if trees is None:
        at(root, "missing 'forest' list")
        raise InputError(diags)
    if not isinstance(trees, yaml.SequenceNode) or not trees.value:
        at(trees, "'forest' must be a nonempty list of trees")
        raise InputError(diags)

    parent, groups, maximal, where = {}, {}, set(), {}

    def walk(node, par):
        if not isinstance(node, yaml.MappingNode):
            at(node, "a prime must be a mapping with 'name' and 'group'")
            return
        fields = {k.value: v for k, v in node.value}
        for key in fields:
            if key not in ("name", "group", "children", "maximal"):
                at(node, f"unknown key {key!r}")
        name_node = fields.get("name")
        if name_node is None or not isinstance(name_node, yaml.ScalarNode) or not name_node.value:
            at(node, "prime without a name")
            return
        name = str(name_node.value)
        if name in parent:
            at(name_node, f"duplicate prime {name!r}")
            return
        where[name] = name_node
        parent[name] = par
        g = fields.get("group")
        if g is None:
            at(node, f"prime {name!r} has no group")
        else:
            try:
                groups[name] = og.RankOneGroup.parse(str(g.value))
            except (ValueError, TypeError) as exc:
                at(g, f"bad group literal: {exc}")
        mx = fields.get("maximal")
        if mx is not None and str(mx.value).lower() in ("true", "yes", "1"):
            maximal.add(name)
        kids = fields.get("children")
        if kids is not None:
            if not isinstance(kids, yaml.SequenceNode):
                at(kids, "'children' must be a list")
                return
            for child in kids.value:
                walk(child, name)

    for tree in trees.value:
        walk(tree, None)
    if diags:
        raise InputError(diags)
    for problem in validate(parent, groups, maximal):
        node = next((where[n] for n in where if repr(n) in problem), root)
        at(node, problem)
    if diags:
        raise InputError(diags)
    meta = {"name": top["name"].value if "name" in top else path.stem}
    return SpectralForest(parent, groups, maximal), meta


# reports -------------------------------------------------------------------------


@dataclass
class Entry:
    law: str
    anchor: str
    evidence: str
    verdict: str
    passed: bool
    mandated: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"law": self.law, "anchor": self.anchor, "evidence": self.evidence,
                "verdict": self.verdict, "passed": self.passed, "mandated": self.mandated,
                "details": self.details}


def _from_report(law: str, rep: st.StarPredicateReport, mandated: bool = True, expect_ok: bool = True,
                 **details) -> Entry:
    passed = rep.ok if expect_ok else rep.verdict == st.FAILS
    info = {"witness": rep.witness, "samples": rep.samples, "note": rep.note}
    info.update(details)
    return Entry(law, rep.anchor, "exact" if rep.evidence == "exact" else "sampled", rep.verdict,
                 passed, mandated, info)


def _assignments(forest: SpectralForest, limit: int = 16):
    roots = [b.id for b in standard_decomposition(forest)]
    for combo in itertools.islice(itertools.product([st.d, st.v], repeat=len(roots)), limit):
        yield dict(zip(roots, combo))


def _render_assignment(a: dict) -> str:
    return ", ".join(f"{k}:{st.render_star(v)}" for k, v in a.items())


def suite_axioms(f, seed, samples, box):
    ops = [st.d, st.v] + [s for s in st.stable_ops(f) if s != st.localized({m: st.d for m in f.leaves})]
    out = []
    for s in ops:
        rep = st.axioms_report(s, f, samples, seed)
        out.append(_from_report(f"axioms[{st.render_star(s)}]", rep))
    rng_ideals = st.sample_ideals(f, samples, seed)
    bad = None
    for i in rng_ideals:
        top = st.divisorial(i)
        for s in ops:
            if not (i <= st.apply(s, i) <= top):
                bad = (f"I = {i}", f"* = {st.render_star(s)}")
    out.append(Entry("d-min-v-max", "I ⊆ I^* ⊆ I^v", "sampled", st.HOLDS if bad is None else st.FAILS,
                     bad is None, True, {"witness": list(bad or ()), "samples": samples}))
    return out


def suite_stable(f, seed, samples, box):
    out = []
    ops = st.stable_ops(f)
    k = len(st.nondivisorial_maximals(f))
    out.append(Entry("stable.count", "stable operations = 2^|nondivisorial maximal ideals|", "exact",
                     st.EXACT_TRUE if len(ops) == 2 ** k else st.EXACT_FALSE, len(ops) == 2 ** k, True,
                     {"count": len(ops), "nondivisorial": st.nondivisorial_maximals(f)}))
    for s in ops:
        out.append(_from_report(f"stable[{st.render_star(s)}]", st.check_stable(s, f, samples, seed)))
    v_rep = st.check_stable(st.v, f, samples, seed)
    expect = is_h_local(f)
    out.append(_from_report("v-distributes iff h-local", v_rep, expect_ok=expect, h_local=expect))
    return out


def suite_lambda_rho(f, seed, samples, box):
    return [_from_report(f"lambda-rho[{_render_assignment(a)}]",
                         st.lambda_rho_roundtrip(f, a, samples, seed)) for a in _assignments(f)]


def suite_transfer(f, seed, samples, box):
    out = []
    for a in _assignments(f, 4):
        for rep in st.transfer_suite(f, a, samples=min(samples, 100), seed=seed):
            out.append(_from_report(f"{rep.predicate}[{_render_assignment(a)}]", rep))
    return out


def suite_witness(f, seed, samples, box):
    anchor = "v distributes over intersections iff R is h-local"
    if is_h_local(f):
        return [Entry("witness.intersez", anchor, "exact", st.EXACT_TRUE, True, True,
                      {"note": "h-local forest: no witness exists, construction refused"})]
    w = oracle.witness_intersez(f)
    return [Entry("witness.intersez", anchor, "exact", st.EXACT_TRUE if w.verified else st.EXACT_FALSE,
                  w.verified, True, w.to_dict())]


def suite_closed_sum(f, seed, samples, box):
    rep = st.closed_under_sum_check(st.v, f, samples, seed)
    return [_from_report("closed-sum[v]", rep, mandated=is_h_local(f))]


def suite_invertible_sum(f, seed, samples, box):
    return [_from_report("invertible-sum[v]", cg.invertible_sum_check(f, st.v, min(samples, 100), seed))]


def suite_gamma(f, seed, samples, box):
    return [_from_report("gamma[v]", cg.gamma_decomposition_check(f, st.v, min(samples, 100), seed))]


def suite_mcanonical(f, seed, samples, box):
    found, reports = st.m_canonical_search(f, samples, seed)
    h = is_h_local(f)
    ok = (found is not None) if h else (found is None)
    return [Entry("m-canonical", "an m-canonical ideal exists iff R is h-local", "sampled",
                  st.HOLDS if ok else st.FAILS, ok, True,
                  {"candidates": len(reports), "found": str(found) if found is not None else None,
                   "h_local": h})]


def suite_oracle(f, seed, samples, box):
    if any(f.group(n).is_dense for n in f.nodes):
        return [Entry("oracle.exhaustive", "grid oracle", "exhaustive", st.SKIPPED, True, False,
                      {"note": "forest has dense edges; exhaustive grids need Z edges"})]
    out = []
    for law in oracle.LAWS:
        r = oracle.exhaustive_law_check(f, box, law)
        out.append(Entry(law, r.anchor, "exhaustive", st.EXACT_TRUE if r.passed else st.EXACT_FALSE,
                         r.passed, True, {"cases": r.cases, "box": box,
                                          "counterexample": list(r.counterexample or ())}))
    return out


SUITE_FUNCS = {"axioms": suite_axioms, "stable": suite_stable, "lambda-rho": suite_lambda_rho,
               "transfer": suite_transfer, "witness.intersez": suite_witness,
               "closed-sum": suite_closed_sum, "invertible-sum": suite_invertible_sum,
               "gamma": suite_gamma, "m-canonical": suite_mcanonical,
               "oracle.exhaustive": suite_oracle}


# commands --------------------------------------------------------------------------


def cmd_analyze(forest: SpectralForest, meta: dict) -> dict:
    count = st.count_star_operations(forest)
    stable = st.stable_ops(forest)
    leaves = []
    for m in forest.leaves:
        mi = ie.maximal_ideal(forest, m)
        leaves.append({"leaf": m, "divisorial": st.divisorial(mi) == mi,
                       "clv": str(cg.clv_of_valuation(forest.overring([m])))})
    return {
        "fixture": meta["name"],
        "forest": forest.describe(),
        "branches": [{"id": b.id, "leaves": list(b.leaves)} for b in standard_decomposition(forest)],
        "h_local": is_h_local(forest),
        "star_count": {"value": count.value, "exact": count.exact, "note": count.note},
        "stable_count": len(stable),
        "stable_ops": [st.render_star(s) for s in stable],
        "leaves": leaves,
        "class_group_v": str(cg.local_class_group(forest, st.v)),
        "picard": str(cg.picard_group(forest)),
    }


def render_analyze(rep: dict) -> str:
    sc = rep["star_count"]
    star = f"|Star|={sc['value']}" if sc["exact"] else f"|Star|>={sc['value']}"
    lines = [f"h-local: {'yes' if rep['h_local'] else 'no'}; {star}; |Star_stab|={rep['stable_count']}; "
             f"G_v = {rep['class_group_v']}",
             f"forest: {rep['forest']}",
             "branches: " + "; ".join(f"{b['id']} = {{{', '.join(b['leaves'])}}}" for b in rep["branches"])]
    if not sc["exact"]:
        lines.append(f"note: {sc['note']}")
    for leaf in rep["leaves"]:
        lines.append(f"  {leaf['leaf']}: {'divisorial' if leaf['divisorial'] else 'not divisorial'}; "
                     f"Cl^v(R_M) = {leaf['clv']}")
    lines.append("stable operations: " + ", ".join(rep["stable_ops"]))
    return "\n".join(lines)


def cmd_eval(forest: SpectralForest, star_text: str, ideal_text: str) -> dict:
    try:
        s, domain = st.parse_star(star_text, forest)
        a = ie.parse_ideal(ideal_text, domain)
    except (ValueError, ScopeError) as exc:
        raise InputError([str(exc)]) from None
    warnings = []
    fractional, _ = ie.is_fractional(a)
    if not fractional:
        warnings.append("ideal is not fractional; star operations are only defined on fractional ideals")
    closed = st.apply(s, a)
    out = {"star": st.render_star(s), "ideal": str(a), "closure": str(closed),
           "closed": closed == a, "divisorial": st.divisorial(a) == a, "warnings": warnings}
    if fractional:
        out["invertible"] = cg.is_star_invertible(s, a)[0]
    return out


def render_eval(rep: dict) -> str:
    lines = [f"{rep['ideal']}  ->  {rep['closure']}",
             f"closed under {rep['star']}: {'yes' if rep['closed'] else 'no'}; "
             f"divisorial: {'yes' if rep['divisorial'] else 'no'}"
             + (f"; {rep['star']}-invertible: {'yes' if rep['invertible'] else 'no'}"
                if "invertible" in rep else "")]
    lines += [f"warning: {w}" for w in rep["warnings"]]
    return "\n".join(lines)


def cmd_check(forest: SpectralForest, meta: dict, suite: str, seed: int, samples: int, box: int) -> dict:
    if suite != "all" and suite not in SUITE_FUNCS:
        raise InputError([f"unknown suite {suite!r}; known: all, {', '.join(SUITES)}"])
    names = SUITES if suite == "all" else (suite,)
    entries = []
    for name in names:
        for e in SUITE_FUNCS[name](forest, seed, samples, box):
            entries.append({"suite": name, **e.to_dict()})
    passed = all(e["passed"] for e in entries if e["mandated"])
    return {"fixture": meta["name"], "suite": suite, "seed": seed, "samples": samples, "box": box,
            "passed": passed, "results": entries}


def render_check(rep: dict) -> str:
    lines = [f"{rep['fixture']} / {rep['suite']}  seed={rep['seed']} samples={rep['samples']}"]
    for e in rep["results"]:
        tag = "PASS" if e["passed"] else ("FAIL" if e["mandated"] else "INFO")
        if not e["mandated"] and e["passed"]:
            tag = "INFO"
        lines.append(f"[{tag}] {e['law']}: {e['verdict']} ({e['evidence']}; {e['anchor']})")
        wit = e["details"].get("witness")
        if wit and not e["passed"]:
            lines += [f"    {w}" for w in wit]
    lines.append("result: " + ("pass" if rep["passed"] else "FAIL"))
    return "\n".join(lines)


# entry point ---------------------------------------------------------------------------


def _seed(value: str | None) -> int:
    text = value if value is not None else os.environ.get("STARFORGE_SEED", "0")
    try:
        seed = int(text)
    except ValueError:
        raise InputError([f"seed must be an integer, got {text!r}"]) from None
    if not -2 ** 63 <= seed < 2 ** 64:
        raise InputError(["seed must fit in 64 bits"])
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", required=True,
                        help="forest file, or the name of a shipped fixture (fx-a ... fx-d)")
    common.add_argument("--seed", default=None, help="sampler seed (default: $STARFORGE_SEED or 0)")
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--box", type=int, default=3, help="grid bound B for the exhaustive oracle")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    p = argparse.ArgumentParser(prog="starforge", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="decomposition, counts and class groups")
    ev = sub.add_parser("eval", parents=[common], help="closure of an ideal under a star operation")
    ev.add_argument("star", help='star literal, e.g. "v" or "branches{T[P]:v}"')
    ev.add_argument("ideal", help='ideal literal, e.g. "M1: > (0) @1" or "R"')
    ck = sub.add_parser("check", parents=[common], help="run a law suite")
    ck.add_argument("suite", nargs="?", default="all", help=f"all, or one of: {', '.join(SUITES)}")
    return p


def _emit(rep: dict, command: str, fmt: str, render) -> str:
    if fmt == "structured":
        return json.dumps({"schema_version": SCHEMA_VERSION, "command": command, "report": rep},
                          indent=2, sort_keys=True, ensure_ascii=False)
    return render(rep)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        seed = _seed(args.seed)
        if args.samples < 1:
            raise InputError(["--samples must be positive"])
        forest, meta = load_forest(resolve_input(args.input))
        if args.command == "analyze":
            rep = cmd_analyze(forest, meta)
            print(_emit(rep, "analyze", args.format, render_analyze))
            return EXIT_OK
        if args.command == "eval":
            rep = cmd_eval(forest, args.star, args.ideal)
            print(_emit(rep, "eval", args.format, render_eval))
            return EXIT_OK
        rep = cmd_check(forest, meta, args.suite, seed, args.samples, args.box)
        print(_emit(rep, "check", args.format, render_check))
        return EXIT_OK if rep["passed"] else EXIT_FAIL
    except InputError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidForest, ScopeError, og.MembershipError, og.DimensionError, ie.NotFractional,
            st.NotExtendable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (st.ModelingError, ie.CompatibilityError, og.RepresentationOverflow, AssertionError) as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
