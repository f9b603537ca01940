"""Command line front end.

Every subcommand prints one JSON object (or CSV with ``--format csv``) on
stdout. Counts are emitted as decimal strings. Domain errors exit with
status 1 and an ``{"error": ..., "message": ...}`` object; usage errors
exit with status 2.
"""

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

from . import constructions as C
from . import formulas as FM
from . import proof_harness as PH
from .core_family import build_digraph, count_fan_copies, dump_family, load_family
from .errors import DomainError
from .exact_search import SearchProblem, la_exact
from .posets import DEFAULT_BUDGET, count_copies, is_free, make_poset


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _int_range(text):
    """'3', '2-12' or '2,4,6'."""
    try:
        if "-" in text:
            a, b = text.split("-", 1)
            return list(range(int(a), int(b) + 1))
        return _int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 2-12, got {text!r}") from None


def _read_family(path):
    try:
        return load_family(Path(path).read_text())
    except OSError as exc:
        raise DomainError(f"cannot read family file {path}: {exc.strerror}") from None


def _fraction_fields(name, q: Fraction):
    return {name: f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator),
            f"{name}_decimal": f"{float(q):.12g}"}


# construct ---------------------------------------------------------------

def cmd_construct(args):
    kind = args.kind
    if kind == "knl":
        fam = C.knl_construction(C.KnlParams(args.n, args.k, args.l), cap=args.cap)
    elif kind == "kt":
        fam = C.katona_tarjan_family(args.n)
    elif kind == "levels":
        fam = C.level_family(args.n, args.sizes)
    elif kind == "danialt":
        fam = C.danialt_construction(args.n, args.k, args.l)
    else:
        fam = C.code_family_k22(args.n, args.i)
    if len(fam) > args.cap:
        raise DomainError(f"family has {len(fam)} sets, above cap {args.cap}")
    out = {"construction": kind, "n": str(fam.n), "size": str(len(fam))}
    text = dump_family(fam)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise DomainError(f"cannot write {args.out}: {exc.strerror}") from None
        out["out"] = args.out
    else:
        out["family"] = text
    return out


# count / free -------------------------------------------------------------

def cmd_count(args):
    fam = _read_family(args.family)
    p = make_poset(args.poset)
    return {"poset": args.poset, "size": str(len(fam)), "value": str(count_copies(p, fam, budget=args.budget))}


def cmd_free(args):
    fam = _read_family(args.family)
    forbidden = [make_poset(s) for s in args.forbid]
    return {"forbidden": " ".join(args.forbid), "free": is_free(fam, forbidden, budget=args.budget)}


# search ---------------------------------------------------------------------

def cmd_search(args):
    problem = SearchProblem(
        n=args.n,
        forbidden=[make_poset(s) for s in args.forbid],
        target=make_poset(args.target),
        budget=args.budget,
        workers=args.threads,
        symmetry=args.symmetry,
    )
    res = la_exact(problem)
    return {
        "n": str(args.n),
        "forbidden": " ".join(args.forbid),
        "target": args.target,
        "value": str(res.value),
        "exhausted": res.exhausted,
        "nodes_explored": str(res.nodes_explored),
        "witness": dump_family(res.witness),
    }


# formula ----------------------------------------------------------------------

def cmd_formula(args):
    kind = args.kind
    if kind == "chains":
        return {"n": str(args.n), "sizes": ",".join(map(str, args.sizes)),
                "value": str(FM.chain_count_levels(args.n, args.sizes))}
    if kind == "erdos":
        return {"n": str(args.n), "k": str(args.k), "value": str(FM.erdos_bound(args.n, args.k))}
    if kind == "lachain":
        value, levels = FM.la_chainfree(args.n, args.k, args.l)
        return {"n": str(args.n), "k": str(args.k), "l": str(args.l), "value": str(value),
                "levels": ",".join(map(str, levels))}
    rep = FM.conjecture_constant(args.k, args.l, args.s)
    out = {"k": str(args.k), "l": str(args.l), "s": str(args.s)}
    out.update(_fraction_fields("value", rep.value))
    out.update(_fraction_fields("p1", rep.p1))
    out.update(_fraction_fields("p2", rep.p2))
    return out


# verify -------------------------------------------------------------------------

def _need_seed(args, parser):
    if args.family is None and getattr(args, "graph", None) is None:
        if args.seed is None:
            parser.error("random instances require --seed")
        return True
    return False


def cmd_verify(args, parser):
    kind = args.kind
    if kind == "knl":
        return _verify_knl(args)
    if kind == "toplayer":
        if args.family is None:
            parser.error("verify toplayer needs --family")
        rep = PH.top_layer_bound_check(_read_family(args.family), args.k, args.l)
        return {"top_size": str(len(rep.top)), "indeg_zero": rep.indeg_zero,
                "independent": rep.independent, "counting_ok": rep.counting_ok,
                "wedge_count": str(rep.wedge_count), "ok": rep.ok}
    if kind == "augment":
        return _verify_augment(args, parser)
    if kind == "hall":
        return _verify_hall(args, parser)
    return _verify_repair(args, parser)


def _verify_knl(args):
    p = C.KnlParams(args.n, args.k, args.l)
    fam = C.knl_construction(p, cap=args.cap)
    dg = build_digraph(fam)
    upper = len(C.knl_upper_level(fam))
    exact = C.knl_plus_size_exact(p)
    fans = all(count_fan_copies(dg, s, "down") == comb(args.k - 1, s) * upper
               for s in range(1, args.k))
    top = PH.top_layer_bound_check(dg, args.k, args.l)
    free = max(dg.outdeg, default=0) <= args.k - 1 and max(dg.indeg, default=0) <= args.l - 1
    return {"size": str(len(fam)), "upper_size": str(upper), "upper_size_exact": str(exact),
            "free": free, "fan_identity": fans, "dp_matches": exact == upper, "top_layer": top.ok,
            "ok": free and fans and exact == upper and top.ok}


def _verify_augment(args, parser):
    if not _need_seed(args, parser):
        rep = PH.augment_and_verify(_read_family(args.family), args.k, args.l, not args.allow_p4)
        return _augment_json(rep)
    failures = []
    rng = random.Random(args.seed)
    f1_total = 0
    for i in range(args.instances):
        n = rng.randint(4, args.n_max)
        fam = PH.random_free_family(n, args.k, args.l, rng.random(), proposals=150, local=0.9)
        rep = PH.augment_and_verify(fam, args.k, args.l, True)
        f1_total += len(rep.f1)
        if not rep.ok:
            failures.append({"instance": str(i), "family": dump_family(fam), **_augment_json(rep)})
    return {"seed": str(args.seed), "instances": str(args.instances), "problematic_total": str(f1_total),
            "violations": str(len(failures)), "failures": failures, "ok": not failures}


def _augment_json(rep):
    out = {"f1_size": str(len(rep.f1)), "added_size": str(len(rep.added)),
           "lemma51_ok": rep.lemma51_ok, "lemma52_ok": rep.lemma52_ok,
           "g1_conditions_ok": rep.g1_conditions_ok, "matching_ok": rep.matching_ok, "ok": rep.ok}
    if rep.counterexample:
        cx = dict(rep.counterexample)
        if "family" in cx:
            cx["family"] = dump_family(cx["family"])
        out["counterexample"] = json.loads(json.dumps(cx, default=str))
    return out


def _read_graph(path):
    try:
        data = json.loads(Path(path).read_text())
        return PH.BipartiteGraph(tuple(data["A"]), tuple(data["B"]),
                                 frozenset((a, b) for a, b in data["edges"]))
    except OSError as exc:
        raise DomainError(f"cannot read graph file {path}: {exc.strerror}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed graph file {path}: {exc}") from None


def _verify_hall(args, parser):
    if not _need_seed(args, parser):
        res = PH.average_hall(_read_graph(args.graph))
        return {"conditions_hold": res.conditions_hold, "covers_b": res.covers_b,
                "matching": {str(k): str(v) for k, v in sorted(res.matching.items())},
                "violation": None if res.violation is None else
                {"vertex": str(res.violation[0]), "condition": str(res.violation[1])}}
    rng = random.Random(args.seed)
    tested = violations = draws = 0
    while tested < args.instances:
        draws += 1
        g = PH.random_bipartite_graph(rng)
        res = PH.average_hall(g)
        if res.conditions_hold:
            tested += 1
            violations += not res.covers_b
    return {"seed": str(args.seed), "instances": str(tested), "draws": str(draws),
            "violations": str(violations), "ok": violations == 0}


def _verify_repair(args, parser):
    if not _need_seed(args, parser):
        fam, reports = PH.s_component_repair(_read_family(args.family))
        return _repair_json(fam, reports)
    rng = random.Random(args.seed)
    violations = repaired = 0
    for _ in range(args.instances):
        fam = PH.planted_s_family(rng.randint(6, args.n_max), rng.random())
        out, reports = PH.s_component_repair(fam)
        dg = build_digraph(out)
        free = max(dg.outdeg, default=0) <= 4 and max(dg.indeg, default=0) <= 4
        repaired += sum(r.repaired for r in reports)
        violations += not (free and all(r.ratio_ok for r in reports))
    return {"seed": str(args.seed), "instances": str(args.instances), "components_repaired": str(repaired),
            "violations": str(violations), "ok": violations == 0}


def _repair_json(fam, reports):
    dg = build_digraph(fam)
    free = max(dg.outdeg, default=0) <= 4 and max(dg.indeg, default=0) <= 4
    return {"family": dump_family(fam), "free_wedge5_vee5": free,
            "components": [{"vertices": str(r.vertices), "edges": str(r.edges),
                            "repaired": r.repaired, "ratio_ok": r.ratio_ok} for r in reports],
            "ok": free and all(r.ratio_ok for r in reports)}


# table ------------------------------------------------------------------------------

def cmd_table(args):
    rows = []
    for n in args.n:
        for k in args.k:
            ls = args.l if args.l else [k - 1]
            for l in ls:
                if not (1 <= l < k and k - 1 <= n + 1):
                    continue
                value, levels = FM.la_chainfree(n, k, l)
                rows.append({"n": str(n), "k": str(k), "l": str(l), "value": str(value),
                             "levels": " ".join(map(str, levels))})
    return rows


# plumbing -----------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="subposet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="emit an explicit family")
    p.add_argument("kind", choices=("knl", "kt", "levels", "danialt", "code"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--cap", type=int, default=C.DEFAULT_CAP)
    p.add_argument("--out")

    p = sub.add_parser("count", parents=[common], help="count weak copies of a poset")
    p.add_argument("--family", required=True)
    p.add_argument("--poset", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("free", parents=[common], help="test freeness")
    p.add_argument("--family", required=True)
    p.add_argument("--forbid", action="append", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("search", parents=[common], help="exact La(n, forbidden, target)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--forbid", action="append", required=True)
    p.add_argument("--target", default="chain:1")
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--threads", type=int, default=1)
    sym = p.add_mutually_exclusive_group()
    sym.add_argument("--symmetry", dest="symmetry", action="store_true", default=None)
    sym.add_argument("--no-symmetry", dest="symmetry", action="store_false")

    p = sub.add_parser("formula", parents=[common], help="closed-form values")
    p.add_argument("kind", choices=("chains", "erdos", "lachain", "constant"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--sizes", type=_int_list)

    p = sub.add_parser("verify", parents=[common], help="run proof checks")
    p.add_argument("kind", choices=("knl", "augment", "hall", "repair", "toplayer"))
    p.add_argument("--family")
    p.add_argument("--graph")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--allow-p4", action="store_true", help="skip the 4-chain requirement")
    p.add_argument("--cap", type=int, default=C.DEFAULT_CAP)

    p = sub.add_parser("table", parents=[common], help="la_chainfree over a grid")
    p.add_argument("--n", type=_int_range, required=True)
    p.add_argument("--k", type=_int_range, required=True)
    p.add_argument("--l", type=_int_range)
    return parser


REQUIRED = {
    ("construct", "knl"): ("n", "k", "l"),
    ("construct", "levels"): ("n", "sizes"),
    ("construct", "danialt"): ("n", "k", "l"),
    ("construct", "code"): ("n", "i"),
    ("formula", "chains"): ("n", "sizes"),
    ("formula", "erdos"): ("n", "k"),
    ("formula", "lachain"): ("n", "k", "l"),
    ("formula", "constant"): ("k", "l", "s"),
    ("verify", "knl"): ("n", "k", "l"),
    ("verify", "augment"): ("k", "l"),
    ("verify", "toplayer"): ("k", "l"),
}


def render(obj, fmt):
    if fmt == "json":
        return json.dumps(obj, sort_keys=True) + "\n"
    rows = obj if isinstance(obj, list) else [obj]
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(rows[0].keys())
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else v


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    kind = getattr(args, "kind", None)
    for name in REQUIRED.get((args.command, kind), ()):
        if getattr(args, name) is None:
            parser.error(f"{args.command} {kind} requires --{name}")
    try:
        if args.command == "construct":
            result = cmd_construct(args)
        elif args.command == "count":
            result = cmd_count(args)
        elif args.command == "free":
            result = cmd_free(args)
        elif args.command == "search":
            result = cmd_search(args)
        elif args.command == "formula":
            result = cmd_formula(args)
        elif args.command == "verify":
            result = cmd_verify(args, parser)
        else:
            result = cmd_table(args)
    except DomainError as exc:
        stdout.write(json.dumps({"error": exc.kind, "message": str(exc)}, sort_keys=True) + "\n")
        return 1
    stdout.write(render(result, args.format))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
