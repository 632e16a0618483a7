"""spannerlab command line: build | query | eval | lab | gen.

Every command prints (or writes with -o/--report) a JSON report; the exit
status is 1 when a checked guarantee failed and 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import generators, harness
from .cluster_prdo import ClusterPRDO
from .graph import GraphFormatError, dump_graph, dump_pairs, load_graph, load_pairs
from .hopset import build_hopset, check_h1_consistency, check_h2_consistency, verify_hopset
from .lowerbound import (
    build_recursive,
    coverage_experiment,
    delta_pairs,
    dump_base_graph,
    girth_report,
    incompressible_union,
    load_base_graph,
    search_base_graph,
    validate_base_graph,
    verify_recursive,
)
from .pairwise import PairNotRegistered


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _report(payload: dict, path: str | None) -> int:
    payload = {"schema": harness.SCHEMA, **payload}
    _emit(harness.report_json(payload), path)
    return 0 if payload.get("ok", True) else 1


def _read_graph(path: str):
    return load_graph(Path(path).read_text())


def _read_ids(path: str) -> list[int]:
    out = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                out.append(int(line))
            except ValueError:
                raise GraphFormatError(lineno, f"expected one vertex id, got {raw!r}") from None
    return out


def _config(args, g) -> harness.RunConfig:
    kind = args.kind
    mode = getattr(args, "mode", None)
    if kind == "pairwise":
        kind = mode or "compose"
        if kind not in ("exact", "compose", "v2"):
            raise harness.ConfigError("mode", "pairwise mode is exact, compose or v2")
    pairs = list(load_pairs(Path(args.pairs).read_text(), g.n)) if args.pairs else None
    return harness.RunConfig(
        kind=kind,
        k=args.k,
        c=args.c,
        delta=args.delta,
        mode=mode if args.kind == "cluster" and mode else "weighted",
        preset=args.preset,
        T=args.T,
        seed=args.seed,
        pairs=pairs,
        subset=_read_ids(args.subset) if args.subset else None,
        ranking=_read_ids(args.ranking) if args.ranking else None,
    )


def _extra(oracle) -> dict:
    if isinstance(oracle, ClusterPRDO):
        return {"levels": oracle.levels, "tree_counts": oracle.tree_counts}
    if oracle.kind == "prioritized":
        return {"prefix_sizes": oracle.sizes, "stretch_table": oracle.stretch_table()}
    if oracle.kind in ("compose", "v2"):
        return {"sizes_by_part": oracle.sizes(), "hopset": oracle.parts.sizes()}
    return {}


def _evaluate(g, oracle, config, sample, rows=False) -> tuple[dict, list[dict]]:
    pairs = harness.eval_pairs_for(g, oracle, config, sample, config.seed)
    report = harness.evaluate(g, oracle, pairs, knobs=config.knobs())
    report.extra.update(_extra(oracle))
    out = report.as_dict(rows=rows)
    out["worst_stretch"] = out["max_stretch"]
    out["declared_stretch"] = oracle.declared_stretch
    return out, report.rows


def cmd_build(args) -> int:
    g = _read_graph(args.graph)
    if args.kind == "hopset":
        parts = build_hopset(g, args.c, args.k, args.delta, args.seed)
        pairs = harness.sample_pairs(g.n, args.sample or 1000, args.seed)
        report = verify_hopset(g, parts, pairs)
        report["knobs"] = {"kind": "hopset", "c": args.c, "k": args.k, "delta": parts.delta, "seed": args.seed}
        report["h1_inconsistent"] = len(check_h1_consistency(parts))
        report["h2_inconsistent"] = len(check_h2_consistency(parts))
        report["ok"] = report["ok"] and not report["h1_inconsistent"] and not report["h2_inconsistent"]
        return _report(report, args.report)
    config = _config(args, g)
    oracle = harness.build_oracle(g, config)
    if args.output:
        harness.save_oracle(oracle, args.output, config)
    report, _ = _evaluate(g, oracle, config, args.sample or 200)
    return _report(report, args.report)


def cmd_eval(args) -> int:
    if args.oracle:
        oracle, config = harness.load_oracle(args.oracle)
        g = oracle.g
    else:
        g = _read_graph(args.graph)
        config = _config(args, g)
        oracle = harness.build_oracle(g, config)
    report, rows = _evaluate(g, oracle, config, None if args.all else args.sample, rows=args.rows)
    if args.csv:
        Path(args.csv).write_text(harness.rows_csv(rows))
    return _report(report, args.report)


def cmd_query(args) -> int:
    oracle, _ = harness.load_oracle(args.oracle)
    pairs = [tuple(p) for p in args.pair or []]
    if args.pairs:
        pairs += list(load_pairs(Path(args.pairs).read_text(), oracle.g.n))
    answers, failed = [], False
    for u, v in pairs:
        try:
            path = oracle.query(u, v)
        except PairNotRegistered as err:
            answers.append(err.as_dict())
            failed = True
            continue
        if not path:
            answers.append({"pair": [u, v], "unreachable": True})
            continue
        answers.append({"pair": [u, v], "path": list(path.vertices), "weight": path.total_weight,
                        "hops": path.hop_count})
    _report({"kind": oracle.kind, "answers": answers}, args.report)
    return 2 if failed else 0


def _girth_graph(args):
    if args.graph:
        return _read_graph(args.graph)
    return harness.fixture_graph(args.cage)


def cmd_lab(args) -> int:
    if args.lab == "girth":
        inst = delta_pairs(_girth_graph(args), args.k, args.alpha)
        report = girth_report(inst)
        report["incompressible"] = incompressible_union(inst)
        report["ok"] = report["ok"] and report["incompressible"]["ok"]
        return _report(report, args.report)
    if args.lab == "coverage":
        inst = delta_pairs(_girth_graph(args), args.k, args.alpha)
        report = coverage_experiment(inst, args.seed, args.trials, args.prob)
        rows = report.pop("rows")
        if args.csv:
            Path(args.csv).write_text(harness.rows_csv(rows))
        return _report(report, args.report)
    if args.lab == "recursive":
        bases = [load_base_graph(Path(b).read_text()) for b in args.base] if args.base else None
        if bases is None:
            bases = [harness.fixture_base(4, 1), harness.fixture_base(2, 1)]
        inst = build_recursive(bases, args.kappa)
        report = verify_recursive(inst)
        if args.emit:
            Path(f"{args.emit}.txt").write_text(dump_graph(inst.graph))
            Path(f"{args.emit}.json").write_text(harness.report_json(inst.sidecar()))
        return _report(report, args.report)
    if args.lab == "validate-base":
        base = load_base_graph(Path(args.base).read_text())
        if args.swap:
            base = base.with_swapped_labels(*args.swap)
        return _report(validate_base_graph(base), args.report)
    found = search_base_graph(args.p, args.l, args.q, args.limit)
    if found is None:
        return _report({"p": args.p, "l": args.l, "labels": args.q, "found": False, "ok": False}, args.report)
    if args.output:
        Path(args.output).write_text(dump_base_graph(found))
    report = validate_base_graph(found)
    report["found"] = True
    return _report(report, args.report)


def cmd_gen(args) -> int:
    what = args.what
    if what == "random":
        g = generators.random_connected_graph(args.n, args.seed, args.extra, args.max_weight)
        _emit(dump_graph(g), args.output)
    elif what == "tree":
        _emit(dump_graph(generators.random_tree(args.n, args.seed, args.max_weight)), args.output)
    elif what in generators.CAGES:
        _emit(dump_graph(generators.CAGES[what]()), args.output)
    elif what == "regular":
        g = generators.random_regular_graph(args.n, args.degree, args.seed, args.min_girth)
        _emit(dump_graph(g), args.output)
    elif what == "pairs":
        n = _read_graph(args.graph).n if args.graph else args.n
        _emit(dump_pairs(harness.sample_pairs(n, args.count, args.seed)), args.output)
    elif what == "ranking":
        order = list(range(args.n))
        random.Random(args.seed).shuffle(order)
        _emit("".join(f"{v}\n" for v in order), args.output)
    elif what == "base":
        text = harness.fixture_text(f"base_p{args.p}_l{args.l}.txt")
        _emit(text, args.output)
    return 0


def _oracle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--k", "--hopset-k", type=int, dest="k")
    p.add_argument("--c", "--hopset-c", type=int, dest="c")
    p.add_argument("--delta", "--hopset-delta", type=float, dest="delta")
    p.add_argument("--mode", help="pairwise: exact|compose|v2; cluster: unweighted|weighted")
    p.add_argument("--pairs", help="pair-list file")
    p.add_argument("--subset", help="file with one vertex id per line")
    p.add_argument("--ranking", help="ranking file, one vertex id per line (rank = line number)")
    p.add_argument("--preset", default="pow2", choices=["pow2", "harmonic"])
    p.add_argument("--T", type=int)
    p.add_argument("--sample", type=int, help="number of sampled query pairs")
    p.add_argument("--report", help="write the JSON report here instead of stdout")


def parser() -> argparse.ArgumentParser:
    seed = harness.default_seed()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=seed, help=f"default from ${harness.SEED_ENV}")
    top = argparse.ArgumentParser(prog="spannerlab", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    kinds = ["tz", "hopset", "pairwise", "subset", "sourcewise", "prioritized", "cluster"]
    b = sub.add_parser("build", help="build an oracle, save it, report size and sampled stretch", parents=[common])
    b.add_argument("kind", choices=kinds)
    _oracle_flags(b)
    b.add_argument("-o", "--output", help="save the oracle here")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer pairs with a saved oracle", parents=[common])
    q.add_argument("--oracle", required=True)
    q.add_argument("--pair", nargs=2, type=int, action="append", metavar=("U", "V"))
    q.add_argument("--pairs", help="pair-list file")
    q.add_argument("--report")
    q.set_defaults(func=cmd_query)

    e = sub.add_parser("eval", help="stretch sweep against exact distances", parents=[common])
    e.add_argument("kind", nargs="?", choices=[k for k in kinds if k != "hopset"])
    _oracle_flags(e)
    e.add_argument("--oracle", help="evaluate a saved oracle instead of building one")
    e.add_argument("--all", action="store_true", help="query every vertex pair")
    e.add_argument("--rows", action="store_true", help="include per-query rows in the report")
    e.add_argument("--csv", help="write per-query rows as CSV")
    e.set_defaults(func=cmd_eval)

    lab = sub.add_parser("lab", help="lower-bound constructions and experiments")
    labs = lab.add_subparsers(dest="lab", required=True)
    for name in ("girth", "petersen", "coverage"):
        lp = labs.add_parser(name, parents=[common])
        lp.add_argument("--graph", help="regular high-girth graph (edge list)")
        lp.add_argument("--cage", default="petersen", choices=sorted(generators.CAGES))
        lp.add_argument("--k", type=int, default=4)
        lp.add_argument("--alpha", type=int, default=1)
        lp.add_argument("--report")
        if name == "coverage":
            lp.add_argument("--prob", type=float)
            lp.add_argument("--trials", type=int, default=100)
            lp.add_argument("--csv")
        lp.set_defaults(func=cmd_lab, lab="coverage" if name == "coverage" else "girth")
    rp = labs.add_parser("recursive", parents=[common])
    rp.add_argument("--base", action="append", help="base-graph file, outermost first (repeatable)")
    rp.add_argument("--kappa", type=int, default=1)
    rp.add_argument("--emit", help="write PREFIX.txt (edge list) and PREFIX.json (sidecar)")
    rp.add_argument("--report")
    rp.set_defaults(func=cmd_lab)
    vp = labs.add_parser("validate-base", parents=[common])
    vp.add_argument("--base", required=True)
    vp.add_argument("--swap", nargs=2, type=int, metavar=("LAYER", "VERTEX"),
                    help="swap the first two labels at one vertex before validating")
    vp.add_argument("--report")
    vp.set_defaults(func=cmd_lab)
    sp = labs.add_parser("base-search", parents=[common])
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--limit", type=int)
    sp.add_argument("-o", "--output")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_lab)

    g = sub.add_parser("gen", help="fixture generators", parents=[common])
    g.add_argument("what", choices=["random", "tree", "regular", "pairs", "ranking", "base", *sorted(generators.CAGES)])
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--extra", type=int)
    g.add_argument("--max-weight", type=int, default=10)
    g.add_argument("--degree", type=int, default=3)
    g.add_argument("--min-girth", type=int, default=3)
    g.add_argument("--graph")
    g.add_argument("--count", type=int, default=100)
    g.add_argument("--p", type=int, default=4)
    g.add_argument("--l", type=int, default=1)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)
    return top


def main(argv: list[str] | None = None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.func(args)
    except harness.ConfigError as err:
        sys.stderr.write(json.dumps(err.as_dict()) + "\n")
        return 2
    except (GraphFormatError, ValueError, OSError) as err:
        sys.stderr.write(json.dumps({"error": type(err).__name__, "message": str(err)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
