"""Oracle construction by name, stretch evaluation, size ledgers and reports."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import pickle
import random
import statistics
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .cluster_prdo import build_unweighted_prdo, build_weighted_prdo
from .graph import ExactOracle, PathRecord, WeightedGraph, load_graph
from .hopset import build_hopset
from .lowerbound import load_base_graph
from .pairwise import compose_hopset, exact_preserver, pairwise_v2
from .reductions import prioritized_spanner, sourcewise_spanner, subset_spanner
from .tz import build_tz

SCHEMA = "spannerlab.report/1"
ORACLE_HEADER = b"spannerlab-oracle/1\n"
SEED_ENV = "SPANNERLAB_SEED"
KINDS = ("tz", "exact", "compose", "v2", "subset", "sourcewise", "prioritized", "cluster")


class ConfigError(ValueError):
    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.field = name

    def as_dict(self) -> dict:
        return {"error": "invalid config", "field": self.field, "message": str(self)}


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(SEED_ENV, f"expected an integer, got {raw!r}") from None


def fixture_text(name: str) -> str:
    return resources.files("spannerlab").joinpath("data", name).read_text()


def fixture_graph(name: str) -> WeightedGraph:
    return load_graph(fixture_text(f"{name}.txt"))


def fixture_base(p: int, l: int):
    return load_base_graph(fixture_text(f"base_p{p}_l{l}.txt"))


@dataclass
class RunConfig:
    """Knobs for one oracle build; ``validate`` names the offending field."""

    kind: str
    k: int | None = None
    c: int | None = None
    delta: float | None = None
    mode: str = "weighted"
    preset: str = "pow2"
    T: int | None = None
    seed: int | None = 0
    pairs: list[tuple[int, int]] | None = None
    subset: list[int] | None = None
    ranking: list[int] | None = None

    def validate(self, g: WeightedGraph) -> None:
        if self.kind not in KINDS:
            raise ConfigError("kind", f"unknown oracle kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.kind in ("tz", "subset", "cluster") and (self.k is None or self.k < 1):
            raise ConfigError("k", "required, at least 1")
        if self.kind == "tz":
            cap = math.ceil(math.log2(g.n)) + 1 if g.n > 1 else 1
            if self.k > cap:
                raise ConfigError("k", f"must lie in [1, {cap}] for n={g.n}")
        if self.kind in ("compose", "v2"):
            if self.c is None or self.k is None or not 1 < self.c <= self.k:
                raise ConfigError("c", "compose/v2 need 1 < c <= k")
            if self.delta is not None and not 0 < self.delta <= 0.5:
                raise ConfigError("delta", "must lie in (0, 1/2]")
        if self.kind in ("exact", "compose", "v2") and not self.pairs:
            raise ConfigError("pairs", "pairwise oracles need a nonempty pair list")
        if self.kind in ("subset", "sourcewise") and not self.subset:
            raise ConfigError("subset", "required for subset/source-wise oracles")
        if self.kind == "prioritized" and self.ranking is not None and sorted(self.ranking) != list(range(g.n)):
            raise ConfigError("ranking", "must be a permutation of 0..n-1")
        if self.kind == "cluster" and self.mode not in ("weighted", "unweighted"):
            raise ConfigError("mode", "weighted or unweighted")
        for name, values in (("pairs", [x for pr in self.pairs or [] for x in pr]), ("subset", self.subset or [])):
            if any(not 0 <= x < g.n for x in values):
                raise ConfigError(name, f"vertex id out of range 0..{g.n - 1}")

    def knobs(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        for name in ("k", "c", "delta", "T"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        if self.kind == "cluster":
            out["mode"] = self.mode
        if self.kind == "prioritized":
            out["preset"] = self.preset
        return out


def build_oracle(g: WeightedGraph, config: RunConfig, exact: ExactOracle | None = None):
    config.validate(g)
    kind, seed = config.kind, config.seed
    if kind == "tz":
        return build_tz(g, config.k, seed)
    if kind == "exact":
        return exact_preserver(g, config.pairs, exact)
    if kind == "compose":
        parts = build_hopset(g, config.c, config.k, config.delta, seed)
        return compose_hopset(g, config.pairs, parts)
    if kind == "v2":
        return pairwise_v2(g, config.pairs, config.c, config.k, config.delta, seed)
    if kind in ("subset", "sourcewise"):
        sub = subset_spanner(g, config.subset, config.k or 1, seed, exact)
        return sub if kind == "subset" else sourcewise_spanner(g, sub)
    if kind == "prioritized":
        ranking = config.ranking if config.ranking is not None else list(range(g.n))
        return prioritized_spanner(g, ranking, config.preset, config.T, seed, exact)
    if config.mode == "unweighted":
        return build_unweighted_prdo(g, config.k, seed)
    return build_weighted_prdo(g, config.k, seed)


def declared_for(oracle, u: int, v: int) -> float:
    per_query = getattr(oracle, "declared_for", None)
    return per_query(u, v) if per_query else oracle.declared_stretch


def size_ledger(oracle) -> dict:
    """Storage words by component: edges, stored paths, link tables, lookup tables."""
    parts = oracle.ledger()
    return {"components": dict(sorted(parts.items())), "words": sum(parts.values())}


def sample_pairs(n: int, count: int, seed: int | None) -> list[tuple[int, int]]:
    """``count`` distinct unordered pairs u < v, in sampling order."""
    total = n * (n - 1) // 2
    if count >= total:
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng = random.Random(seed)
    seen: set[tuple[int, int]] = set()
    out = []
    while len(out) < count:
        u, v = rng.sample(range(n), 2)
        key = (min(u, v), max(u, v))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


@dataclass
class EvalReport:
    kind: str
    knobs: dict
    rows: list[dict]
    sizes: dict
    spanner_edges: int
    failures: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def max_stretch(self) -> float:
        return max((r["stretch"] for r in self.rows), default=1.0)

    @property
    def median_stretch(self) -> float:
        return statistics.median(r["stretch"] for r in self.rows) if self.rows else 1.0

    def as_dict(self, rows: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "kind": self.kind,
            "knobs": self.knobs,
            "queries": len(self.rows),
            "max_stretch": self.max_stretch,
            "median_stretch": self.median_stretch,
            "max_hops": max((r["hops"] for r in self.rows), default=0),
            "spanner_edges": self.spanner_edges,
            "size": self.sizes,
            "failures": self.failures,
            "ok": self.ok,
        }
        out.update(self.extra)
        if rows:
            out["rows"] = self.rows
        return out


def check_path(g: WeightedGraph, path: PathRecord, u: int, v: int) -> str | None:
    """Reason the reported path is invalid, or None."""
    verts = path.vertices
    if not verts or verts[0] != u or verts[-1] != v:
        return "wrong endpoints"
    for a, b in zip(verts, verts[1:]):
        if not g.has_edge(a, b):
            return f"({a}, {b}) is not an edge"
    weight = sum(g.weight(a, b) for a, b in zip(verts, verts[1:]))
    if abs(weight - path.total_weight) > 1e-9 * max(1.0, weight):
        return f"reported weight {path.total_weight} but the walk weighs {weight}"
    return None


def evaluate(
    g: WeightedGraph,
    oracle,
    pairs: Iterable[tuple[int, int]],
    exact: ExactOracle | None = None,
    knobs: dict | None = None,
) -> EvalReport:
    exact = exact or ExactOracle(g)
    rows, failures = [], []
    for u, v in pairs:
        d = exact.distance(u, v)
        if d is None:
            failures.append({"pair": [u, v], "reason": "endpoints are disconnected"})
            continue
        path = oracle.query(u, v)
        problem = check_path(g, path, u, v)
        weight = path.total_weight
        stretch = 1.0 if d == 0 else weight / d
        bound = declared_for(oracle, u, v)
        rows.append({"u": u, "v": v, "distance": d, "weight": weight, "stretch": stretch,
                     "hops": path.hop_count, "declared": bound})
        if problem:
            failures.append({"pair": [u, v], "reason": problem})
        elif weight < d - 1e-9 * max(1.0, d) or stretch > bound * (1 + 1e-12):
            failures.append({"pair": [u, v], "reason": "stretch outside [1, declared]",
                             "distance": d, "weight": weight, "declared": bound})
    return EvalReport(
        getattr(oracle, "kind", type(oracle).__name__),
        knobs or {},
        rows,
        size_ledger(oracle),
        len(oracle.spanner_edges()),
        failures,
    )


def eval_pairs_for(g: WeightedGraph, oracle, config: RunConfig, count: int | None, seed: int | None):
    """Query set appropriate for the oracle kind: registered pairs, A×A, A×V or sampled."""
    if config.kind in ("exact", "compose", "v2"):
        return sorted(oracle.pairs())
    if config.kind == "subset":
        pts = sorted(set(config.subset))
        return [(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]]
    if config.kind == "sourcewise":
        pts = sorted(set(config.subset))
        return [(v, a) for a in pts for v in range(g.n)]
    if count is None:
        return [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    return sample_pairs(g.n, count, seed)


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def rows_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def save_oracle(oracle, path, config: RunConfig | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(ORACLE_HEADER)
        pickle.dump({"config": config, "oracle": oracle}, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_oracle(path):
    with open(path, "rb") as fh:
        header = fh.readline()
        if header != ORACLE_HEADER:
            raise ValueError(f"{path} is not a saved oracle (bad header)")
        blob = pickle.load(fh)
    return blob["oracle"], blob["config"]
