"""Intrinsic metrics: construction, verification, jump size, Lipschitz constants.

A pseudo-metric rho is intrinsic when sum_y w_xy rho^2(x,y) <= m_x at every
vertex.  The combinatorial distance d is intrinsic exactly on normalized
graphs (m_x equal to the weighted degree), with jump size s = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .graphs import (ConfigError, Materialized, PreconditionError,
                     WeightedGraph)

COMBINATORIAL = "combinatorial"
PATH_LENGTH = "path-length"


@dataclass(frozen=True)
class Metric:
    """Shortest-path (pseudo-)metric given by per-edge lengths.

    ``source`` records how lengths are produced: unit lengths for the
    combinatorial distance, the degree-balanced construction for
    "default-intrinsic", or an explicit table.  Distances are computed by
    Dijkstra over materialized edges, which is exact for the supported
    families because their geodesics never leave a ball containing both
    endpoints.
    """

    kind: str
    source: str = "combinatorial"
    lengths: dict[frozenset, float] | None = None

    @property
    def combinatorial(self) -> bool:
        return self.kind == COMBINATORIAL

    def edge_length(self, g: WeightedGraph, i: int, j: int) -> float:
        if self.combinatorial:
            return 1.0
        if self.source == "default-intrinsic":
            return min(math.sqrt(g.mass[i] / g.deg_w[i]),
                       math.sqrt(g.mass[j] / g.deg_w[j]))
        key = frozenset((g.ids[i], g.ids[j]))
        if self.lengths is None or key not in self.lengths:
            raise ConfigError(f"no length for edge {sorted(key)}")
        return self.lengths[key]

    def length_matrix(self, g: WeightedGraph) -> sp.csr_matrix:
        """Edge lengths with the sparsity pattern of the adjacency."""
        coo = g.adj.tocoo()
        if self.combinatorial:
            data = np.ones_like(coo.data)
        elif self.source == "default-intrinsic":
            if (g.deg_w <= 0).any():
                raise ConfigError("default intrinsic metric undefined at an "
                                  "isolated vertex")
            fac = np.sqrt(g.mass / g.deg_w)
            data = np.minimum(fac[coo.row], fac[coo.col])
        else:
            data = np.array([self.edge_length(g, i, j)
                             for i, j in zip(coo.row, coo.col)])
        return sp.csr_matrix((data, (coo.row, coo.col)), shape=g.adj.shape)

    def distances(self, g: WeightedGraph, source: int) -> np.ndarray:
        if self.combinatorial:
            return dijkstra(g.adj, directed=False, unweighted=True,
                            indices=source)
        return dijkstra(self.length_matrix(g), directed=False, indices=source)

    def distances_from_root(self, mat: Materialized) -> np.ndarray:
        if self.combinatorial:
            return mat.depths.astype(float)
        return self.distances(mat.graph, mat.root)

    def pair_distance(self, g: WeightedGraph, i: int, j: int) -> float:
        return float(self.distances(g, i)[j])


def combinatorial_metric() -> Metric:
    return Metric(kind=COMBINATORIAL, source="combinatorial")


def default_intrinsic(g: WeightedGraph | None = None) -> Metric:
    """Path metric with edge length min over endpoints of sqrt(m/deg_w).

    Intrinsic by construction: sum_y w_xy l(x,y)^2 <= m_x / deg_w(x) * deg_w(x).
    On a normalized graph every length is 1 and the metric coincides with d.
    """
    if g is not None and (g.deg_w <= 0).any():
        raise ConfigError("default intrinsic metric undefined at an isolated vertex")
    return Metric(kind=PATH_LENGTH, source="default-intrinsic")


def explicit_metric(lengths) -> Metric:
    """Path metric from an explicit edge-length table {(u,v): l} or triples.

    Zero lengths are accepted (pseudo-metrics are allowed); pairs at distance
    zero with differing values are excluded from Lipschitz suprema and
    flagged in reports.
    """
    table: dict[frozenset, float] = {}
    items = lengths.items() if isinstance(lengths, dict) else (
        ((u, v), l) for u, v, l in lengths)
    for (u, v), l in items:
        l = float(l)
        if l < 0:
            raise ConfigError(f"edge length must be nonnegative, got {l}")
        table[frozenset((str(u), str(v)))] = l
    return Metric(kind=PATH_LENGTH, source="explicit", lengths=table)


def metric_from_spec(spec) -> Metric:
    """Build a metric from its JSON spec (dict, JSON text, or file path)."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError:
            try:
                with open(spec) as fh:
                    spec = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read metric spec: {exc}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"metric spec is not valid JSON: {exc}") from None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("metric spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "combinatorial":
        return combinatorial_metric()
    if kind == "default-intrinsic":
        return default_intrinsic()
    if kind == "explicit":
        if "lengths" not in spec:
            raise ConfigError("explicit metric needs a 'lengths' table")
        return explicit_metric([(e["u"], e["v"], e["l"]) for e in spec["lengths"]])
    raise ConfigError(f"unknown metric kind {kind!r}")


# ---------------------------------------------------------------------------
# Verification and derived quantities


@dataclass(frozen=True)
class IntrinsicReport:
    slack: np.ndarray          # m_x - sum_y w_xy rho^2(x,y), complete vertices
    vertices: tuple[str, ...]
    ok: bool
    worst: str

    def to_json(self) -> dict:
        return {"ok": self.ok, "worst": self.worst,
                "min_slack": float(self.slack.min())}


def verify_intrinsic(g: WeightedGraph, metric: Metric,
                     rtol: float = 1e-12) -> IntrinsicReport:
    """Per-vertex slack of the intrinsic inequality over complete vertices."""
    idx = np.nonzero(g.complete)[0]
    if idx.size == 0:
        raise PreconditionError("no vertex has a materialized neighbor layer")
    lengths = metric.length_matrix(g)
    quad = g.adj.multiply(lengths.multiply(lengths)).sum(axis=1)
    quad = np.asarray(quad).ravel()[idx]
    slack = g.mass[idx] - quad
    scale = np.maximum(g.mass[idx], 1.0)
    ok = bool((slack >= -rtol * scale).all())
    worst = g.ids[idx[int(np.argmin(slack / scale))]]
    return IntrinsicReport(slack=slack, vertices=tuple(g.ids[i] for i in idx),
                           ok=ok, worst=worst)


def jump_size(g: WeightedGraph, metric: Metric,
              declared_bound: float | None = None) -> float:
    """Supremum of edge lengths.  Exactly 1 for the combinatorial distance.

    For generator families a ``declared_bound`` certifies the global sup;
    an unbounded declaration violates the finite-jump-size assumption.
    """
    if declared_bound is not None and not math.isfinite(declared_bound):
        raise PreconditionError("declared jump size is unbounded; the "
                                "finite-jump-size assumption fails")
    if metric.combinatorial:
        return 1.0
    if g.adj.nnz == 0:
        raise ConfigError("graph has no edges; jump size undefined")
    observed = float(metric.length_matrix(g).data.max())
    if declared_bound is not None:
        if observed > declared_bound * (1 + 1e-12):
            raise PreconditionError(
                f"materialized edge length {observed} exceeds the declared "
                f"bound {declared_bound}")
        return float(declared_bound)
    return observed


@dataclass(frozen=True)
class LipschitzReport:
    value: float
    pairs_checked: int
    zero_distance_violations: tuple[tuple[str, str], ...]

    def to_json(self) -> dict:
        return {"value": self.value, "pairs_checked": self.pairs_checked,
                "zero_distance_violations":
                    [list(p) for p in self.zero_distance_violations]}


def lipschitz_constant(g: WeightedGraph, metric: Metric, values: np.ndarray,
                       scope="edges") -> LipschitzReport:
    """sup |h(x)-h(y)| / rho(x,y) over the requested pair scope.

    ``scope`` is "edges" (sufficient for radial cut-off validation), "all"
    (every pair; small graphs only), or an iterable of index pairs.  Pairs at
    pseudo-metric distance zero with differing values are excluded from the
    supremum and reported as violations.
    """
    values = np.asarray(values, dtype=float)
    violations: list[tuple[str, str]] = []
    best = 0.0
    count = 0
    if scope == "edges":
        coo = sp.triu(g.adj, k=1).tocoo()
        lengths = [metric.edge_length(g, i, j) for i, j in zip(coo.row, coo.col)]
        for i, j, l in zip(coo.row, coo.col, lengths):
            count += 1
            diff = abs(values[i] - values[j])
            if l <= 0:
                if diff > 0:
                    violations.append((g.ids[i], g.ids[j]))
                continue
            best = max(best, diff / l)
    else:
        if scope == "all":
            if g.n > 2000:
                raise ConfigError("all-pairs Lipschitz scope limited to small balls")
            pairs = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)]
        else:
            pairs = [(int(i), int(j)) for i, j in scope]
        dist_cache: dict[int, np.ndarray] = {}
        for i, j in pairs:
            count += 1
            if i not in dist_cache:
                dist_cache[i] = metric.distances(g, i)
            rho = dist_cache[i][j]
            diff = abs(values[i] - values[j])
            if rho <= 0 or not math.isfinite(rho):
                if diff > 0 and rho <= 0:
                    violations.append((g.ids[i], g.ids[j]))
                continue
            best = max(best, diff / rho)
    return LipschitzReport(value=best, pairs_checked=count,
                           zero_distance_violations=tuple(violations))
