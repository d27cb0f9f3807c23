"""Uniform view of a verification domain: an end (or region) with radii.

Reports and solvers operate on a Domain regardless of whether it was
materialized vertex by vertex or reduced to an exact sphere quotient; on a
quotient, masses are total sphere masses, so all annulus sums of radial
functions agree with the full graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import End, GraphFamily, PreconditionError, ConfigError
from .metrics import Metric, combinatorial_metric, jump_size


@dataclass
class Domain:
    graph: object               # WeightedGraph
    r: np.ndarray               # metric distance to the family root
    region: np.ndarray          # bool mask of the end/region Pi
    boundary: np.ndarray        # indices of the vertex boundary of Pi
    s: float
    combinatorial: bool
    radial: bool
    depth: int

    @property
    def boundary_radius(self) -> float:
        if self.boundary.size == 0:
            return 0.0
        return float(self.r[self.boundary].max())

    def annulus(self, lo: float, hi: float) -> np.ndarray:
        """Indices of region vertices with lo <= r <= hi (inclusive)."""
        eps = 1e-9
        hit = self.region & (self.r >= lo - eps) & (self.r <= hi + eps)
        return np.nonzero(hit)[0]

    def ball(self, hi: float) -> np.ndarray:
        eps = 1e-9
        return np.nonzero(self.region & (self.r <= hi + eps))[0]

    def interior_region(self) -> np.ndarray:
        """Region vertices whose neighbor layer is materialized."""
        return np.nonzero(self.region & self.graph.complete)[0]


def domain_for_end(end: End, metric: Metric | None, depth: int) -> Domain:
    """Build the verification domain for an end up to the given depth."""
    metric = metric or combinatorial_metric()
    family = end.family
    if end.radial and metric.combinatorial:
        sl = end.slice(depth)
        region = np.zeros(sl.graph.n, dtype=bool)
        region[sl.interior] = True
        region[sl.outer] = True  # outermost sphere belongs to Pi as well
        boundary = np.array([sl.top], dtype=int)
        return Domain(graph=sl.graph, r=sl.depths.astype(float), region=region,
                      boundary=boundary, s=1.0, combinatorial=True,
                      radial=True, depth=depth)
    mat = family.materialize(depth)
    g = mat.graph
    seeds = [v for v in end.component if v in g.index]
    if not seeds:
        raise PreconditionError("end has no materialized vertex at this depth")
    omega_idx = g.indices_of([v for v in end.omega])
    region_all = np.setdiff1d(np.arange(g.n), omega_idx)
    comps = g.components(region_all)
    seed0 = g.index[seeds[0]]
    comp = next((c for c in comps if seed0 in c), None)
    if comp is None:
        raise PreconditionError("could not re-identify the end at this depth")
    region = np.zeros(g.n, dtype=bool)
    region[comp] = True
    interior = comp[g.complete[comp]]
    bnd = g.vertex_boundary(interior) if interior.size else np.array([], int)
    bnd = np.setdiff1d(bnd, comp)
    r = metric.distances_from_root(mat)
    s = jump_size(g, metric)
    return Domain(graph=g, r=r, region=region, boundary=bnd, s=s,
                  combinatorial=metric.combinatorial, radial=False,
                  depth=depth)


def domain_for_region(family: GraphFamily, ends_list, metric: Metric | None,
                      depth: int) -> Domain:
    """Domain for a union of ends sharing a base set (general boundary data).

    Each end is re-identified inside the deeper materialization through its
    seed vertices, so the union grows with the snapshot rather than staying
    frozen at the resolution where the ends were first computed.
    """
    metric = metric or combinatorial_metric()
    ends_list = [ends_list] if isinstance(ends_list, End) else list(ends_list)
    if not ends_list or not all(isinstance(e, End) for e in ends_list):
        raise ConfigError("a region is a nonempty collection of ends")
    omegas = {e.omega for e in ends_list}
    if len(omegas) != 1:
        raise ConfigError("all ends of a region must share the same base set")
    mat = family.materialize(depth)
    g = mat.graph
    omega_idx = g.indices_of(next(iter(omegas)))
    comps = g.components(np.setdiff1d(np.arange(g.n), omega_idx))
    region = np.zeros(g.n, dtype=bool)
    for e in ends_list:
        seeds = [g.index[v] for v in e.component if v in g.index]
        if not seeds:
            raise PreconditionError("an end has no materialized vertex here")
        comp = next((c for c in comps if seeds[0] in c), None)
        if comp is None:
            raise PreconditionError("could not re-identify an end")
        region[comp] = True
    idx = np.nonzero(region)[0]
    interior = idx[g.complete[idx]]
    bnd = g.vertex_boundary(interior) if interior.size else np.array([], int)
    bnd = np.setdiff1d(bnd, idx)
    r = metric.distances_from_root(mat)
    s = jump_size(g, metric)
    return Domain(graph=g, r=r, region=region, boundary=bnd, s=s,
                  combinatorial=metric.combinatorial, radial=False,
                  depth=depth)


def resolve_values(domain: Domain, f) -> np.ndarray:
    """Values of f on the domain graph: array, callable of r, or constant."""
    if callable(f):
        return np.asarray([f(x) for x in domain.r], dtype=float)
    if np.isscalar(f):
        return np.full(domain.graph.n, float(f))
    from .operators import VertexFunction
    if isinstance(f, VertexFunction):
        if f.graph is not domain.graph:
            raise ConfigError("vertex function bound to a different snapshot")
        return np.where(f.defined, f.values, 0.0)
    arr = np.asarray(f, dtype=float)
    if arr.shape != (domain.graph.n,):
        raise ConfigError(f"expected {domain.graph.n} values, got {arr.shape}")
    return arr
