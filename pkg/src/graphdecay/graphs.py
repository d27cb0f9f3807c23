"""Weighted graphs, lazy families, balls/annuli, boundaries, and end decomposition.

A weighted graph is a quadruple (V, E, m, w): positive vertex masses m_x,
symmetric positive edge weights w_xy, locally finite, simple, undirected.
Infinite graphs are only ever seen through generator families that
materialize the combinatorial ball of a requested depth together with its
boundary layer; infinitude of ends is generator-declared metadata, never
inferred from a finite snapshot alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra


class GraphError(Exception):
    """Base error for this package."""


class ConfigError(GraphError):
    """Malformed specs, files, or parameters."""


class ResourceError(GraphError):
    """Materialization budget exceeded."""


class PreconditionError(GraphError):
    """A mathematical precondition fails; distinct from a negative verdict."""


class NumericError(GraphError):
    """Solver non-convergence or numerically inconsistent results."""


# ---------------------------------------------------------------------------
# Immutable weighted-graph snapshot


@dataclass(frozen=True)
class WeightedGraph:
    """Finite materialized portion of a weighted graph.

    ``complete[i]`` is True when vertex i's full neighbor list is present;
    boundary-layer vertices of a materialization are kept with
    ``complete=False`` and must not be used as centers of Laplacian-type
    operations.
    """

    ids: tuple[str, ...]
    mass: np.ndarray
    adj: sp.csr_matrix
    complete: np.ndarray
    index: dict[str, int] = field(repr=False)
    deg_w: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.ids)

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and edge weights of vertex i."""
        lo, hi = self.adj.indptr[i], self.adj.indptr[i + 1]
        return self.adj.indices[lo:hi], self.adj.data[lo:hi]

    def weight(self, i: int, j: int) -> float:
        nbrs, w = self.neighbors(i)
        hit = np.nonzero(nbrs == j)[0]
        return float(w[hit[0]]) if hit.size else 0.0

    def require_complete(self, idx) -> None:
        idx = np.atleast_1d(np.asarray(idx, dtype=int))
        if not self.complete[idx].all():
            bad = [self.ids[i] for i in idx[~self.complete[idx]][:5]]
            raise PreconditionError(
                f"vertices {bad} lack a materialized neighbor layer")

    def vertex_boundary(self, K) -> np.ndarray:
        """Outside-K vertices adjacent to K.  Requires K fully materialized."""
        K = np.asarray(sorted(set(int(i) for i in K)), dtype=int)
        if K.size == 0:
            return np.array([], dtype=int)
        self.require_complete(K)
        inside = np.zeros(self.n, dtype=bool)
        inside[K] = True
        touched = np.zeros(self.n, dtype=bool)
        for i in K:
            nbrs, _ = self.neighbors(i)
            touched[nbrs] = True
        return np.nonzero(touched & ~inside)[0]

    def components(self, region) -> list[np.ndarray]:
        """Connected components of the induced subgraph on ``region``."""
        region = np.asarray(sorted(set(int(i) for i in region)), dtype=int)
        if region.size == 0:
            return []
        sub = self.adj[region][:, region]
        ncomp, labels = connected_components(sub, directed=False)
        return [region[labels == c] for c in range(ncomp)]

    def is_connected(self) -> bool:
        ncomp, _ = connected_components(self.adj, directed=False)
        return ncomp <= 1

    def indices_of(self, ids) -> np.ndarray:
        try:
            return np.array([self.index[v] for v in ids], dtype=int)
        except KeyError as exc:
            raise ConfigError(f"unknown vertex id {exc.args[0]!r}") from None

    def to_json(self) -> dict:
        coo = sp.triu(self.adj, k=1).tocoo()
        return {
            "vertices": [{"id": v, "m": float(m)}
                         for v, m in zip(self.ids, self.mass)],
            "edges": [{"u": self.ids[i], "v": self.ids[j], "w": float(w)}
                      for i, j, w in zip(coo.row, coo.col, coo.data)],
        }


def make_graph(vertices, edges, incomplete=()) -> WeightedGraph:
    """Build an immutable snapshot from (id, m) pairs and (u, v, w) triples.

    ``incomplete`` lists ids whose neighbor lists are known to be partial
    (the boundary layer of a materialization).
    """
    ids = []
    masses = []
    index: dict[str, int] = {}
    for v, m in vertices:
        v = str(v)
        if v in index:
            raise ConfigError(f"duplicate vertex id {v!r}")
        m = float(m)
        if not m > 0:
            raise ConfigError(f"vertex {v!r} has non-positive mass {m}")
        index[v] = len(ids)
        ids.append(v)
        masses.append(m)
    n = len(ids)
    rows, cols, data = [], [], []
    seen: dict[tuple[int, int], float] = {}
    for u, v, w in edges:
        u, v, w = str(u), str(v), float(w)
        if u == v:
            raise ConfigError(f"self-loop at {u!r} not allowed")
        if u not in index or v not in index:
            raise ConfigError(f"edge ({u!r},{v!r}) references unknown vertex")
        if not w > 0:
            raise ConfigError(f"edge ({u!r},{v!r}) has non-positive weight {w}")
        i, j = index[u], index[v]
        key = (min(i, j), max(i, j))
        if key in seen:
            if abs(seen[key] - w) > 1e-15 * max(1.0, abs(w)):
                raise ConfigError(f"conflicting weights for edge ({u!r},{v!r})")
            continue
        seen[key] = w
        rows += [i, j]
        cols += [j, i]
        data += [w, w]
    adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    complete = np.ones(n, dtype=bool)
    for v in incomplete:
        complete[index[str(v)]] = False
    deg = np.asarray(adj.sum(axis=1)).ravel()
    return WeightedGraph(ids=tuple(ids), mass=np.asarray(masses, dtype=float),
                         adj=adj, complete=complete, index=index, deg_w=deg)


def graph_from_file(path) -> WeightedGraph:
    """Load the JSON graph-file schema {"vertices": [...], "edges": [...]}."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read graph file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"graph file {path} is not valid JSON: {exc}") from None
    return graph_from_dict(data)


def graph_from_dict(data: dict) -> WeightedGraph:
    try:
        vertices = [(v["id"], v["m"]) for v in data["vertices"]]
        edges = [(e["u"], e["v"], e["w"]) for e in data["edges"]]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"graph data missing field: {exc}") from None
    return make_graph(vertices, edges)


# ---------------------------------------------------------------------------
# Materializations and lazy families


@dataclass(frozen=True)
class Materialized:
    """Snapshot of the combinatorial ball of the given depth plus boundary layer."""

    graph: WeightedGraph
    root: int
    depth: int
    depths: np.ndarray  # combinatorial depth of each vertex


@dataclass(frozen=True)
class RadialSlice:
    """Exact quotient of a level-transitive (sub)family onto its depth spheres.

    The quotient of the ball of a regular tree (or of one subtree end) is a
    weighted path whose vertex masses are total sphere masses and whose edge
    weights are total bond weights between consecutive spheres.  Laplacians,
    Dirichlet forms, and resolvents agree with the full graph on radial
    functions, so spectral and potential-theoretic quantities of radially
    symmetric problems can be computed at depths far beyond what vertex-level
    materialization could reach.
    """

    graph: WeightedGraph
    depths: np.ndarray          # combinatorial depth per quotient vertex
    interior: np.ndarray        # quotient indices of spheres base_depth..depth
    top: int | None             # aggregate vertex on the Omega side (ends only)
    outer: int                  # sphere depth+1 (Dirichlet side)
    base_depth: int
    depth: int
    counts: np.ndarray          # number of original vertices per quotient vertex


class GraphFamily:
    """Lazy generator for a (possibly infinite) weighted graph."""

    kind = "abstract"
    root_id = "0"
    infinite = True
    volume_finite: bool | None = None
    total_volume: float | None = None
    branch_count: int | None = None

    def __init__(self, max_vertices: int = 1_000_000):
        self.max_vertices = int(max_vertices)

    # -- interface ---------------------------------------------------------
    def materialize(self, depth: int) -> Materialized:
        raise NotImplementedError

    def radial_slice(self, depth: int, base_depth: int = 0,
                     branch: bool = False) -> RadialSlice | None:
        """Quotient onto depth spheres, or None when no exact quotient exists."""
        return None

    def sphere_count(self, n: int) -> int:
        raise NotImplementedError

    def sphere_mass(self, n: int) -> float:
        raise NotImplementedError

    def ball_mass(self, depth: int) -> float:
        return float(sum(self.sphere_mass(k) for k in range(depth + 1)))

    def _check_budget(self, nvert: int, depth: int) -> None:
        if nvert > self.max_vertices:
            raise ResourceError(
                f"{self.kind} family cannot materialize depth {depth}: "
                f"{nvert} vertices exceed the budget of {self.max_vertices}")


class RegularTreeFamily(GraphFamily):
    """The N-regular tree with unit weights and masses m = N (normalized)."""

    kind = "tree"

    def __init__(self, N: int, max_vertices: int = 1_000_000):
        super().__init__(max_vertices)
        if int(N) != N or N < 3:
            raise ConfigError(f"regular tree requires integer N >= 3, got {N}")
        self.N = int(N)
        self.infinite = True
        self.volume_finite = False
        self.branch_count = self.N

    def sphere_count(self, n: int) -> int:
        if n == 0:
            return 1
        return self.N * (self.N - 1) ** (n - 1)

    def sphere_mass(self, n: int) -> float:
        return float(self.N * self.sphere_count(n))

    def materialize(self, depth: int) -> Materialized:
        if depth < 0:
            raise ConfigError("depth must be >= 0")
        total = sum(self.sphere_count(k) for k in range(depth + 2))
        self._check_budget(total, depth)
        N = self.N
        vertices = [("0", float(N))]
        edges = []
        depths = [0]
        layer = ["0"]
        for d in range(1, depth + 2):
            new_layer = []
            for parent in layer:
                kids = N if parent == "0" else N - 1
                for k in range(1, kids + 1):
                    child = f"{parent}.{k}"
                    vertices.append((child, float(N)))
                    edges.append((parent, child, 1.0))
                    depths.append(d)
                    new_layer.append(child)
            layer = new_layer
        g = make_graph(vertices, edges, incomplete=layer)
        return Materialized(graph=g, root=0, depth=depth,
                            depths=np.asarray(depths, dtype=int))

    def radial_slice(self, depth: int, base_depth: int = 0,
                     branch: bool = False) -> RadialSlice:
        """Sphere quotient of the ball (base_depth=0) or of one subtree end.

        With ``branch=True`` the slice covers the subtree hanging below a
        single vertex at depth ``base_depth`` (one end with respect to the
        ball of radius base_depth-1), aggregated level by level; the ``top``
        vertex carries the single edge up into the base set.
        """
        N = self.N
        if depth < base_depth:
            raise ConfigError("slice depth below its base depth")
        levels = list(range(base_depth, depth + 2))
        if branch:
            if base_depth < 1:
                raise ConfigError("a branch slice needs base_depth >= 1")
            counts = [(N - 1) ** (k - base_depth) for k in levels]
        else:
            if base_depth != 0:
                raise ConfigError("a ball slice starts at depth 0")
            counts = [self.sphere_count(k) for k in levels]
        ids = [f"s{k}" for k in levels]
        masses = [N * c for c in counts]
        vertices = list(zip(ids, masses))
        edges = []
        for i in range(len(levels) - 1):
            # every vertex of the deeper sphere has exactly one parent edge
            edges.append((ids[i], ids[i + 1], float(counts[i + 1])))
        depths = list(levels)
        top = None
        if branch:
            vertices.insert(0, ("top", 1.0))  # mass placeholder; boundary only
            edges.insert(0, ("top", ids[0], 1.0))
            depths.insert(0, base_depth - 1)
        g = make_graph(vertices, edges, incomplete=[ids[-1]] + (["top"] if branch else []))
        offset = 1 if branch else 0
        interior = np.arange(offset, offset + (depth - base_depth + 1))
        counts_arr = np.asarray(([1] if branch else []) + counts, dtype=float)
        return RadialSlice(graph=g, depths=np.asarray(depths, dtype=float),
                           interior=interior, top=(0 if branch else None),
                           outer=g.n - 1, base_depth=base_depth, depth=depth,
                           counts=counts_arr)


class WeightedRayFamily(GraphFamily):
    """Half-line 0-1-2-... with w_{n,n+1} = beta^n.

    ``mass="normalized"`` sets m_x to the weighted degree, the convention
    under which the combinatorial distance is intrinsic.
    """

    kind = "ray"

    def __init__(self, beta: float, mass: str = "normalized",
                 max_vertices: int = 1_000_000):
        super().__init__(max_vertices)
        beta = float(beta)
        if not beta > 0:
            raise ConfigError(f"ray requires beta > 0, got {beta}")
        if mass != "normalized":
            raise ConfigError(
                "ray families support only the normalized mass law "
                "(m_x equal to the weighted degree)")
        self.beta = beta
        self.mass_law = mass
        self.infinite = True
        self.volume_finite = beta < 1
        if beta < 1:
            # m_0 = 1, m_n = beta^(n-1) (1+beta) for n >= 1
            self.total_volume = 1.0 + (1.0 + beta) / (1.0 - beta)
        self.branch_count = 1

    def edge_weight(self, n: int) -> float:
        return self.beta ** n

    def sphere_count(self, n: int) -> int:
        return 1

    def sphere_mass(self, n: int) -> float:
        if n == 0:
            return 1.0
        return self.beta ** (n - 1) * (1.0 + self.beta)

    def materialize(self, depth: int) -> Materialized:
        if depth < 0:
            raise ConfigError("depth must be >= 0")
        self._check_budget(depth + 2, depth)
        vertices = [(str(n), self.sphere_mass(n)) for n in range(depth + 2)]
        edges = [(str(n), str(n + 1), self.edge_weight(n))
                 for n in range(depth + 1)]
        g = make_graph(vertices, edges, incomplete=[str(depth + 1)])
        return Materialized(graph=g, root=0, depth=depth,
                            depths=np.arange(depth + 2))

    def radial_slice(self, depth: int, base_depth: int = 0,
                     branch: bool = False) -> RadialSlice:
        """A ray is its own sphere quotient; the slice is the materialized path."""
        mat = self.materialize(depth)
        g = mat.graph
        n0 = base_depth
        if branch and base_depth < 1:
            raise ConfigError("a branch slice needs base_depth >= 1")
        if branch:
            keep = np.arange(base_depth - 1, depth + 2)
        else:
            if base_depth != 0:
                raise ConfigError("a ball slice starts at depth 0")
            keep = np.arange(0, depth + 2)
        idmap = {int(k): i for i, k in enumerate(keep)}
        sub_ids = [g.ids[k] for k in keep]
        vertices = [(v, float(g.mass[g.index[v]])) for v in sub_ids]
        edges = []
        for k in keep[:-1]:
            edges.append((g.ids[k], g.ids[k + 1], self.edge_weight(int(k))))
        incomplete = [g.ids[keep[-1]]] + ([g.ids[keep[0]]] if branch else [])
        sub = make_graph(vertices, edges, incomplete=incomplete)
        depths = keep.astype(float)
        interior = np.array([idmap[k] for k in range(n0, depth + 1)], dtype=int)
        return RadialSlice(graph=sub, depths=depths, interior=interior,
                           top=(0 if branch else None), outer=sub.n - 1,
                           base_depth=n0, depth=depth,
                           counts=np.ones(len(keep)))


class FileFamily(GraphFamily):
    """A finite graph loaded from the JSON file schema; complete by definition."""

    kind = "file"

    def __init__(self, graph: WeightedGraph, root_id: str | None = None,
                 normalized: bool = False):
        super().__init__(max_vertices=graph.n + 1)
        if graph.n == 0:
            raise ConfigError("file graph has no vertices")
        if normalized:
            deg = graph.deg_w
            if (deg <= 0).any():
                raise ConfigError("normalized mass undefined at isolated vertex")
            graph = WeightedGraph(ids=graph.ids, mass=deg.copy(), adj=graph.adj,
                                  complete=graph.complete, index=graph.index,
                                  deg_w=deg)
        self.graph = graph
        self.root_id = root_id if root_id is not None else graph.ids[0]
        if self.root_id not in graph.index:
            raise ConfigError(f"root {self.root_id!r} not in file graph")
        self.infinite = False
        self.volume_finite = True
        self.total_volume = float(graph.mass.sum())
        self.branch_count = None
        self._depths = self._bfs_depths()

    def _bfs_depths(self) -> np.ndarray:
        d = dijkstra(self.graph.adj, directed=False, unweighted=True,
                     indices=self.graph.index[self.root_id])
        return d

    def materialize(self, depth: int) -> Materialized:
        return Materialized(graph=self.graph, root=self.graph.index[self.root_id],
                            depth=depth, depths=self._depths)

    def sphere_count(self, n: int) -> int:
        return int(np.count_nonzero(self._depths == n))

    def sphere_mass(self, n: int) -> float:
        return float(self.graph.mass[self._depths == n].sum())


def build_family(spec) -> GraphFamily:
    """Construct a family from its JSON spec (dict, JSON text, or file path)."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError:
            try:
                with open(spec) as fh:
                    spec = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read family spec: {exc}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"family spec is not valid JSON: {exc}") from None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("family spec must be an object with a 'kind' field")
    kind = spec["kind"]
    mass = spec.get("mass", "explicit" if kind == "file" else "normalized")
    if kind == "tree":
        if "N" not in spec:
            raise ConfigError("tree family needs field 'N'")
        if mass != "normalized":
            raise ConfigError("tree families are normalized (m = N)")
        return RegularTreeFamily(spec["N"],
                                 max_vertices=spec.get("max_vertices", 1_000_000))
    if kind == "ray":
        if "beta" not in spec:
            raise ConfigError("ray family needs field 'beta'")
        return WeightedRayFamily(spec["beta"], mass=mass,
                                 max_vertices=spec.get("max_vertices", 1_000_000))
    if kind == "file":
        if "path" not in spec and "data" not in spec:
            raise ConfigError("file family needs field 'path' (or inline 'data')")
        g = (graph_from_dict(spec["data"]) if "data" in spec
             else graph_from_file(spec["path"]))
        if mass not in ("normalized", "explicit"):
            raise ConfigError(f"unknown mass law {mass!r}")
        # "explicit" keeps the file's masses; "normalized" replaces them by
        # the weighted degree.
        return FileFamily(g, root_id=spec.get("root"),
                          normalized=(mass == "normalized"))
    raise ConfigError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# Balls, annuli, ends


def _materialize_for_radius(family: GraphFamily, metric, R: float):
    """Materialize deep enough that every vertex at metric distance <= R is interior."""
    depth = max(1, int(np.ceil(R)) + 1)
    while True:
        mat = family.materialize(depth)
        r = metric.distances_from_root(mat)
        frontier = ~mat.graph.complete
        if not frontier.any() or r[frontier].min() > R + 1e-9:
            return mat, r
        depth = depth + max(1, depth // 2)


def ball(family: GraphFamily, metric, R: float) -> frozenset[str]:
    """Vertex ids at metric distance <= R from the family root."""
    if R < 0:
        raise ConfigError("ball radius must be >= 0")
    mat, r = _materialize_for_radius(family, metric, R)
    hit = np.nonzero(r <= R + 1e-9)[0]
    return frozenset(mat.graph.ids[i] for i in hit)


def annulus(family: GraphFamily, metric, R1: float, R2: float) -> frozenset[str]:
    """Vertex ids with R1 <= r(x) <= R2, both endpoints inclusive."""
    if not 0 < R1 < R2:
        raise ConfigError("annulus requires 0 < R1 < R2")
    mat, r = _materialize_for_radius(family, metric, R2)
    hit = np.nonzero((r >= R1 - 1e-9) & (r <= R2 + 1e-9))[0]
    return frozenset(mat.graph.ids[i] for i in hit)


@dataclass(frozen=True)
class End:
    """One connected component of V minus a finite base set.

    ``infinite`` comes from generator metadata (None would mean undecidable;
    finite file graphs always decide False).  ``base_depth`` and ``branch``
    are set when the component is a full subtree of a tree family (base set
    equal to a combinatorial ball), enabling exact radial-slice computation.
    """

    omega: frozenset[str]
    component: frozenset[str]
    boundary: frozenset[str]
    infinite: bool | None
    family: GraphFamily = field(repr=False, compare=False)
    base_depth: int | None = None
    branch_root: str | None = None

    @property
    def radial(self) -> bool:
        return self.base_depth is not None

    def slice(self, depth: int) -> RadialSlice:
        if not self.radial:
            raise PreconditionError("end has no radial slice")
        return self.family.radial_slice(depth, base_depth=self.base_depth,
                                        branch=True)


@dataclass(frozen=True)
class EndDecomposition:
    omega: frozenset[str]
    ends: tuple[End, ...]
    finite_components: tuple[frozenset[str], ...]

    def to_json(self) -> dict:
        return {
            "omega": sorted(self.omega),
            "ends": [{"size_materialized": len(e.component),
                      "boundary": sorted(e.boundary),
                      "infinite": e.infinite,
                      "radial": e.radial}
                     for e in self.ends],
            "finite_components": [sorted(c) for c in self.finite_components],
        }


def _is_combinatorial_ball(family: GraphFamily, omega_idx, mat: Materialized):
    """Depth R0 such that omega is exactly the combinatorial ball B_R0, else None."""
    depths = mat.depths[omega_idx]
    r0 = int(depths.max())
    expect = sum(family.sphere_count(k) for k in range(r0 + 1))
    if len(omega_idx) == expect and np.all(np.isin(np.arange(r0 + 1), depths)):
        # all spheres up to r0 fully contained
        count_by_depth = {k: int(np.count_nonzero(depths == k)) for k in range(r0 + 1)}
        if all(count_by_depth[k] == family.sphere_count(k) for k in range(r0 + 1)):
            return r0
    return None


def ends(family: GraphFamily, omega, depth: int | None = None) -> EndDecomposition:
    """Decompose the complement of a finite nonempty base set into components.

    Components are computed inside a materialized ball; a component touching
    the materialization frontier of an infinite generator continues forever
    (tree/ray generators extend every frontier vertex), so it is tagged as an
    infinite end.  For tree and ray families whose base set is a full
    combinatorial ball, each end is matched to its subtree and carries an
    exact radial-slice handle; a failed match raises instead of guessing.
    """
    omega = frozenset(str(v) for v in omega)
    if not omega:
        raise ConfigError("the base set must be finite and nonempty")
    if depth is None:
        depth = 3
    mat = family.materialize(depth)
    g = mat.graph
    omega_idx = g.indices_of(omega)
    need = int(mat.depths[omega_idx].max()) + 2
    if need > depth:
        mat = family.materialize(need)
        g = mat.graph
        omega_idx = g.indices_of(omega)
    region = np.setdiff1d(np.arange(g.n), omega_idx)
    comps = g.components(region)
    frontier = ~g.complete

    r0 = None
    if family.kind in ("tree", "ray"):
        r0 = _is_combinatorial_ball(family, omega_idx, mat)

    end_list: list[End] = []
    finite_comps: list[frozenset[str]] = []
    for comp in comps:
        comp_ids = frozenset(g.ids[i] for i in comp)
        interior = comp[g.complete[comp]]
        bnd = g.vertex_boundary(interior) if interior.size else np.array([], int)
        bnd = np.setdiff1d(bnd, comp)
        bnd_ids = frozenset(g.ids[i] for i in bnd)
        infinite = bool(family.infinite and frontier[comp].any())
        if not infinite:
            finite_comps.append(comp_ids)
            continue
        base_depth = None
        branch_root = None
        if r0 is not None:
            roots = comp[mat.depths[comp] == r0 + 1]
            if len(roots) != 1:
                raise NumericError(
                    "end does not match a single declared branch; refusing to guess")
            base_depth = r0 + 1
            branch_root = g.ids[roots[0]]
        end_list.append(End(omega=omega, component=comp_ids, boundary=bnd_ids,
                            infinite=True, family=family,
                            base_depth=base_depth, branch_root=branch_root))
    if r0 == 0 and family.branch_count is not None \
            and len(end_list) != family.branch_count:
        raise NumericError(
            f"found {len(end_list)} ends at the root but the generator "
            f"declares {family.branch_count} branches")
    return EndDecomposition(omega=omega, ends=tuple(end_list),
                            finite_components=tuple(finite_comps))
