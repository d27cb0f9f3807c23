"""Laplacian, carre du champ, quadratic-form identities, Dirichlet spectra.

The Laplacian is Delta f(x) = sum_y (w_xy/m_x)(f(y)-f(x)).  The Dirichlet
bottom of a finite vertex set Omega is the smallest eigenvalue of the
operator whose diagonal carries the full weighted degree (edges leaving
Omega included) and whose off-diagonal entries are the interior edges,
generalized against the mass matrix; this matches the Rayleigh quotient
over finitely supported functions exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graphs import (End, GraphFamily, NumericError, PreconditionError,
                     ConfigError, RadialSlice, WeightedGraph)
from .metrics import Metric

DENSE_LIMIT = 512
EIG_TOL = 1e-10


class NegativeFunctionError(PreconditionError):
    """A nonnegativity hypothesis fails; distinct from a defect verdict."""


# ---------------------------------------------------------------------------
# Vertex functions


@dataclass
class VertexFunction:
    """Real values on (a subset of) a snapshot's vertices.

    Values outside the defined mask are treated as zero by the compactly
    supported identities, and as missing by pointwise operators, which raise
    when a needed neighbor value is absent.
    """

    graph: WeightedGraph
    values: np.ndarray
    defined: np.ndarray

    @classmethod
    def from_dict(cls, g: WeightedGraph, data: dict) -> "VertexFunction":
        values = np.zeros(g.n)
        defined = np.zeros(g.n, dtype=bool)
        for k, v in data.items():
            i = g.index[str(k)]
            values[i] = float(v)
            defined[i] = True
        return cls(g, values, defined)

    @classmethod
    def from_radial(cls, g: WeightedGraph, r: np.ndarray, profile) -> "VertexFunction":
        vals = np.asarray([profile(x) for x in r], dtype=float)
        return cls(g, vals, np.ones(g.n, dtype=bool))

    @classmethod
    def constant(cls, g: WeightedGraph, c: float) -> "VertexFunction":
        return cls(g, np.full(g.n, float(c)), np.ones(g.n, dtype=bool))

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.defined & (self.values != 0))[0]

    def require_defined(self, idx, what="function") -> None:
        idx = np.atleast_1d(np.asarray(idx, dtype=int))
        if not self.defined[idx].all():
            missing = [self.graph.ids[i] for i in idx[~self.defined[idx]][:5]]
            raise PreconditionError(f"{what} undefined at {missing}")


def _coerce(g: WeightedGraph, f) -> VertexFunction:
    if isinstance(f, VertexFunction):
        if f.graph is not g:
            raise ConfigError("vertex function bound to a different snapshot")
        return f
    arr = np.asarray(f, dtype=float)
    if arr.shape != (g.n,):
        raise ConfigError(f"expected {g.n} values, got shape {arr.shape}")
    return VertexFunction(g, arr, np.ones(g.n, dtype=bool))


# ---------------------------------------------------------------------------
# Pointwise operators


def laplacian_apply(g: WeightedGraph, f, x: int) -> float:
    """Delta f(x) = sum_y (w_xy/m_x)(f(y)-f(x))."""
    vf = _coerce(g, f)
    g.require_complete([x])
    nbrs, w = g.neighbors(x)
    vf.require_defined(np.append(nbrs, x))
    return float(np.dot(w, vf.values[nbrs] - vf.values[x]) / g.mass[x])


def laplacian_values(g: WeightedGraph, f, on) -> np.ndarray:
    on = np.asarray(list(on), dtype=int)
    return np.array([laplacian_apply(g, f, int(x)) for x in on])


def gamma(g: WeightedGraph, f, h=None, on=None) -> VertexFunction:
    """Carre du champ: Gamma(f,h)(x) = (1/(2 m_x)) sum_y w_xy (grad f)(grad h).

    Defaults to Gamma(f) = Gamma(f,f).
    """
    vf = _coerce(g, f)
    vh = vf if h is None else _coerce(g, h)
    if on is None:
        on = np.nonzero(g.complete)[0]
    on = np.asarray(list(on), dtype=int)
    out = np.zeros(g.n)
    defined = np.zeros(g.n, dtype=bool)
    for x in on:
        g.require_complete([x])
        nbrs, w = g.neighbors(x)
        need = np.append(nbrs, x)
        vf.require_defined(need)
        vh.require_defined(need)
        df = vf.values[nbrs] - vf.values[x]
        dh = vh.values[nbrs] - vh.values[x]
        out[x] = float(np.dot(w, df * dh) / (2.0 * g.mass[x]))
        defined[x] = True
    return VertexFunction(g, out, defined)


def gamma_by_definition(g: WeightedGraph, f, h=None, on=None) -> VertexFunction:
    """Gamma via (Delta(fh) - h Delta f - f Delta h)/2; cross-check path."""
    vf = _coerce(g, f)
    vh = vf if h is None else _coerce(g, h)
    prod = VertexFunction(g, vf.values * vh.values, vf.defined & vh.defined)
    if on is None:
        on = np.nonzero(g.complete)[0]
    on = np.asarray(list(on), dtype=int)
    out = np.zeros(g.n)
    defined = np.zeros(g.n, dtype=bool)
    for x in on:
        lp = laplacian_apply(g, prod, x)
        lf = laplacian_apply(g, vf, x)
        lh = laplacian_apply(g, vh, x)
        out[x] = 0.5 * (lp - vh.values[x] * lf - vf.values[x] * lh)
        defined[x] = True
    return VertexFunction(g, out, defined)


# ---------------------------------------------------------------------------
# Summation identities


@dataclass(frozen=True)
class IdentityResidual:
    lhs: float
    rhs: float
    scale: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def within(self, rtol: float = 1e-12) -> bool:
        return self.residual <= rtol * max(self.scale, 1e-300)


def _compact_region(g: WeightedGraph, vh: VertexFunction) -> tuple[np.ndarray, np.ndarray]:
    supp = vh.support
    if supp.size == 0:
        return supp, supp
    g.require_complete(supp)
    closure = np.union1d(supp, g.vertex_boundary(supp))
    g.require_complete(closure)
    return supp, closure


def green_identity_residual(g: WeightedGraph, f, h) -> IdentityResidual:
    """Green's formula: (1/2) sum w (grad f)(grad h) = -sum f (Delta h) m.

    ``h`` must be compactly supported inside the materialized interior;
    undefined values of ``h`` count as zero.
    """
    vf = _coerce(g, f)
    vh = _coerce(g, h)
    hvals = np.where(vh.defined, vh.values, 0.0)
    supp, closure = _compact_region(g, vh)
    vf.require_defined(closure)
    coo = sp.triu(g.adj, k=1).tocoo()
    touch = np.isin(coo.row, supp) | np.isin(coo.col, supp)
    i, j, w = coo.row[touch], coo.col[touch], coo.data[touch]
    df = vf.values[j] - vf.values[i]
    dh = hvals[j] - hvals[i]
    lhs = float(np.dot(w, df * dh))
    lap = laplacian_values(g, VertexFunction(g, hvals, np.ones(g.n, bool)), closure)
    rhs = -float(np.dot(vf.values[closure] * lap, g.mass[closure]))
    scale = float(np.dot(w, np.abs(df * dh))
                  + np.dot(np.abs(vf.values[closure] * lap), g.mass[closure]))
    return IdentityResidual(lhs=lhs, rhs=rhs, scale=scale)


def form_identity_residual(g: WeightedGraph, f, h) -> IdentityResidual:
    """Product-form identity for compactly supported h:

    (1/2) sum w |grad(f h)|^2
      = sum f^2 Gamma(h) m - sum f (Delta f) h^2 m
        - (1/4) sum w |grad f|^2 |grad h|^2.
    """
    vf = _coerce(g, f)
    vh = _coerce(g, h)
    hvals = np.where(vh.defined, vh.values, 0.0)
    hfull = VertexFunction(g, hvals, np.ones(g.n, bool))
    supp, closure = _compact_region(g, vh)
    vf.require_defined(closure)
    coo = sp.triu(g.adj, k=1).tocoo()
    touch = np.isin(coo.row, supp) | np.isin(coo.col, supp)
    i, j, w = coo.row[touch], coo.col[touch], coo.data[touch]
    prod = vf.values * hvals
    t1 = float(np.dot(w, (prod[j] - prod[i]) ** 2))
    gam = gamma(g, hfull, on=closure)
    t2 = float(np.dot(vf.values[closure] ** 2 * gam.values[closure],
                      g.mass[closure]))
    lap_f = laplacian_values(g, vf, supp)
    t3 = float(np.dot(vf.values[supp] * lap_f * hvals[supp] ** 2, g.mass[supp]))
    df = vf.values[j] - vf.values[i]
    dh = hvals[j] - hvals[i]
    # sums over ordered pairs are twice the sums over undirected edges
    t4 = 0.5 * float(np.dot(w, df ** 2 * dh ** 2))
    lhs = t1
    rhs = t2 - t3 - t4
    scale = abs(t1) + abs(t2) + abs(t3) + abs(t4)
    return IdentityResidual(lhs=lhs, rhs=rhs, scale=scale)


def rayleigh_quotient(g: WeightedGraph, f, omega=None) -> float:
    """Q(f)/||f||^2 for finitely supported f (support inside omega if given)."""
    vf = _coerce(g, f)
    vals = np.where(vf.defined, vf.values, 0.0)
    supp = np.nonzero(vals != 0)[0]
    if supp.size == 0:
        raise PreconditionError("Rayleigh quotient of the zero function")
    if omega is not None:
        omega_idx = set(int(v) for v in omega)
        if not set(supp.tolist()) <= omega_idx:
            raise PreconditionError("support leaves the prescribed domain")
    g.require_complete(supp)
    coo = sp.triu(g.adj, k=1).tocoo()
    touch = np.isin(coo.row, supp) | np.isin(coo.col, supp)
    i, j, w = coo.row[touch], coo.col[touch], coo.data[touch]
    q = float(np.dot(w, (vals[j] - vals[i]) ** 2))
    nrm = float(np.dot(vals[supp] ** 2, g.mass[supp]))
    return q / nrm


# ---------------------------------------------------------------------------
# Dirichlet spectral bottom


@dataclass
class SpectralResult:
    value: float
    eigenfunction: VertexFunction
    method: str
    component_values: tuple[float, ...]

    def to_json(self) -> dict:
        return {"mu1": self.value, "method": self.method,
                "component_mu1": list(self.component_values)}


def _dirichlet_matrices(g: WeightedGraph, omega: np.ndarray):
    sub = g.adj[omega][:, omega]
    deg = g.deg_w[omega]
    H = sp.diags(deg) - sub
    return H.tocsr(), g.mass[omega]


def _component_bottom(g: WeightedGraph, comp: np.ndarray):
    H, m = _dirichlet_matrices(g, comp)
    scale = 1.0 / np.sqrt(m)
    A = sp.diags(scale) @ H @ sp.diags(scale)
    n = comp.size
    if n == 1:
        mu = float(A[0, 0])
        vec = np.array([1.0])
        return mu, vec, "dense"
    if n <= DENSE_LIMIT:
        vals, vecs = sla.eigh(A.toarray())
        mu, v = float(vals[0]), vecs[:, 0]
        method = "dense"
    else:
        sigma = -1e-2 * float(A.diagonal().max())
        v0 = np.ones(n) / np.sqrt(n)
        try:
            vals, vecs = spla.eigsh(A.tocsc(), k=1, sigma=sigma, which="LM",
                                    v0=v0, tol=EIG_TOL, maxiter=10 * n)
        except spla.ArpackNoConvergence as exc:
            raise NumericError(f"eigensolver did not converge: {exc}") from None
        mu, v = float(vals[0]), vecs[:, 0]
        method = "lanczos"
    f = v * scale  # undo the mass symmetrization
    top = int(np.argmax(np.abs(f)))
    if f[top] < 0:
        f = -f
    return mu, f, method


def dirichlet_bottom(g: WeightedGraph, omega) -> SpectralResult:
    """Bottom of the Dirichlet spectrum on a finite vertex set.

    Solved per connected component (the ground state of each component is
    signed-definite); the reported eigenfunction lives on the minimizing
    component, normalized so its largest-magnitude entry is positive.
    """
    omega = np.asarray(sorted(set(int(v) for v in omega)), dtype=int)
    if omega.size == 0:
        raise PreconditionError("empty Dirichlet domain")
    g.require_complete(omega)
    comps = g.components(omega)
    best = None
    values = []
    for comp in comps:
        mu, f, method = _component_bottom(g, comp)
        values.append(mu)
        if best is None or mu < best[0]:
            best = (mu, comp, f, method)
    mu, comp, f, method = best
    full = np.zeros(g.n)
    defined = np.zeros(g.n, dtype=bool)
    full[comp] = f
    defined[omega] = True
    vf = VertexFunction(g, full, defined)
    rq = rayleigh_quotient(g, vf) if np.any(full != 0) else mu
    if abs(rq - mu) > 1e-6 * max(1.0, abs(mu)):
        raise NumericError(f"eigenpair inconsistent with Rayleigh quotient: "
                           f"mu={mu} vs RQ={rq}")
    return SpectralResult(value=mu, eigenfunction=vf, method=method,
                          component_values=tuple(values))


# ---------------------------------------------------------------------------
# Exhaustion estimates over families


@dataclass
class SpectralSequence:
    target: str
    radii: tuple[float, ...]
    values: tuple[float, ...]
    extrapolated: float
    reliable: bool

    @property
    def interval(self) -> tuple[float, float]:
        return (self.conservative, self.values[-1])

    @property
    def conservative(self) -> float:
        return self.extrapolated if self.reliable else self._fallback()

    def _fallback(self) -> float:
        if len(self.values) < 2:
            return max(0.0, self.values[-1])
        return max(0.0, 2 * self.values[-1] - self.values[-2])

    def to_json(self) -> dict:
        return {"target": self.target, "radii": list(self.radii),
                "mu1": list(self.values),
                "interval": [self.interval[0], self.interval[1]],
                "extrapolation_reliable": self.reliable}


def _richardson(radii, values) -> tuple[float, bool]:
    if len(values) < 2:
        return max(0.0, values[-1]), False
    r1, r2 = radii[-2], radii[-1]
    m1, m2 = values[-2], values[-1]
    if r2 <= r1:
        return max(0.0, m2), False
    ext = (m2 * r2 ** 2 - m1 * r1 ** 2) / (r2 ** 2 - r1 ** 2)
    ext = max(0.0, ext)
    reliable = ext <= m2 + 1e-15
    return ext, reliable


def ball_bottom(family: GraphFamily, metric: Metric, R: float) -> SpectralResult:
    """mu_1 of the metric ball B_R around the family root.

    Regular trees with the combinatorial distance are solved on the exact
    sphere quotient (the Dirichlet ground state of a ball is radial), which
    reaches radii whose balls could never be materialized vertex by vertex.
    """
    if family.kind == "tree" and metric.combinatorial:
        sl = family.radial_slice(int(R))
        return dirichlet_bottom(sl.graph, sl.interior)
    from .graphs import _materialize_for_radius
    mat, r = _materialize_for_radius(family, metric, R)
    omega = np.nonzero(r <= R + 1e-9)[0]
    return dirichlet_bottom(mat.graph, omega)


def end_bottom(end: End, R: float, metric: Metric | None = None) -> SpectralResult:
    """mu_1 of the truncated end Pi_R = Pi intersect B_R."""
    family = end.family
    if end.radial and (metric is None or metric.combinatorial):
        sl = end.slice(int(R))
        return dirichlet_bottom(sl.graph, sl.interior)
    if metric is None:
        raise ConfigError("materialized end solve needs a metric")
    from .graphs import _materialize_for_radius
    mat, r = _materialize_for_radius(family, metric, R)
    comp = mat.graph.indices_of(
        [v for v in end.component if v in mat.graph.index])
    omega = comp[r[comp] <= R + 1e-9]
    return dirichlet_bottom(mat.graph, omega)


def spectral_bottom_estimate(family: GraphFamily, target, radii,
                             metric: Metric | None = None) -> SpectralSequence:
    """Monotone exhaustion mu_1(target within B_R) for increasing radii.

    ``target`` is "graph" or an End.  The sequence must be non-increasing
    (domain monotonicity); a violation signals solver failure.  The reported
    interval is [Richardson extrapolation, last value]; downstream decay
    rates use the conservative lower endpoint so that pass verdicts never
    over-claim.
    """
    radii = [float(R) for R in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("radii schedule must be strictly increasing")
    values = []
    for R in radii:
        if target == "graph":
            res = ball_bottom(family, metric or _default_metric(), R)
        elif isinstance(target, End):
            res = end_bottom(target, R, metric)
        else:
            raise ConfigError("target must be 'graph' or an End")
        values.append(res.value)
    for a, b in zip(values, values[1:]):
        if b > a + 1e-10 * max(1.0, abs(a)):
            raise NumericError(
                f"mu_1 sequence is not non-increasing: {a} -> {b}")
    ext, reliable = _richardson(radii, values)
    name = "graph" if target == "graph" else "end"
    return SpectralSequence(target=name, radii=tuple(radii),
                            values=tuple(values), extrapolated=ext,
                            reliable=reliable)


def _default_metric() -> Metric:
    from .metrics import combinatorial_metric
    return combinatorial_metric()


def complement_bottom(family: GraphFamily, metric: Metric, r0: float,
                      R: float) -> float:
    """mu_1 of (V minus B_r0) truncated at radius R.

    Equals the minimum over the components of the complement; for trees all
    components are isometric branch subtrees, so one slice suffices.
    """
    if family.kind in ("tree", "ray") and metric.combinatorial:
        sl = family.radial_slice(int(R), base_depth=int(r0) + 1, branch=True)
        return dirichlet_bottom(sl.graph, sl.interior).value
    mat = family.materialize(int(np.ceil(R)) + 1)
    r = metric.distances_from_root(mat)
    omega = np.nonzero((r > r0 + 1e-9) & (r <= R + 1e-9)
                       & mat.graph.complete)[0]
    if omega.size == 0:
        raise PreconditionError("complement is empty at this radius")
    return dirichlet_bottom(mat.graph, omega).value


def essential_bottom_evidence(family: GraphFamily, metric: Metric,
                              r0_grid, R: float) -> dict:
    """Lower-bound evidence for the essential spectrum bottom.

    mu_1 of complements of balls increases to the essential bottom; the
    maximum over the sampled grid is reported as the evidence value.
    """
    rows = []
    for r0 in r0_grid:
        seq_radii = [R / 2, 3 * R / 4, R]
        vals = [complement_bottom(family, metric, r0, rr) for rr in seq_radii]
        ext, reliable = _richardson(seq_radii, vals)
        rows.append({"r0": float(r0), "mu1_values": vals,
                     "conservative": ext if reliable else max(0.0, vals[-1]),
                     "last": vals[-1]})
    evidence = max(row["conservative"] for row in rows)
    return {"mu_e_evidence": evidence, "grid": rows}


# ---------------------------------------------------------------------------
# Subharmonicity


def subharmonic_defect(g: WeightedGraph, f, mu: float, omega) -> tuple[float, str]:
    """min over omega of (Delta f + mu f); >= 0 means mu-subharmonic there.

    Raises NegativeFunctionError when f < 0 somewhere on omega or its
    boundary, which violates the nonnegativity hypothesis and is a different
    failure from a negative defect.
    """
    vf = _coerce(g, f)
    omega = np.asarray(sorted(set(int(v) for v in omega)), dtype=int)
    if omega.size == 0:
        raise PreconditionError("empty domain")
    g.require_complete(omega)
    closure = np.union1d(omega, g.vertex_boundary(omega))
    vf.require_defined(closure)
    if (vf.values[closure] < 0).any():
        bad = closure[vf.values[closure] < 0][0]
        raise NegativeFunctionError(
            f"f is negative at {g.ids[bad]!r}; nonnegativity hypothesis fails")
    defects = laplacian_values(g, vf, omega) + mu * vf.values[omega]
    k = int(np.argmin(defects))
    return float(defects[k]), g.ids[omega[k]]
