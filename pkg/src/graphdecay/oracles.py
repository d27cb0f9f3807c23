"""Brute-force oracles: naive, independent computations used to certify the
reference values asserted by the test suite before the main paths run.

The oracles deliberately avoid the main solvers: eigenvalues come from
cyclic Jacobi rotations on a hand-assembled dense matrix, sums from a plain
compensated loop, closed-form parameters from the quadratic formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import ConfigError, GraphFamily, WeightedGraph
from .metrics import Metric, combinatorial_metric

MAX_BRUTE = 12


@dataclass(frozen=True)
class OracleResult:
    quantity: str
    value: object
    method: str
    tolerance: float

    def to_json(self) -> dict:
        return {"quantity": self.quantity, "value": self.value,
                "method": self.method, "tolerance": self.tolerance}


def _jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-14,
                        max_sweeps: int = 200) -> np.ndarray:
    """Cyclic Jacobi rotations; returns all eigenvalues sorted ascending."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    norm = max(1.0, float(np.abs(A).max()))
    for _ in range(max_sweeps):
        off = math.sqrt(float((A ** 2).sum() - (np.diag(A) ** 2).sum()))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
    return np.sort(np.diag(A))


def brute_eigen(g: WeightedGraph, omega) -> np.ndarray:
    """Full Dirichlet spectrum of a tiny domain via Jacobi rotations.

    The mass-symmetrized matrix is assembled entry by entry from the raw
    weight accessor; nothing is shared with the production eigensolver.
    """
    omega = sorted(set(int(v) for v in omega))
    if len(omega) > MAX_BRUTE:
        raise ConfigError(f"brute eigensolver capped at {MAX_BRUTE} vertices")
    g.require_complete(omega)
    n = len(omega)
    A = np.zeros((n, n))
    for ii, x in enumerate(omega):
        nbrs, w = g.neighbors(x)
        deg = math.fsum(float(v) for v in w)
        A[ii, ii] = deg / g.mass[x]
        for jj, y in enumerate(omega):
            if y == x:
                continue
            wxy = g.weight(x, y)
            if wxy:
                A[ii, jj] = -wxy / math.sqrt(g.mass[x] * g.mass[y])
    return _jacobi_eigenvalues(A)


def brute_recurrence(N: int, kind: str, alpha: float = 0.0) -> dict:
    """Roots of the radial two-term recurrences on the N-regular tree.

    kind "green": (N-1) x^2 - (alpha+1) N x + 1 = 0; the kernel decays like
    the small root, and b is its reciprocal.  kind "barrier": the harmonic
    recurrence (N-1) x^2 - N x + 1 = 0 with roots 1 and 1/(N-1).
    """
    if int(N) != N or N < 3:
        raise ConfigError(f"need integer N >= 3, got {N}")
    N = int(N)
    if kind == "green":
        aa, bb, cc = N - 1.0, -(alpha + 1.0) * N, 1.0
    elif kind == "barrier":
        aa, bb, cc = N - 1.0, -float(N), 1.0
    else:
        raise ConfigError(f"unknown recurrence kind {kind!r}")
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0:
        raise ConfigError("recurrence has no real roots")
    sq = math.sqrt(disc)
    r_small = (-bb - sq) / (2 * aa)
    r_large = (-bb + sq) / (2 * aa)
    if abs(r_small) > abs(r_large):
        r_small, r_large = r_large, r_small
    out = {"roots": (r_small, r_large), "decay_root": r_small}
    if kind == "green":
        out["b"] = 1.0 / r_small
    return out


def brute_sum(family: GraphFamily, expression, lo: float, hi: float, *,
              metric: Metric | None = None, depth: int | None = None,
              max_vertices: int = 10_000) -> float:
    """Compensated plain-loop sum of expression(r) * m over an annulus."""
    metric = metric or combinatorial_metric()
    if depth is None:
        depth = int(math.ceil(hi)) + 1
    mat = family.materialize(depth)
    r = metric.distances_from_root(mat)
    terms = []
    count = 0
    for i in range(mat.graph.n):
        if lo - 1e-9 <= r[i] <= hi + 1e-9:
            count += 1
            if count > max_vertices:
                raise ConfigError(f"brute sum capped at {max_vertices} vertices")
            terms.append(float(expression(r[i])) * float(mat.graph.mass[i]))
    return math.fsum(terms)


def brute_ball_sizes(family: GraphFamily, up_to: int) -> list[int]:
    """|B_0|, ..., |B_up_to| by direct breadth-first counting."""
    mat = family.materialize(up_to)
    return [int(np.count_nonzero(mat.depths <= R)) for R in range(up_to + 1)]
