"""Decay rates, radial cut-off functions, gradient bounds, and the
annulus-decay verifier for nonnegative generalized subharmonic functions.

The decay rate a solves, for jump size s,

    (e^(a s) - 1)^2 / (2 s^2) = t - mu          (general intrinsic metric)
    (e^a - 1)^2 / (1 + e^(2a)) = (t-mu)/(1-mu)  (combinatorial distance)

and the verified estimate is

    sum_{Pi_R^{R+3s}} f^2 m  <=  C e^(-2aR) sum_{Pi_R0^{R0+3s}} f^2 e^(2ar) m,

with C = 7 e^(10 a s) / (s^2 (mu_1 - mu)), for every R >= R0 + 3s, provided
the weighted annulus sums sum f^2 e^(-2ar) m vanish along some radius
subsequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .domains import Domain, domain_for_end, resolve_values
from .graphs import (ConfigError, End, GraphFamily, PreconditionError)
from .metrics import Metric, combinatorial_metric
from .operators import NegativeFunctionError, SpectralSequence, \
    spectral_bottom_estimate

GENERAL = "general"
COMBINATORIAL = "combinatorial"


def q_of(a: float) -> float:
    """(e^a - 1)^2 / (e^(2a) + 1), the combinatorial-case rate profile."""
    return math.expm1(a) ** 2 / (math.exp(2 * a) + 1.0)


@dataclass(frozen=True)
class DecayRate:
    """Decay exponent for spectral bottom t, shift mu, and jump size s."""

    t: float
    mu: float
    s: float
    kind: str
    a: float

    def roundtrip_residual(self) -> float:
        if self.kind == COMBINATORIAL:
            return abs(q_of(self.a) - (self.t - self.mu) / (1.0 - self.mu))
        return abs(math.expm1(self.a * self.s) ** 2 / (2 * self.s ** 2)
                   - (self.t - self.mu))

    def to_json(self) -> dict:
        return {"a": self.a, "t": self.t, "mu": self.mu, "s": self.s,
                "kind": self.kind}


def decay_rate(t: float, mu: float = 0.0, s: float = 1.0,
               combinatorial: bool = True) -> DecayRate:
    """The decay exponent; strictly increasing in t, decreasing in mu."""
    if not s > 0:
        raise ConfigError(f"jump size must be positive, got {s}")
    if combinatorial:
        if not (mu < t < 1.0):
            raise ConfigError(
                f"combinatorial rate needs mu < t < 1, got mu={mu}, t={t}")
        c = (1.0 - t) / (1.0 - mu)
        a = math.log((1.0 - mu) / (1.0 - t)) + math.log1p(math.sqrt(1.0 - c * c))
        return DecayRate(t=t, mu=mu, s=1.0, kind=COMBINATORIAL, a=a)
    if not t > mu:
        raise ConfigError(f"general rate needs t > mu, got mu={mu}, t={t}")
    a = math.log1p(s * math.sqrt(2.0 * (t - mu))) / s
    return DecayRate(t=t, mu=mu, s=s, kind=GENERAL, a=a)


def decay_rate_inverse(x: float, mu: float = 0.0, s: float = 1.0,
                       combinatorial: bool = True) -> float:
    """Inverse of the rate map: the t whose decay exponent equals x."""
    if not x > 0:
        raise ConfigError(f"rate must be positive, got {x}")
    if combinatorial:
        return mu + (1.0 - mu) * q_of(x)
    return mu + math.expm1(x * s) ** 2 / (2.0 * s ** 2)


# ---------------------------------------------------------------------------
# Cut-off test functions


@dataclass(frozen=True)
class CutoffPair:
    """The two radial profiles behind the test function phi * e^h.

    phi ramps 0 -> 1 just outside radius r0, plateaus to radius L, and ramps
    back down; h grows linearly at slope a, plateaus on (R-s, R+4s], and
    decreases afterwards.  Radii must satisfy R >= r0 + 3s and L >= R + 3s.
    """

    r0: float
    R: float
    L: float
    s: float
    a: float

    def phi_profile(self, r):
        scalar = np.isscalar(r)
        r = np.atleast_1d(np.asarray(r, dtype=float))
        r0, L, s = self.r0, self.L, self.s
        out = np.zeros_like(r)
        rise = (r > r0 + s) & (r <= r0 + 2 * s)
        out[rise] = (r[rise] - r0 - s) / s
        out[(r > r0 + 2 * s) & (r <= L + s)] = 1.0
        fall = (r > L + s) & (r <= L + 2 * s)
        out[fall] = (L + 2 * s - r[fall]) / s
        return float(out[0]) if scalar else out

    def h_profile(self, r):
        scalar = np.isscalar(r)
        r = np.atleast_1d(np.asarray(r, dtype=float))
        R, s, a = self.R, self.s, self.a
        out = a * r
        mid = (r > R - s) & (r <= R + 4 * s)
        out[mid] = a * (R - s)
        far = r > R + 4 * s
        out[far] = -a * r[far] + 2 * a * R + 3 * a * s
        return float(out[0]) if scalar else out

    def lift(self, domain: Domain) -> tuple[np.ndarray, np.ndarray]:
        """(phi, h) on the domain; phi is zeroed outside the region."""
        phi = self.phi_profile(domain.r)
        phi = np.where(domain.region, phi, 0.0)
        h = self.h_profile(domain.r)
        return phi, h


def build_cutoffs(r0: float, R: float, L: float, s: float, a: float) -> CutoffPair:
    if not s > 0 or not a > 0:
        raise ConfigError("cutoffs need s > 0 and a > 0")
    if R < r0 + 3 * s or L < R + 3 * s:
        raise ConfigError(
            f"radii must satisfy R >= r0+3s and L >= R+3s; got r0={r0}, "
            f"R={R}, L={L}, s={s}")
    return CutoffPair(r0=float(r0), R=float(R), L=float(L), s=float(s),
                      a=float(a))


# ---------------------------------------------------------------------------
# Edgewise gradient bounds for e^h


@dataclass(frozen=True)
class GradientViolation:
    edge: tuple[str, str]
    bound: str
    lhs: float
    rhs: float


def exp_gradient_bounds(g, metric: Metric, h, a: float,
                        s: float | None = None,
                        rtol: float = 1e-12) -> list[GradientViolation]:
    """Check both edgewise bounds on |grad e^h| for a Lipschitz-a function h.

    On every edge,
        |grad e^h|^2 <= ((e^(as)-1)^2 / s^2) min(e^(2h(x)), e^(2h(y))) rho^2,
    and for the combinatorial distance additionally
        |grad e^h|^2 <= q(a) (e^(2h(x)) + e^(2h(y))).

    The Lipschitz hypothesis is verified first; a violation there is a
    precondition failure, not a bound violation.
    """
    from .operators import VertexFunction
    if isinstance(h, VertexFunction):
        hv = np.where(h.defined, h.values, 0.0)
    else:
        hv = np.asarray(h, dtype=float)
    coo = sp.triu(g.adj, k=1).tocoo()
    lengths = np.array([metric.edge_length(g, i, j)
                        for i, j in zip(coo.row, coo.col)])
    if s is None:
        s = 1.0 if metric.combinatorial else float(lengths.max())
    diffs = np.abs(hv[coo.col] - hv[coo.row])
    slack = a * lengths * (1 + 1e-12) + 1e-12
    bad = diffs > slack
    if bad.any():
        k = int(np.nonzero(bad)[0][0])
        raise PreconditionError(
            f"h is not Lipschitz-{a}: |grad h| = {diffs[k]} over length "
            f"{lengths[k]} on edge ({g.ids[coo.row[k]]}, {g.ids[coo.col[k]]})")
    violations: list[GradientViolation] = []
    e2h_i = np.exp(2 * hv[coo.row])
    e2h_j = np.exp(2 * hv[coo.col])
    grad2 = (np.exp(hv[coo.col]) - np.exp(hv[coo.row])) ** 2
    c_gen = math.expm1(a * s) ** 2 / s ** 2
    rhs_gen = c_gen * np.minimum(e2h_i, e2h_j) * lengths ** 2
    for k in np.nonzero(grad2 > rhs_gen * (1 + rtol) + 1e-300)[0]:
        violations.append(GradientViolation(
            edge=(g.ids[coo.row[k]], g.ids[coo.col[k]]), bound="intrinsic",
            lhs=float(grad2[k]), rhs=float(rhs_gen[k])))
    if metric.combinatorial:
        rhs_d = q_of(a) * (e2h_i + e2h_j)
        for k in np.nonzero(grad2 > rhs_d * (1 + rtol) + 1e-300)[0]:
            violations.append(GradientViolation(
                edge=(g.ids[coo.row[k]], g.ids[coo.col[k]]),
                bound="combinatorial", lhs=float(grad2[k]), rhs=float(rhs_d[k])))
    return violations


# ---------------------------------------------------------------------------
# Trend classification and slope fitting


def vanishing_trend(values) -> str:
    """Classify a sampled nonnegative sequence: vanishing / non-vanishing /
    inconclusive.  Thresholds are reported alongside wherever used."""
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return "inconclusive"
    if np.all(v == 0):
        return "vanishing"
    first, last = v[0], v[-1]
    tail = v[-3:] if len(v) >= 3 else v
    decreasing = np.all(np.diff(tail) <= 1e-12 * max(1.0, float(np.abs(tail).max())))
    if decreasing and last < 0.5 * max(first, 1e-300):
        return "vanishing"
    if last >= 0.9 * first or (len(v) >= 2 and v[-1] > v[-2] * (1 + 1e-9)):
        return "non-vanishing"
    return "inconclusive"


def slope_fit(radii, values, n_tail: int = 6) -> float | None:
    """Least-squares slope of log(values) against radius over the tail."""
    pts = [(float(R), float(v)) for R, v in zip(radii, values) if v > 0]
    pts = pts[-n_tail:]
    if len(pts) < 2:
        return None
    x = np.array([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# The decay verifier


@dataclass
class DecayRow:
    R: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    def to_json(self) -> dict:
        return {"R": self.R, "lhs": self.lhs, "rhs": self.rhs,
                "ratio": self.ratio}


@dataclass
class DecayReport:
    a: float
    mu1_interval: tuple[float, float]
    C: float
    rows: list[DecayRow]
    verdict: str
    slope_fit: float | None
    hypothesis: dict | None = None
    preconditions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"a": self.a,
                "mu1_interval": list(self.mu1_interval),
                "C": self.C,
                "rows": [row.to_json() for row in self.rows],
                "verdict": self.verdict,
                "slope_fit": self.slope_fit,
                "hypothesis": self.hypothesis,
                "preconditions": self.preconditions}


DEFAULT_MU1_RADII = (25, 50, 100, 200, 400)


def _mu1_interval(family, end, metric, mu1) -> tuple[tuple[float, float], dict]:
    if mu1 is None:
        base = end.base_depth if (end.radial and end.base_depth) else 0
        seq = spectral_bottom_estimate(
            family, end, [base + R for R in DEFAULT_MU1_RADII], metric)
        return seq.interval, seq.to_json()
    if isinstance(mu1, SpectralSequence):
        return mu1.interval, mu1.to_json()
    if np.isscalar(mu1):
        return (float(mu1), float(mu1)), {"supplied": float(mu1)}
    lo, hi = mu1
    return (float(lo), float(hi)), {"supplied": [float(lo), float(hi)]}


def decay_report_on_domain(dom: Domain, fvals: np.ndarray, mu: float,
                           radii, l_radii, mu1_interval: tuple[float, float],
                           r0: float | None = None, tol: float = 1e-9,
                           mu1_info=None) -> DecayReport:
    """Domain-level decay verification; see subharmonic_decay_report."""
    radii = [float(R) for R in radii]
    if not radii:
        raise ConfigError("need at least one verification radius")
    l_radii = [float(L) for L in (l_radii or [])]
    mu1_lo, mu1_hi = mu1_interval
    interval = (float(mu1_lo), float(mu1_hi))
    pre: dict = {"mu1": mu1_info if mu1_info is not None else list(interval)}
    s = dom.s

    def _fail(reason: str) -> DecayReport:
        pre["failure"] = reason
        return DecayReport(a=float("nan"), mu1_interval=interval, C=float("nan"),
                           rows=[], verdict="precondition-failed",
                           slope_fit=None, hypothesis=None, preconditions=pre)

    if not mu < mu1_lo:
        return _fail(f"shift mu={mu} is not below the spectral bottom "
                     f"evidence {mu1_lo}")
    try:
        rate = decay_rate(mu1_lo, mu, s, combinatorial=dom.combinatorial)
    except ConfigError as exc:
        return _fail(str(exc))
    a = rate.a
    C = 7.0 * math.exp(10 * a * s) / (s ** 2 * (mu1_lo - mu))

    closure = dom.region.copy()
    closure[dom.boundary] = True
    if (fvals[closure] < 0).any():
        return _fail("f takes negative values on the end or its boundary")
    interior = dom.interior_region()
    from .operators import laplacian_values
    defect = laplacian_values(dom.graph, fvals, interior) + mu * fvals[interior]
    fscale = max(1.0, float(np.abs(fvals).max())) * (1.0 + abs(mu))
    if defect.min() < -tol * fscale:
        k = int(np.argmin(defect))
        return _fail(f"f is not mu-subharmonic: defect {defect.min():.3e} at "
                     f"{dom.graph.ids[interior[k]]!r}")
    pre["subharmonic_defect_min"] = float(defect.min())

    bnd_r = dom.boundary_radius
    if r0 is None:
        r0 = bnd_r
    if r0 < bnd_r - 1e-9:
        return _fail(f"r0={r0} is below the boundary radius {bnd_r}")
    bad = [R for R in radii if R < r0 + 3 * s - 1e-9]
    if bad:
        return _fail(f"radii {bad} violate R >= r0 + 3s with r0={r0}, s={s}")

    base = dom.annulus(r0, r0 + 3 * s)
    m = dom.graph.mass
    s0 = float(np.dot(fvals[base] ** 2 * np.exp(2 * a * dom.r[base]), m[base]))
    rows = []
    for R in radii:
        ann = dom.annulus(R, R + 3 * s)
        lhs = float(np.dot(fvals[ann] ** 2, m[ann]))
        rhs = C * math.exp(-2 * a * R) * s0
        rows.append(DecayRow(R=R, lhs=lhs, rhs=rhs))
    ok = all(row.lhs <= row.rhs * (1 + 1e-9) for row in rows)
    verdict = "pass" if ok else "fail"

    hypothesis = None
    if l_radii:
        sums = []
        for L in l_radii:
            ann = dom.annulus(L, L + 3 * s)
            sums.append(float(np.dot(fvals[ann] ** 2
                                     * np.exp(-2 * a * dom.r[ann]), m[ann])))
        trend = vanishing_trend(sums)
        hypothesis = {"l_radii": l_radii, "sums": sums, "trend": trend,
                      "thresholds": {"vanishing": "decreasing tail and last < 0.5 first",
                                     "non_vanishing": "last >= 0.9 first or increasing"}}
        if trend == "non-vanishing":
            verdict = "hypothesis-not-met"

    fit = slope_fit([row.R for row in rows], [row.lhs for row in rows])
    return DecayReport(a=a, mu1_interval=interval, C=C, rows=rows,
                       verdict=verdict, slope_fit=fit, hypothesis=hypothesis,
                       preconditions=pre)


def subharmonic_decay_report(family: GraphFamily, end: End, f, mu: float,
                             radii, l_radii=None, *,
                             metric: Metric | None = None,
                             r0: float | None = None,
                             mu1=None, depth: int | None = None,
                             tol: float = 1e-9) -> DecayReport:
    """Verify the sharp annulus decay estimate on an end.

    ``f`` may be an array on the verification domain, a callable radial
    profile of r, or a constant.  Precondition failures (negative values,
    failed subharmonicity, bad radii) yield verdict "precondition-failed";
    a non-vanishing weighted-sum hypothesis along ``l_radii`` yields
    "hypothesis-not-met"; otherwise the verdict is "pass" or "fail" from
    comparing every annulus row against the theorem's bound.
    """
    metric = metric or combinatorial_metric()
    radii = [float(R) for R in radii]
    l_radii = [float(L) for L in (l_radii or [])]
    interval, mu1_info = _mu1_interval(family, end, metric, mu1)
    if depth is None:
        top = max(radii + l_radii)
        depth = int(math.ceil(top + 3 * 1.0)) + 1
    dom = domain_for_end(end, metric, depth)
    fvals = resolve_values(dom, f)
    return decay_report_on_domain(dom, fvals, mu, radii, l_radii, interval,
                                  r0=r0, tol=tol, mu1_info=mu1_info)


def decay_condition(family: GraphFamily, end: End, f, a: float, radii, *,
                    metric: Metric | None = None,
                    depth: int | None = None) -> dict:
    """Measure both decay hypotheses along a radius schedule.

    Returns the subsequence sums over annuli [R, R+3s] and the cumulative
    sums over Pi_R divided by R (the o(R) quantity), with trend labels; when
    the o(R) trend holds on the samples, some sampled subsequence must tend
    to zero, which is surfaced as a consistency flag.
    """
    metric = metric or combinatorial_metric()
    radii = [float(R) for R in radii]
    if any(b <= a2 for a2, b in zip(radii, radii[1:])):
        raise ConfigError("radii must be strictly increasing")
    if depth is None:
        depth = int(math.ceil(max(radii) + 4))
    dom = domain_for_end(end, metric, depth)
    fvals = resolve_values(dom, f)
    m = dom.graph.mass
    w = fvals ** 2 * np.exp(-2 * a * dom.r)
    sub_rows, orate_rows = [], []
    for R in radii:
        ann = dom.annulus(R, R + 3 * dom.s)
        sub_rows.append(float(np.dot(w[ann], m[ann])))
        ballv = dom.ball(R)
        orate_rows.append(float(np.dot(w[ballv], m[ballv])) / R)
    sub_trend = vanishing_trend(sub_rows)
    orate_trend = vanishing_trend(orate_rows)
    consistent = not (orate_trend == "vanishing"
                      and sub_trend == "non-vanishing")
    return {"radii": radii, "a": a,
            "subsequence_sums": sub_rows, "subsequence_trend": sub_trend,
            "o_of_R_quotients": orate_rows, "o_of_R_trend": orate_trend,
            "implication_consistent": consistent}
