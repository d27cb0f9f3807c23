"""Command-line front end: family/metric specs in, JSON or CSV reports out.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 inconclusive outcome (including failed mathematical preconditions).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import decay as decay_mod
from . import entropy as entropy_mod
from . import potential
from .graphs import (ConfigError, NumericError, PreconditionError,
                     build_family, ends)
from .metrics import combinatorial_metric, metric_from_spec
from .operators import spectral_bottom_estimate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INCONCLUSIVE = 4


def _parse_radii(text: str) -> list[float]:
    """Parse 'a:b:step' into an inclusive schedule."""
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError:
        raise ConfigError(f"bad radii spec {text!r}, expected a:b:step") from None
    if len(parts) == 1:
        return parts
    if len(parts) == 2:
        a, b = parts
        step = 1.0
    elif len(parts) == 3:
        a, b, step = parts
    else:
        raise ConfigError(f"bad radii spec {text!r}, expected a:b:step")
    if step <= 0 or b < a:
        raise ConfigError(f"bad radii spec {text!r}: need b >= a and step > 0")
    out = []
    x = a
    while x <= b + 1e-9:
        out.append(round(x, 12))
        x += step
    return out


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(payload, args, csv_rows=None) -> None:
    if args.format == "csv":
        if csv_rows is None:
            raise ConfigError("CSV output is only available for kernel dumps")
        target = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            writer = csv.writer(target)
            writer.writerow(csv_rows[0])
            writer.writerows(csv_rows[1:])
        finally:
            if args.out:
                target.close()
        return
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load(args):
    if not args.family:
        raise ConfigError("--family is required for this command")
    family = build_family(args.family)
    metric = metric_from_spec(args.metric) if args.metric \
        else combinatorial_metric()
    return family, metric


def _end_for(family, metric, args):
    omega_r = int(args.omega_radius)
    if omega_r == 0:
        omega = {family.root_id}
    else:
        from .graphs import ball
        omega = ball(family, metric, omega_r)
    dec = ends(family, omega)
    if not dec.ends:
        raise PreconditionError("the family has no infinite end at this base")
    if args.end >= len(dec.ends):
        raise ConfigError(f"end index {args.end} out of range "
                          f"({len(dec.ends)} ends)")
    return dec, dec.ends[args.end]


def cmd_spectrum(args) -> int:
    family, metric = _load(args)
    radii = _parse_radii(args.radii) if args.radii else [5, 10, 20, 30]
    graph_seq = spectral_bottom_estimate(family, "graph", radii, metric)
    payload = {"command": "spectrum", "graph": graph_seq.to_json()}
    if args.omega:
        from .operators import dirichlet_bottom
        mat = family.materialize(int(max(radii)))
        omega_idx = mat.graph.indices_of(args.omega.split(","))
        res = dirichlet_bottom(mat.graph, omega_idx)
        payload["omega"] = res.to_json()
    if family.infinite:
        dec, _ = _end_for(family, metric, args)
        payload["ends"] = []
        for e in dec.ends:
            base = e.base_depth or 1
            seq = spectral_bottom_estimate(
                family, e, [base + R for R in radii], metric)
            payload["ends"].append(seq.to_json())
    _emit(payload, args)
    return EXIT_OK


def cmd_decay(args) -> int:
    family, metric = _load(args)
    _, end = _end_for(family, metric, args)
    radii = _parse_radii(args.radii) if args.radii else [4, 8, 12, 16, 20]
    s = 1.0  # combinatorial default; report recomputes from the metric
    l_radii = [max(radii) + 3 * s + k * 3 * s for k in range(1, 5)]
    if args.f in (None, "constant-1"):
        f = 1.0
    elif args.f == "barrier":
        sched = [max(radii) + 10, max(radii) + 25, max(radii) + 45]
        bf = potential.barrier(family, end, sched, metric=metric)
        report = potential.harmonic_limit_decay(
            family, end, 1.0, sched, radii, metric=metric,
            r0=args.r0, l_radii=l_radii)
        payload = {"command": "decay", "f": "barrier",
                   "report": report.to_json(),
                   "barrier_converged": bf.converged}
        _emit(payload, args)
        return _verdict_code(report.verdict)
    else:
        try:
            with open(args.f) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read f file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"f file is not valid JSON: {exc}") from None
        f = _radial_table(data)
    report = decay_mod.subharmonic_decay_report(
        family, end, f, args.mu, radii, l_radii, metric=metric, r0=args.r0)
    payload = {"command": "decay", "f": args.f or "constant-1",
               "report": report.to_json()}
    _emit(payload, args)
    return _verdict_code(report.verdict)


def _radial_table(data):
    if isinstance(data, dict) and "by_radius" in data:
        table = {float(k): float(v) for k, v in data["by_radius"].items()}

        def f(r):
            key = round(float(r), 9)
            for kk, vv in table.items():
                if abs(kk - key) < 1e-9:
                    return vv
            raise ConfigError(f"f file has no value at radius {r}")
        return f
    raise ConfigError("f file must be {\"by_radius\": {r: value}}")


def _verdict_code(verdict: str) -> int:
    if verdict in ("pass", "fail", "holds", "violated",
                   "parabolic", "non-parabolic"):
        return EXIT_OK
    return EXIT_INCONCLUSIVE


def cmd_resolvent(args) -> int:
    family, metric = _load(args)
    schedule = [int(R) for R in (_parse_radii(args.radii)
                                 if args.radii else [10, 20, 30, 40])]
    limit = potential.resolvent(family, args.alpha, schedule,
                                tol=args.tol or 1e-10, metric=metric)
    ker = limit.kernel
    if args.format == "csv":
        rows = [("vertex", "r", "g", "bracket_width")]
        rows += ker.csv_rows(limit.bracket_hi)
        _emit(None, args, csv_rows=rows)
        return EXIT_OK
    payload = {"command": "resolvent", "limit": limit.to_json(),
               "values": [{"vertex": ker.graph.ids[i], "r": float(ker.r[i]),
                           "g": float(ker.values[i]),
                           "bracket_width": float(limit.bracket_hi[i]
                                                  - ker.values[i])}
                          for i in range(ker.graph.n)]}
    _emit(payload, args)
    return EXIT_OK


def cmd_ends(args) -> int:
    family, metric = _load(args)
    omega_r = int(args.omega_radius)
    if omega_r == 0:
        omega = {family.root_id}
    else:
        from .graphs import ball
        omega = ball(family, metric, omega_r)
    dec = ends(family, omega)
    _emit({"command": "ends", **dec.to_json()}, args)
    return EXIT_OK


def cmd_entropy(args) -> int:
    family, metric = _load(args)
    radii = _parse_radii(args.radii) if args.radii else list(range(5, 31, 5))
    report = entropy_mod.brooks_check(family, metric, radii=radii)
    ent = report.pop("entropy")
    payload = {"command": "entropy", **ent,
               "brooks": {"mu_e_evidence": report.get("mu_e_evidence"),
                          "bound": report.get("bound"),
                          "verdict": report.get("verdict"),
                          "residual": report.get("residual"),
                          "eps_rows": report.get("eps_rows")}}
    _emit(payload, args)
    return (EXIT_OK if payload["brooks"]["verdict"] in ("holds", "violated")
            else EXIT_INCONCLUSIVE)


def cmd_oracle(args) -> int:
    family, metric = _load(args)
    if family.kind != "tree":
        raise ConfigError("the oracle command reports regular-tree closed "
                          "forms; give a tree family")
    oracle = potential.tree_closed_forms(family.N, args.alpha)
    _emit({"command": "oracle", **oracle.to_json()}, args)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "decay": cmd_decay,
    "resolvent": cmd_resolvent,
    "ends": cmd_ends,
    "entropy": cmd_entropy,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="graphdecay",
        description="Spectral decay reports on weighted graphs")
    p.add_argument("--family", help="family spec: JSON file or inline JSON")
    p.add_argument("--metric", help="metric spec: JSON file or inline JSON "
                                    "(default: combinatorial)")
    p.add_argument("--cmd", required=True, choices=sorted(COMMANDS),
                   help="which report to produce")
    p.add_argument("--radii", help="schedule a:b:step (inclusive)")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--f", help="decay input: constant-1, barrier, or a JSON "
                               "file {\"by_radius\": {...}}")
    p.add_argument("--omega-radius", type=float, default=0,
                   help="base set = ball of this radius (0: just the root)")
    p.add_argument("--omega", help="comma-separated vertex ids; spectrum "
                                   "reports the exact Dirichlet bottom there")
    p.add_argument("--end", type=int, default=0, help="end index")
    p.add_argument("--r0", type=float, default=None,
                   help="base annulus radius (default: boundary radius)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
