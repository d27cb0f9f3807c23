import csv
import json
import math
import subprocess
import sys

import pytest

import graphdecay as gd
from graphdecay.cli import main, _parse_radii

TREE = '{"kind":"tree","N":3}'
RAY = '{"kind":"ray","beta":0.5}'


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "graphdecay.cli"] + args,
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


class TestParsing:
    def test_radii_spec(self):
        assert _parse_radii("4:12:4") == [4, 8, 12]
        assert _parse_radii("5") == [5]
        assert _parse_radii("2:4") == [2, 3, 4]
        with pytest.raises(gd.ConfigError):
            _parse_radii("5:1:1")
        with pytest.raises(gd.ConfigError):
            _parse_radii("a:b")


class TestCommands:
    def test_oracle_values(self, tmp_path):
        out = tmp_path / "o.json"
        rc = main(["--family", TREE, "--cmd", "oracle", "--alpha", "0",
                   "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["b"] == pytest.approx(2.0)
        assert data["mu1"] == pytest.approx(1 - 2 * math.sqrt(2) / 3)
        assert data["entropy"] == pytest.approx(math.log(2))

    def test_ends_count(self, tmp_path):
        out = tmp_path / "e.json"
        rc = main(["--family", TREE, "--cmd", "ends", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert len(data["ends"]) == 3
        assert all(e["infinite"] for e in data["ends"])

    def test_resolvent_csv_matches_closed_form(self, tmp_path):
        out = tmp_path / "k.csv"
        rc = main(["--family", TREE, "--cmd", "resolvent", "--alpha", "0",
                   "--radii", "10:40:10", "--format", "csv",
                   "--out", str(out)])
        assert rc == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        by_r = {float(row["r"]): float(row["g"]) for row in rows}
        for n in range(9):
            assert by_r[float(n)] == pytest.approx((2 / 3) * 2.0 ** -n,
                                                   rel=1e-7)

    def test_spectrum_tree(self, tmp_path):
        out = tmp_path / "s.json"
        rc = main(["--family", TREE, "--cmd", "spectrum",
                   "--radii", "5:30:5", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        lo, hi = data["graph"]["interval"]
        assert lo < 0.0621910 and hi > 0.0571910
        assert len(data["ends"]) == 3

    def test_spectrum_file_with_omega_matches_brute(self, graph_file, tmp_path):
        fam_spec = json.dumps({"kind": "file", "path": str(graph_file)})
        out = tmp_path / "sf.json"
        rc = main(["--family", fam_spec, "--cmd", "spectrum",
                   "--radii", "2:4", "--omega", "a,b", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        fam = gd.build_family({"kind": "file", "path": str(graph_file)})
        brute = gd.brute_eigen(fam.graph, fam.graph.indices_of(["a", "b"]))
        assert data["omega"]["mu1"] == pytest.approx(brute[0], abs=1e-10)

    def test_decay_barrier_pass(self, tmp_path):
        out = tmp_path / "d.json"
        rc = main(["--family", TREE, "--cmd", "decay", "--f", "barrier",
                   "--radii", "4:12:4", "--r0", "1", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["report"]["verdict"] == "pass"

    def test_decay_constant_hypothesis_not_met(self, tmp_path):
        out = tmp_path / "d2.json"
        rc = main(["--family", TREE, "--cmd", "decay", "--f", "constant-1",
                   "--radii", "4:12:4", "--r0", "1", "--out", str(out)])
        assert rc == 4
        data = json.loads(out.read_text())
        assert data["report"]["verdict"] == "hypothesis-not-met"

    def test_decay_negative_file_precondition(self, tmp_path):
        fpath = tmp_path / "f.json"
        fpath.write_text(json.dumps(
            {"by_radius": {str(float(r)): -1.0 for r in range(0, 30)}}))
        out = tmp_path / "d3.json"
        rc = main(["--family", TREE, "--cmd", "decay", "--f", str(fpath),
                   "--radii", "4:8:4", "--r0", "1", "--out", str(out)])
        assert rc == 4
        data = json.loads(out.read_text())
        assert data["report"]["verdict"] == "precondition-failed"

    def test_entropy_tree(self, tmp_path):
        out = tmp_path / "en.json"
        rc = main(["--family", TREE, "--cmd", "entropy",
                   "--radii", "5:30:5", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["brooks"]["verdict"] == "holds"
        assert data["slope_fit"] == pytest.approx(math.log(2), rel=0.02)
        assert {"regime", "samples", "liminf_proxy", "slope_fit",
                "brooks"} <= set(data)

    def test_ray_entropy(self, tmp_path):
        out = tmp_path / "er.json"
        rc = main(["--family", RAY, "--cmd", "entropy",
                   "--radii", "5:40:5", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["regime"] == "finite-volume"
        assert data["brooks"]["verdict"] == "holds"


class TestExitCodes:
    def test_missing_family_file_is_config_error(self):
        rc, _, err = run_cli(["--family", "/does/not/exist.json",
                              "--cmd", "spectrum"])
        assert rc == 2
        assert "config error" in err

    def test_bad_command_rejected_by_argparse(self):
        rc, _, _ = run_cli(["--family", TREE, "--cmd", "bogus"])
        assert rc == 2

    def test_oracle_on_ray_is_config_error(self):
        rc = main(["--family", RAY, "--cmd", "oracle"])
        assert rc == 2


class TestDeterminism:
    def test_spectrum_is_byte_stable(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            rc = main(["--family", TREE, "--cmd", "spectrum",
                       "--radii", "5:20:5", "--out", str(out)])
            assert rc == 0
        assert a.read_text() == b.read_text()

    def test_golden_schema_finite_file(self, graph_file, tmp_path):
        fam_spec = json.dumps({"kind": "file", "path": str(graph_file)})
        out = tmp_path / "g.json"
        rc = main(["--family", fam_spec, "--cmd", "spectrum",
                   "--radii", "2:4", "--out", str(out)])
        assert rc == 0
        data = json.loads(out.read_text())
        assert set(data["graph"]) == {"target", "radii", "mu1", "interval",
                                      "extrapolation_reliable"}
