import math

import numpy as np
import pytest

import graphdecay as gd

MU_T3 = 1 - 2 * math.sqrt(2) / 3


class TestVolumeEntropy:
    def test_t3_slope_near_log2_at_30(self, tree3, d):
        ent = gd.volume_entropy(tree3, d, list(range(5, 31, 5)))
        assert ent.regime == "infinite-volume"
        assert ent.slope_fit == pytest.approx(math.log(2), rel=0.02)

    def test_running_min_non_increasing(self, tree3, d):
        ent = gd.volume_entropy(tree3, d, list(range(4, 41, 4)))
        rm = ent.running_min
        assert all(b <= a for a, b in zip(rm, rm[1:]))
        assert ent.liminf_proxy == rm[-1]

    def test_finite_graph_sentinel(self, path5, d):
        ent = gd.volume_entropy(path5, d, [1, 2, 3, 5, 6])
        assert ent.regime == "finite-volume"
        assert ent.liminf_proxy == math.inf
        assert ent.sentinel is not None

    def test_ray_tail_rate_log2(self, ray_half, d):
        ent = gd.volume_entropy(ray_half, d, list(range(5, 41, 5)))
        assert ent.regime == "finite-volume"
        assert ent.slope_fit == pytest.approx(math.log(2), rel=1e-6)

    def test_bad_schedule(self, tree3, d):
        with pytest.raises(gd.ConfigError):
            gd.volume_entropy(tree3, d, [5, 5, 6])


class TestBrooks:
    def test_t3_closed_form_equality(self):
        o = gd.tree_closed_forms(3)
        bound = gd.decay_rate_inverse(o.entropy / 2)
        assert abs(o.mu1 - bound) <= 1e-9

    def test_t4_closed_form_equality(self):
        o = gd.tree_closed_forms(4)
        assert o.mu1 == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-15)
        bound = gd.decay_rate_inverse(math.log(3) / 2)
        assert abs(o.mu1 - bound) <= 1e-9

    def test_t3_numeric_within_two_percent(self, tree3, d):
        rep = gd.brooks_check(tree3, d, radii=list(range(5, 31, 5)))
        assert rep["verdict"] == "holds"
        assert rep["mu_e_evidence"] == pytest.approx(MU_T3, rel=0.02)
        assert rep["bound"] == pytest.approx(MU_T3, rel=0.02)
        assert all(row["holds"] for row in rep["eps_rows"])

    def test_t4_numeric(self, tree4, d):
        rep = gd.brooks_check(tree4, d, radii=list(range(5, 31, 5)))
        mu4 = 1 - math.sqrt(3) / 2
        assert rep["verdict"] == "holds"
        assert rep["mu_e_evidence"] == pytest.approx(mu4, rel=0.02)
        assert rep["bound"] == pytest.approx(mu4, rel=0.02)

    def test_finite_volume_ray_tail_bound(self, ray_half, d):
        rep = gd.brooks_check(ray_half, d, radii=list(range(5, 41, 5)))
        assert rep["verdict"] == "holds"
        assert all(row["holds"] for row in rep["eps_rows"])
        # the ray shares the tree's radial structure: equality here too
        assert rep["bound"] == pytest.approx(MU_T3, rel=0.02)
        assert rep["mu_e_evidence"] == pytest.approx(MU_T3, rel=0.02)
