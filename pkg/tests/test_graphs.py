import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import graphdecay as gd


def tree_ball_size(N, R):
    if R == 0:
        return 1
    return (N * (N - 1) ** R - 2) // (N - 2)


class TestFamilies:
    def test_tree_radius_one(self, tree3):
        mat = tree3.materialize(1)
        inside = mat.depths <= 1
        assert inside.sum() == 4
        assert np.allclose(mat.graph.mass, 3.0)
        coo = mat.graph.adj
        # 3 edges inside the ball, all of weight 1
        sub = coo[np.nonzero(inside)[0]][:, np.nonzero(inside)[0]]
        assert sub.nnz == 6 and np.allclose(sub.data, 1.0)

    @pytest.mark.parametrize("N", [3, 4])
    def test_ball_counts_match_bfs(self, N):
        fam = gd.RegularTreeFamily(N)
        sizes = gd.brute_ball_sizes(fam, 12)
        for R, size in enumerate(sizes):
            assert size == tree_ball_size(N, R)

    def test_ray_normalized_masses(self, ray_half):
        mat = ray_half.materialize(6)
        g = mat.graph
        beta = 0.5
        assert g.mass[g.index["0"]] == pytest.approx(1.0)
        for n in range(1, 6):
            assert g.mass[g.index[str(n)]] == pytest.approx(
                beta ** (n - 1) * (1 + beta))

    def test_family_spec_errors(self):
        with pytest.raises(gd.ConfigError):
            gd.build_family({"kind": "tree", "N": 2})
        with pytest.raises(gd.ConfigError):
            gd.build_family({"kind": "ray", "beta": -1})
        with pytest.raises(gd.ConfigError):
            gd.build_family({"kind": "nope"})
        with pytest.raises(gd.ConfigError):
            gd.build_family({"kind": "file"})

    def test_file_family_from_json(self, graph_file):
        fam = gd.build_family({"kind": "file", "path": str(graph_file)})
        assert fam.graph.n == 3
        assert fam.total_volume == pytest.approx(6.0)
        renorm = gd.build_family({"kind": "file", "path": str(graph_file),
                                  "mass": "normalized"})
        g = renorm.graph
        assert g.mass[g.index["b"]] == pytest.approx(3.0)
        assert g.mass[g.index["a"]] == pytest.approx(2.0)

    def test_bad_file_weights(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"vertices":[{"id":"a","m":1},{"id":"b","m":1}],'
                       '"edges":[{"u":"a","v":"b","w":-1}]}')
        with pytest.raises(gd.ConfigError):
            gd.build_family({"kind": "file", "path": str(bad)})

    def test_budget_cap(self):
        fam = gd.RegularTreeFamily(3, max_vertices=100)
        with pytest.raises(gd.ResourceError):
            fam.materialize(10)

    @settings(max_examples=20, deadline=None)
    @given(r1=st.integers(0, 5), r2=st.integers(0, 5))
    def test_exhaustion_consistency(self, r1, r2):
        if r1 > r2:
            r1, r2 = r2, r1
        fam = gd.RegularTreeFamily(3)
        small, big = fam.materialize(r1), fam.materialize(r2)
        inside = np.nonzero(small.depths <= r1)[0]
        for i in inside:
            v = small.graph.ids[i]
            j = big.graph.index[v]
            assert big.graph.mass[j] == small.graph.mass[i]
            nb_small, w_small = small.graph.neighbors(i)
            nb_big, w_big = big.graph.neighbors(j)
            ids_small = {small.graph.ids[k]: w for k, w in zip(nb_small, w_small)}
            ids_big = {big.graph.ids[k]: w for k, w in zip(nb_big, w_big)}
            assert ids_small == ids_big

    def test_slice_masses_match_brute_sums(self, tree3):
        sl = tree3.radial_slice(8)
        for k in range(9):
            expected = gd.brute_sum(tree3, lambda r: 1.0, max(k, 1e-9), k) \
                if k else 3.0
            i = int(np.nonzero(sl.depths == k)[0][0])
            assert sl.graph.mass[i] == pytest.approx(expected)


class TestBallsAnnuli:
    def test_ball_zero(self, tree3, d):
        assert gd.ball(tree3, d, 0) == {"0"}

    def test_ball_t3_radius2(self, tree3, d):
        assert len(gd.ball(tree3, d, 2)) == 10

    def test_ball_monotone_and_exhausts(self, tree3, d):
        balls = [gd.ball(tree3, d, R) for R in range(5)]
        for a, b in zip(balls, balls[1:]):
            assert a < b

    def test_ray_path_metric_prefix_sums(self):
        ray = gd.WeightedRayFamily(0.5)
        lengths = [(str(n), str(n + 1), 0.3 + 0.1 * n) for n in range(30)]
        metric = gd.explicit_metric(lengths)
        k = 5
        R = sum(0.3 + 0.1 * n for n in range(k))
        got = gd.ball(ray, metric, R)
        assert got == {str(n) for n in range(k + 1)}

    def test_annulus_depths_1_2(self, tree3, d):
        assert len(gd.annulus(tree3, d, 1, 2)) == 9

    def test_annulus_empty_slice(self, tree3, d):
        assert gd.annulus(tree3, d, 2.2, 2.8) == frozenset()

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_annulus_counts_formula(self, tree3, d, n):
        got = gd.annulus(tree3, d, n, n + 3)
        assert len(got) == 45 * 2 ** (n - 1)

    def test_annulus_bad_radii(self, tree3, d):
        with pytest.raises(gd.ConfigError):
            gd.annulus(tree3, d, 2, 2)
        with pytest.raises(gd.ConfigError):
            gd.annulus(tree3, d, 0, 2)


class TestBoundaryEnds:
    def test_boundary_of_everything_is_empty(self, path5):
        g = path5.graph
        assert gd.WeightedGraph.vertex_boundary(g, range(g.n)).size == 0

    def test_boundary_of_root(self, tree3):
        mat = tree3.materialize(2)
        bnd = mat.graph.vertex_boundary([mat.root])
        assert sorted(mat.graph.ids[i] for i in bnd) == ["0.1", "0.2", "0.3"]

    def test_boundary_of_ball2(self, tree3):
        mat = tree3.materialize(3)
        ballv = np.nonzero(mat.depths <= 2)[0]
        bnd = mat.graph.vertex_boundary(ballv)
        assert bnd.size == 12

    def test_tree_ends_at_root(self, tree3):
        dec = gd.ends(tree3, {"0"})
        assert len(dec.ends) == 3
        assert all(e.infinite for e in dec.ends)
        assert all(e.boundary == {"0"} for e in dec.ends)
        assert all(e.radial for e in dec.ends)
        assert not dec.finite_components

    def test_ray_single_end(self, ray_half):
        dec = gd.ends(ray_half, {"0"})
        assert len(dec.ends) == 1
        assert dec.ends[0].infinite

    def test_finite_path_has_no_ends(self, path5):
        dec = gd.ends(path5, {"p2"})
        assert len(dec.ends) == 0
        assert len(dec.finite_components) == 2
        comps = sorted(sorted(c) for c in dec.finite_components)
        assert comps == [["p0", "p1"], ["p3", "p4"]]

    def test_empty_omega_rejected(self, tree3):
        with pytest.raises(gd.ConfigError):
            gd.ends(tree3, set())

    def test_components_partition_and_no_cross_edges(self, tree3):
        dec = gd.ends(tree3, gd.ball(tree3, gd.combinatorial_metric(), 1))
        assert len(dec.ends) == 6
        mat = tree3.materialize(4)
        g = mat.graph
        seen = set()
        for e in dec.ends:
            assert not (e.component & seen)
            seen |= e.component
        for e in dec.ends:
            comp = g.indices_of([v for v in e.component if v in g.index])
            others = seen - e.component
            for i in comp:
                nbrs, _ = g.neighbors(i)
                for j in nbrs:
                    assert g.ids[j] not in others


class TestGraphValidation:
    def test_rejects_self_loop(self):
        with pytest.raises(gd.ConfigError):
            gd.make_graph([("a", 1.0)], [("a", "a", 1.0)])

    def test_rejects_bad_mass(self):
        with pytest.raises(gd.ConfigError):
            gd.make_graph([("a", 0.0)], [])

    def test_rejects_conflicting_weights(self):
        with pytest.raises(gd.ConfigError):
            gd.make_graph([("a", 1.0), ("b", 1.0)],
                          [("a", "b", 1.0), ("b", "a", 2.0)])

    def test_json_roundtrip(self, path5):
        g = path5.graph
        clone = gd.graph_from_dict(g.to_json())
        assert clone.ids == g.ids
        assert np.allclose(clone.mass, g.mass)
        assert (clone.adj != g.adj).nnz == 0

    def test_connectivity_checkable(self, path5):
        assert path5.graph.is_connected()
        g2 = gd.make_graph([("a", 1.0), ("b", 1.0)], [])
        assert not g2.is_connected()
