import numpy as np
import pytest

import graphdecay as gd
from conftest import random_connected_graph


def single_edge_graph(m_a=1.0, m_b=1.0, w=1.0):
    return gd.make_graph([("a", m_a), ("b", m_b)], [("a", "b", w)])


def t3_pair_graph():
    """Two adjacent vertices of T_3 with their outside neighbor layer."""
    vertices = [("u", 3.0), ("v", 3.0)] + [(f"x{i}", 3.0) for i in range(4)]
    edges = [("u", "v", 1.0), ("u", "x0", 1.0), ("u", "x1", 1.0),
             ("v", "x2", 1.0), ("v", "x3", 1.0)]
    return gd.make_graph(vertices, edges)


class TestLaplacian:
    def test_constants_are_harmonic(self, rng):
        g = random_connected_graph(15, rng)
        f = gd.VertexFunction.constant(g, 3.7)
        for x in range(g.n):
            assert gd.laplacian_apply(g, f, x) == pytest.approx(0.0, abs=1e-14)

    def test_barrier_is_harmonic_on_tree_end(self, tree3, d):
        mat = tree3.materialize(6)
        r = d.distances_from_root(mat)
        f = 0.5 ** r  # boundary value 1 at the root
        interior = np.nonzero((r >= 1) & mat.graph.complete)[0]
        vals = gd.laplacian_values(mat.graph, f, interior)
        assert np.abs(vals).max() <= 1e-14

    def test_single_edge_value(self):
        g = single_edge_graph()
        f = np.array([0.0, 1.0])
        assert gd.laplacian_apply(g, f, 0) == pytest.approx(1.0)

    def test_missing_neighbor_values_raise(self):
        g = single_edge_graph()
        f = gd.VertexFunction.from_dict(g, {"a": 1.0})
        with pytest.raises(gd.PreconditionError):
            gd.laplacian_apply(g, f, 0)


class TestGamma:
    def test_nonnegative_square(self, rng):
        g = random_connected_graph(20, rng)
        f = rng.normal(size=g.n)
        out = gd.gamma(g, f)
        assert out.values[out.defined].min() >= 0.0

    def test_indicator_on_single_edge(self):
        g = single_edge_graph()
        f = np.array([1.0, 0.0])
        out = gd.gamma(g, f)
        assert out.values[0] == pytest.approx(0.5)

    def test_gamma_with_constant_vanishes(self, rng):
        g = random_connected_graph(10, rng)
        f = rng.normal(size=g.n)
        out = gd.gamma(g, f, np.ones(g.n))
        assert np.abs(out.values).max() <= 1e-14

    def test_consistent_with_defining_combination(self, rng):
        for _ in range(10):
            g = random_connected_graph(int(rng.integers(5, 25)), rng)
            f = rng.normal(size=g.n)
            h = rng.normal(size=g.n)
            a = gd.gamma(g, f, h)
            b = gd.gamma_by_definition(g, f, h)
            scale = max(1.0, np.abs(a.values).max())
            assert np.abs(a.values - b.values).max() <= 1e-12 * scale


class TestIdentities:
    def test_green_zero_h(self, rng):
        g = random_connected_graph(12, rng)
        res = gd.green_identity_residual(g, rng.normal(size=g.n), np.zeros(g.n))
        assert res.lhs == 0.0 and res.rhs == 0.0

    def test_green_single_edge_hand_expansion(self):
        g = single_edge_graph(w=2.0, m_a=2.0, m_b=2.0)
        f = np.array([0.5, -1.0])
        res = gd.green_identity_residual(g, f, f)
        assert res.lhs == pytest.approx(2.0 * 1.5 ** 2)
        assert res.within(1e-12)

    def test_green_random_graphs_brute_force(self, rng):
        for _ in range(100):
            n = int(rng.integers(5, 51))
            g = random_connected_graph(n, rng, normalized=bool(rng.integers(2)))
            f = rng.normal(size=g.n)
            h = np.zeros(g.n)
            supp = rng.choice(g.n, size=max(1, n // 3), replace=False)
            h[supp] = rng.normal(size=supp.size)
            res = gd.green_identity_residual(g, f, h)
            assert res.within(1e-12)
            # independent double-loop evaluation of both sides
            lhs = 0.0
            for i in range(g.n):
                nbrs, w = g.neighbors(i)
                for j, wij in zip(nbrs, w):
                    lhs += 0.5 * wij * (f[j] - f[i]) * (h[j] - h[i])
            assert lhs == pytest.approx(res.lhs, rel=1e-10, abs=1e-10)

    def test_form_identity_zero_h(self, rng):
        g = random_connected_graph(12, rng)
        res = gd.form_identity_residual(g, rng.normal(size=g.n), np.zeros(g.n))
        assert res.lhs == 0.0 and res.rhs == 0.0

    def test_form_identity_constant_f(self, rng):
        g = random_connected_graph(14, rng)
        h = np.zeros(g.n)
        h[[1, 3, 5]] = rng.normal(size=3)
        res = gd.form_identity_residual(g, np.full(g.n, 2.0), h)
        assert res.within(1e-12)

    def test_form_identity_random_graphs(self, rng):
        for _ in range(100):
            n = int(rng.integers(5, 51))
            g = random_connected_graph(n, rng, normalized=bool(rng.integers(2)))
            f = rng.normal(size=g.n)
            h = np.zeros(g.n)
            supp = rng.choice(g.n, size=max(1, n // 3), replace=False)
            h[supp] = rng.normal(size=supp.size)
            res = gd.form_identity_residual(g, f, h)
            assert res.within(1e-12)


class TestRayleigh:
    def test_single_vertex_normalized(self, rng):
        g = random_connected_graph(10, rng, normalized=True)
        f = gd.VertexFunction.from_dict(g, {"4": 1.0})
        assert gd.rayleigh_quotient(g, f) == pytest.approx(1.0)

    def test_t3_pair_values(self):
        g = t3_pair_graph()
        sym = gd.VertexFunction.from_dict(g, {"u": 1.0, "v": 1.0})
        anti = gd.VertexFunction.from_dict(g, {"u": 1.0, "v": -1.0})
        assert gd.rayleigh_quotient(g, sym) == pytest.approx(2 / 3)
        assert gd.rayleigh_quotient(g, anti) == pytest.approx(4 / 3)

    def test_zero_function_rejected(self, rng):
        g = random_connected_graph(5, rng)
        with pytest.raises(gd.PreconditionError):
            gd.rayleigh_quotient(g, np.zeros(g.n))

    def test_eigenpair_consistency(self, rng):
        g = random_connected_graph(30, rng)
        res = gd.dirichlet_bottom(g, range(10))
        rq = gd.rayleigh_quotient(g, res.eigenfunction)
        assert abs(rq - res.value) <= 1e-9


class TestDirichletBottom:
    def test_t3_pair(self):
        res = gd.dirichlet_bottom(t3_pair_graph(), [0, 1])
        assert res.value == pytest.approx(2 / 3, abs=1e-12)

    def test_single_vertex_normalized(self, rng):
        g = random_connected_graph(8, rng, normalized=True)
        res = gd.dirichlet_bottom(g, [3])
        assert res.value == pytest.approx(1.0)

    def test_empty_domain_rejected(self, rng):
        g = random_connected_graph(5, rng)
        with pytest.raises(gd.PreconditionError):
            gd.dirichlet_bottom(g, [])

    def test_positive_eigenfunction(self):
        res = gd.dirichlet_bottom(t3_pair_graph(), [0, 1])
        vals = res.eigenfunction.values[:2]
        assert (vals > 0).all()

    def test_domain_monotonicity(self, rng):
        g = random_connected_graph(40, rng)
        for _ in range(10):
            size = int(rng.integers(2, 20))
            omega2 = rng.choice(g.n, size=size, replace=False)
            k = int(rng.integers(1, size))
            omega1 = omega2[:k]
            v1 = gd.dirichlet_bottom(g, omega1).value
            v2 = gd.dirichlet_bottom(g, omega2).value
            assert v1 >= v2 - 1e-10

    def test_strict_below_one_with_edge(self, rng):
        for _ in range(10):
            g = random_connected_graph(int(rng.integers(4, 30)), rng,
                                       normalized=True)
            coo = g.adj.tocoo()
            k = int(rng.integers(coo.nnz))
            omega = {int(coo.row[k]), int(coo.col[k])}
            omega |= set(int(x) for x in
                         rng.choice(g.n, size=min(g.n, 5), replace=False))
            res = gd.dirichlet_bottom(g, omega)
            assert res.value < 1 - 1e-12

    def test_ball30_window_and_monotone(self, tree3, d):
        values = [gd.ball_bottom(tree3, d, R).value for R in (5, 10, 20, 30)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert 0.0571910 < values[-1] < 0.0621910

    def test_lanczos_agrees_with_dense_quotient(self, tree3, d):
        # materialized ball of depth 9 has 1534 vertices: sparse path
        mat = tree3.materialize(9)
        omega = np.nonzero(mat.depths <= 9)[0]
        direct = gd.dirichlet_bottom(mat.graph, omega)
        assert direct.method == "lanczos"
        sliced = gd.ball_bottom(tree3, d, 9)
        assert sliced.method == "dense"
        assert direct.value == pytest.approx(sliced.value, abs=1e-8)

    @pytest.mark.parametrize("R", [3, 5, 7])
    def test_quotient_matches_direct_solve(self, tree3, d, R):
        mat = tree3.materialize(R)
        omega = np.nonzero(mat.depths <= R)[0]
        direct = gd.dirichlet_bottom(mat.graph, omega).value
        sliced = gd.ball_bottom(tree3, d, R).value
        assert direct == pytest.approx(sliced, abs=1e-10)

    def test_end_quotient_matches_direct(self, tree3, tree3_end, d):
        mat = tree3.materialize(6)
        comp = mat.graph.indices_of(
            [v for v in tree3_end.component if v in mat.graph.index])
        omega = comp[mat.depths[comp] <= 6]
        direct = gd.dirichlet_bottom(mat.graph, omega).value
        sliced = gd.end_bottom(tree3_end, 6).value
        assert direct == pytest.approx(sliced, abs=1e-10)


class TestSpectralSequences:
    def test_tree_sequence_decreases_to_limit(self, tree3, d):
        seq = gd.spectral_bottom_estimate(tree3, "graph", [5, 10, 20, 30], d)
        mu = 1 - 2 * np.sqrt(2) / 3
        assert all(b < a for a, b in zip(seq.values, seq.values[1:]))
        assert seq.values[-1] > mu
        lo, hi = seq.interval
        assert lo <= hi

    def test_end_limit_matches_whole_tree(self, tree3, tree3_end, d):
        seq = gd.spectral_bottom_estimate(tree3, tree3_end,
                                          [50, 100, 200, 400], d)
        mu = 1 - 2 * np.sqrt(2) / 3
        assert seq.conservative == pytest.approx(mu, abs=5e-4)

    def test_finite_graph_stabilizes(self, path5, d):
        seq = gd.spectral_bottom_estimate(path5, "graph", [6, 8, 10], d)
        assert seq.values[0] == seq.values[-1]

    def test_bad_schedule(self, tree3, d):
        with pytest.raises(gd.ConfigError):
            gd.spectral_bottom_estimate(tree3, "graph", [5, 5], d)


class TestSubharmonic:
    def test_harmonic_zero_defect(self, tree3, d):
        mat = tree3.materialize(6)
        r = d.distances_from_root(mat)
        f = 0.5 ** r
        omega = np.nonzero((r >= 1) & (r <= 4))[0]
        defect, _ = gd.subharmonic_defect(mat.graph, f, 0.0, omega)
        assert defect == pytest.approx(0.0, abs=1e-14)

    def test_constant_defect_is_mu(self, rng):
        g = random_connected_graph(12, rng)
        defect, _ = gd.subharmonic_defect(g, np.ones(g.n), 0.25, range(5))
        assert defect == pytest.approx(0.25)

    def test_negative_values_distinct_error(self, rng):
        g = random_connected_graph(12, rng)
        f = np.ones(g.n)
        f[3] = -0.5
        with pytest.raises(gd.NegativeFunctionError):
            gd.subharmonic_defect(g, f, 0.0, range(g.n))


class TestEssentialEvidence:
    def test_tree_complement_bottoms_approach_mu_e(self, tree3, d):
        ev = gd.essential_bottom_evidence(tree3, d, [0, 1, 2], 200)
        mu = 1 - 2 * np.sqrt(2) / 3
        assert ev["mu_e_evidence"] == pytest.approx(mu, rel=1e-3)
