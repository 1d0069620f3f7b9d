import math

import numpy as np
import pytest
from scipy.stats import binom

from sparse_ergm.errors import CapExceeded, ConfigError
from sparse_ergm.exact import (
    directed_bruteforce_exact,
    directed_rowwise_exact,
    sandwich_bounds,
    undirected_exact,
    undirected_gibbs_law,
    witness_constants,
)
from sparse_ergm.graph_core import SubgraphSpec, UndirectedGraph
from sparse_ergm.model import ModelSpec, ParamSchedule, effective_params, hamiltonian

from oracles import brute_undirected_gibbs, logistic

CONST1 = ParamSchedule("constant", 1.0)


def und(stats, beta, schedule=CONST1):
    return ModelSpec.undirected(stats, beta, schedule)


class TestUndirectedExact:
    def test_uniform_measure(self):
        r = undirected_exact(und(["star:1", "star:2"], [0.0, 0.0]), 3)
        assert r.log_Z == pytest.approx(3 * math.log(2), abs=1e-14)
        assert r.p_edge == pytest.approx(0.5, abs=1e-15)
        assert r.p_joint == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("alpha,beta1", [(1.0, -1.0), (2.5, -0.3), (0.1, 2.0)])
    def test_edge_only_closed_form_n4(self, alpha, beta1):
        r = undirected_exact(und(["star:1"], [beta1], ParamSchedule("constant", alpha)), 4)
        t = 2 * alpha * beta1
        assert r.p_edge == pytest.approx(logistic(t), abs=1e-12)
        assert r.log_Z == pytest.approx(6 * math.log1p(math.exp(t)), abs=1e-12)

    def test_edge_two_star_n3_against_enumeration(self):
        # independent 8-graph enumeration: Z = 1 + 3e^{-8/3} + 3e^{-6} + e^{-10}
        want = brute_undirected_gibbs([(((0, 1),), 2), (((0, 1), (0, 2)), 3)], [-1.0, -1.0], 3)
        hand = math.log(1 + 3 * math.exp(-8 / 3) + 3 * math.exp(-6) + math.exp(-10))
        assert want[0] == pytest.approx(hand, abs=1e-14)
        r = undirected_exact(und(["star:1", "star:2"], [-1, -1]), 3)
        assert (r.log_Z, r.p_edge, r.p_joint) == pytest.approx(want, abs=1e-14)
        assert r.log_Z == pytest.approx(0.19551086925725286, abs=1e-14)

    @pytest.mark.parametrize("stats,beta", [
        (["star:1", "subgraph:3;1-2,2-3,1-3"], [-0.5, -1.0]),
        (["star:1", "subgraph:4;1-2,2-3,3-4"], [-0.4, -0.8]),
        (["star:1", "star:3", "subgraph:4;1-2,2-3,3-4,4-1"], [-0.3, 0.2, -0.6]),
    ])
    @pytest.mark.parametrize("n", [3, 4])
    def test_general_statistics_against_brute_force(self, stats, beta, n):
        m = und(stats, beta, ParamSchedule("log", 1.2))
        want = brute_undirected_gibbs([(h.edges, h.vertex_count) for h in m.statistics],
                                      effective_params(m, n), n)
        r = undirected_exact(m, n)
        assert (r.log_Z, r.p_edge, r.p_joint) == pytest.approx(want, rel=1e-12, abs=1e-14)

    def test_gibbs_law_matches_hamiltonian(self):
        m = und(["star:1", "star:2"], [-1, -1])
        law = undirected_gibbs_law(m, 3)
        h = np.array([hamiltonian(m, UndirectedGraph.from_index(3, i)) for i in range(8)])
        want = np.exp(h) / np.exp(h).sum()
        np.testing.assert_allclose(law, want, rtol=1e-13)

    def test_threads_do_not_change_bits(self):
        m = und(["star:1", "star:2", "subgraph:3;1-2,2-3,1-3"], [-1, -0.5, -0.2],
                ParamSchedule("log", 1.5))
        a = undirected_exact(m, 7, threads=1)
        b = undirected_exact(m, 7, threads=4)
        assert (a.log_Z, a.p_edge, a.p_joint) == (b.log_Z, b.p_edge, b.p_joint)

    def test_p_edge_increases_with_beta1(self):
        vals = [undirected_exact(und(["star:1", "star:2"], [b1, -1.0]), 5).p_edge
                for b1 in (-3.0, -2.0, -1.0, -0.5, -0.1)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_log_z_finite_for_huge_alpha(self):
        m = und(["star:1", "star:2"], [-1, -1], ParamSchedule("constant", 1e4))
        r = undirected_exact(m, 5)
        assert math.isfinite(r.log_Z)
        assert r.p_joint <= r.p_edge <= 1

    def test_caps(self):
        m = und(["star:1"], [-1])
        with pytest.raises(CapExceeded, match="7"):
            undirected_exact(m, 8)
        with pytest.raises(CapExceeded):
            undirected_exact(m, 9, cap=9)
        general = und(["star:1", "subgraph:4;1-2,2-3,3-4"], [-1, -1])
        with pytest.raises(CapExceeded, match="6"):
            undirected_exact(general, 7)

    def test_flavor_mismatch(self):
        with pytest.raises(ConfigError):
            undirected_exact(ModelSpec.directed([1], [-1]), 3)


class TestDirected:
    def test_one_star_n2(self):
        m = ModelSpec.directed([1], [-1], CONST1)
        r = directed_rowwise_exact(m, 2)
        assert r.p_edge == pytest.approx(0.2689414213699951, abs=1e-15)
        assert r.p_edge == pytest.approx(logistic(-1), abs=1e-15)
        assert r.log_Z == pytest.approx(4 * math.log1p(math.exp(-1)), abs=1e-14)

    @pytest.mark.parametrize("n", [2, 5, 40])
    def test_uniform(self, n):
        r = directed_rowwise_exact(ModelSpec.directed([1, 2], [0, 0], CONST1), n)
        assert r.log_Z == pytest.approx(n * n * math.log(2), rel=1e-14)
        np.testing.assert_allclose(r.degree_law, binom.pmf(np.arange(n + 1), n, 0.5), atol=1e-14)
        assert r.degree_law.sum() == pytest.approx(1.0, abs=1e-12)

    def test_uniform_bruteforce(self):
        r = directed_bruteforce_exact(ModelSpec.directed([1], [0.0], CONST1), 2)
        assert r.log_Z == pytest.approx(4 * math.log(2), abs=1e-14)

    @pytest.mark.parametrize("diag", [True, False])
    def test_one_star_bruteforce_logistic(self, diag):
        m = ModelSpec.directed([1], [-0.8], ParamSchedule("constant", 1.5), allow_diagonal=diag)
        r = directed_bruteforce_exact(m, 3)
        assert r.p_edge == pytest.approx(logistic(-1.2), abs=1e-14)

    def test_rowwise_equals_bruteforce_reference_case(self):
        m = ModelSpec.directed([1, 2], [-1, -0.5], ParamSchedule("constant", 2.0))
        a, b = directed_rowwise_exact(m, 3), directed_bruteforce_exact(m, 3)
        assert abs(a.log_Z - b.log_Z) / abs(b.log_Z) < 1e-10
        assert abs(a.p_edge - b.p_edge) < 1e-12
        assert abs(a.p_joint - b.p_joint) < 1e-12
        np.testing.assert_allclose(a.degree_law, b.degree_law, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("diag", [True, False])
    def test_rowwise_equals_bruteforce_grid(self, n, k, diag):
        rng = np.random.default_rng(100 * n + 10 * k + diag)
        for _ in range(10):
            alpha = rng.uniform(0.1, 5.0)
            beta = -rng.uniform(0.05, 3.0, size=k)
            m = ModelSpec.directed(list(range(1, k + 1)), beta,
                                   ParamSchedule("constant", alpha), allow_diagonal=diag)
            a, b = directed_rowwise_exact(m, n), directed_bruteforce_exact(m, n)
            assert abs(a.log_Z - b.log_Z) / abs(b.log_Z) < 1e-10
            assert abs(a.p_edge - b.p_edge) < 1e-12
            if not math.isnan(b.p_joint):
                assert abs(a.p_joint - b.p_joint) < 1e-12

    def test_four_vertices_three_stars(self):
        m = ModelSpec.directed([1, 2, 3], [-0.5, -0.7, -0.2], ParamSchedule("log", 1.0))
        a, b = directed_rowwise_exact(m, 4), directed_bruteforce_exact(m, 4)
        assert a.log_Z == pytest.approx(b.log_Z, rel=1e-12)
        assert a.p_joint == pytest.approx(b.p_joint, abs=1e-12)

    def test_bruteforce_cap(self):
        with pytest.raises(CapExceeded):
            directed_bruteforce_exact(ModelSpec.directed([1], [-1]), 5)

    def test_large_n_stays_finite(self):
        m = ModelSpec.directed([1, 2], [-1, -1], ParamSchedule("log", 2.0))
        r = directed_rowwise_exact(m, 10 ** 6)
        assert math.isfinite(r.log_Z) and r.log_Z > 0
        assert r.degree_law.sum() == pytest.approx(1.0, abs=1e-12)
        assert 0 < r.p_joint <= r.p_edge <= 1

    def test_huge_alpha_log_domain(self):
        m = ModelSpec.directed([1, 2], [-1, -1], ParamSchedule("constant", 1e4))
        r = directed_rowwise_exact(m, 50)
        assert math.isfinite(r.log_Z)
        assert r.log_p_edge == pytest.approx(-1e4 - 1e4 / 50 - math.log(1), rel=1e-6)


class TestSandwich:
    def test_edge_only(self):
        n, alpha = 5, 1.3
        m = und(["star:1"], [-1], ParamSchedule("constant", alpha))
        sb = sandwich_bounds(m, n)
        q = math.exp(-2 * alpha)
        assert sb.lower == pytest.approx((1 + q) ** -10, rel=1e-13)
        assert sb.upper == pytest.approx((1 + q) ** 9, rel=1e-13)
        ratio = undirected_exact(m, n).p_edge / q
        assert ratio == pytest.approx(1 / (1 + q), rel=1e-12)
        assert sb.lower <= ratio <= sb.upper

    def test_two_star_witness_constant(self):
        assert witness_constants(SubgraphSpec.star(2))[0] == 2
        # 2-star into a 2-star graph: center->center gives 4, leaf centers 1 each
        assert witness_constants(SubgraphSpec.star(2))[1] == 6
        assert witness_constants(SubgraphSpec.triangle()) == (0, 0)

    def test_rejects_disconnected(self):
        m = und(["star:1", "subgraph:4;1-2,3-4"], [-1, -1])
        with pytest.raises(ConfigError):
            sandwich_bounds(m, 5)

    def test_requires_negative(self):
        with pytest.raises(ConfigError):
            sandwich_bounds(und(["star:1", "star:2"], [-1, 0.5]), 5)

    @pytest.mark.parametrize("stats,beta", [
        (["star:1", "star:2"], [-1, -1]),
        (["star:1", "star:3"], [-0.5, -2]),
        (["star:1", "subgraph:3;1-2,2-3,1-3"], [-1, -3]),
        (["star:1", "star:2", "subgraph:4;1-2,2-3,3-4"], [-0.7, -0.4, -1.1]),
    ])
    @pytest.mark.parametrize("sched", [ParamSchedule("log", 1.5), ParamSchedule("constant", 0.4)])
    def test_brackets_exact_ratios(self, stats, beta, sched):
        m = und(stats, beta, sched)
        for n in (3, 4, 5, 6):
            r = undirected_exact(m, n)
            b1 = effective_params(m, n)[0]
            sb = sandwich_bounds(m, n)
            assert sb.log_lower <= r.log_p_edge - 2 * b1 <= sb.log_upper
            assert sb.log_lower2 <= r.log_p_joint - 4 * b1 <= sb.log_upper2
