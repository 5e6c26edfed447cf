from __future__ import annotations

import pytest

from approxdeco.generators import gen_random_regular, gen_rotation_graph, gen_torus
from approxdeco.graph import Graph, Orientation, PartialEdgeColoring, corr_of_orientation
from approxdeco.measures import VertexMeasure, measure_from_preset
from approxdeco.oracles import exact_schreier_decoration, naive_corr_decoration
from approxdeco.orient import approximate_balanced_orientation
from approxdeco.schreier import (
    BudgetReport,
    Decoration,
    build_double_cover,
    decorate,
    pull_back,
    verify_free_action,
)

from conftest import cycle_graph


def permutation_of(g: Graph, d: Decoration, alpha: int) -> dict[int, int]:
    s, c = d.orientation, d.labels
    return {s.tail(g, e): s.head(g, e) for e in range(g.n_edges) if c.colors[e] == alpha}


class TestDoubleCover:
    def test_directed_four_cycle(self):
        g = cycle_graph(4)
        cov = build_double_cover(g, Orientation([0] * 4))
        h = cov.cover_graph
        assert h.n_vertices == 8 and h.n_edges == 4 and h.max_degree == 1

    def test_torus_cover_is_two_regular(self):
        g, dec = gen_torus((5, 6))
        cov = build_double_cover(g, dec.orientation)
        h = cov.cover_graph
        assert h.is_regular() and h.max_degree == 2 and h.is_bipartite()

    def test_random_eight_regular(self):
        g = gen_random_regular(2000, 8, seed=3)
        mu = VertexMeasure.uniform(g.n_vertices)
        s, _ = approximate_balanced_orientation(g, mu, 0.05)
        cov = build_double_cover(g, s, mu)
        assert cov.cover_graph.max_degree <= 4
        assert sum(cov.nu.weights) == pytest.approx(1.0, abs=1e-12)

    def test_edges_match_orientation(self):
        g = gen_rotation_graph(30, (1, 7))
        s = Orientation([int(e % 3 == 0) for e in range(g.n_edges)])
        mu = measure_from_preset("random:2", g)
        cov = build_double_cover(g, s, mu)
        corr = corr_of_orientation(g, s).corr_vertices
        expected = {e for e in range(g.n_edges) if set(g.edges[e]) <= corr}
        assert set(cov.edge_map) == expected and len(cov.edge_map) == len(expected)
        k = len(cov.base_corr)
        for ce, e in enumerate(cov.edge_map):
            x, y = cov.cover_graph.edges[ce]
            assert x < k <= y
            assert cov.base_of(x) == (s.tail(g, e), 0)
            assert cov.base_of(y) == (s.head(g, e), 1)
        # nu(A0 + B1) = (mu(A) + mu(B)) / (2 mu(Corr S))
        a = cov.base_corr[: k // 2]
        b = cov.base_corr[k // 3:]
        cover_set = [cov.copy_of(v, 0) for v in a] + [cov.copy_of(v, 1) for v in b]
        assert cov.nu.mass(cover_set) == pytest.approx(
            (mu.mass(a) + mu.mass(b)) / (2 * mu.mass(corr)), abs=1e-12
        )

    def test_copy_index_two_colors_cover(self):
        g, dec = gen_torus((4, 4))
        cov = build_double_cover(g, dec.orientation)
        side = [cov.base_of(x)[1] for x in range(cov.cover_graph.n_vertices)]
        assert all(side[x] != side[y] for x, y in cov.cover_graph.edges)

    def test_empty_corr_rejected(self):
        g = Graph(3, [(1, 0), (1, 2)])
        with pytest.raises(ValueError, match="measure zero"):
            build_double_cover(g, Orientation([0, 0]))

    def test_odd_degree_rejected(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3)])
        with pytest.raises(ValueError):
            build_double_cover(g, Orientation([0, 0, 0]))


class TestDecorate:
    def test_torus_exact(self):
        g, _ = gen_torus((6, 6))
        d = decorate(g, None, 0.3)
        assert d.report.corr_mass == 1
        assert verify_free_action(g, d).all_permutations()

    def test_k5(self, k5):
        d = decorate(k5, None, 0.5)
        assert d.report.corr_mass >= 0.5
        assert exact_schreier_decoration(k5).value == 1

    @pytest.mark.parametrize("preset", ["uniform", "random:7"])
    def test_random_eight_regular_budget(self, preset):
        g = gen_random_regular(3000, 8, seed=1)
        mu = measure_from_preset(preset, g)
        eps = 0.05
        d = decorate(g, mu, eps)
        b = d.budget
        assert abs(b.total - b.predicted_total()) <= 1e-12
        assert b.total + 1e-12 >= 1 - d.report.corr_mass
        assert d.budget_met and b.total < eps
        assert d.report.corr_mass > 1 - eps

    def test_odd_regular_rejected(self):
        g = gen_random_regular(10, 3, seed=0)
        with pytest.raises(ValueError, match="even degree"):
            decorate(g, None, 0.1)

    def test_pull_back_consistency(self):
        g = gen_random_regular(500, 4, seed=2)
        d = decorate(g, None, 0.1)
        cov, cres = d.cover, d.cover_result
        for ce, e in enumerate(cov.edge_map):
            assert d.labels.colors[e] == cres.coloring.colors[ce]
        with pytest.raises(AssertionError):
            doubled = type(cov)(cov.base_corr, cov.cover_graph, cov.edge_map * 2, cov.nu, cov.corr_mass)
            pull_back(g, doubled, PartialEdgeColoring(cres.coloring.colors * 2, 2))

    def test_unlabelled_edges_are_outside_cover(self):
        g = gen_random_regular(400, 4, seed=5)
        d = decorate(g, None, 0.2)
        in_cover = set(d.cover.edge_map)
        for e, col in enumerate(d.labels.colors):
            if e not in in_cover:
                assert col is None

    def test_corr_recount(self):
        g = gen_random_regular(600, 6, seed=9)
        d = decorate(g, measure_from_preset("random:1", g), 0.1)
        assert d.report.corr_vertices == naive_corr_decoration(g, d.orientation, d.labels)
        for v in d.report.corr_vertices:
            outs = [d.labels.colors[e] for e in d.orientation.out_edges(g, v)]
            ins = [d.labels.colors[e] for e in d.orientation.in_edges(g, v)]
            assert sorted(outs) == sorted(ins) == list(range(3))

    def test_budget_flag(self):
        b = BudgetReport(0.1, 0.0, 0.0, 0.9, 1.0, 1.0, orientation_met=False, cover_met=True)
        d = Decoration(Orientation([]), PartialEdgeColoring([], 1), None, budget=b)
        assert not d.budget_met


class TestFreeAction:
    def test_torus_permutations(self):
        g, dec = gen_torus((3, 4, 5))
        rep = verify_free_action(g, dec)
        assert rep.all_permutations() and len(rep.actions) == 3

    def test_injective_mass_at_least_corr(self):
        g = gen_random_regular(800, 4, seed=4)
        mu = VertexMeasure.uniform(g.n_vertices)
        d = decorate(g, mu, 0.2)
        rep = verify_free_action(g, d)
        assert rep.injective_on_corr()
        for act in rep.actions:
            assert mu.mass(act.injective) >= d.report.corr_mass

    def test_k5_oracle_permutations(self, k5):
        d = exact_schreier_decoration(k5).witness
        rep = verify_free_action(k5, d)
        assert rep.all_permutations()
        s1, s2 = permutation_of(k5, d, 0), permutation_of(k5, d, 1)
        inv1 = {w: v for v, w in s1.items()}
        inv2 = {w: v for v, w in s2.items()}
        comm = {v: s1[s2[inv1[inv2[v]]]] for v in range(5)}
        assert sorted(comm.values()) == list(range(5))

    def test_broken_label_detected(self):
        g, dec = gen_torus((4, 4))
        labels = list(dec.labels.colors)
        labels[0] = 1 - labels[0]
        bad = Decoration(dec.orientation, PartialEdgeColoring(labels, 2), dec.report)
        assert not verify_free_action(g, bad).all_permutations()
