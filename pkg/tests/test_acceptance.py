"""Acceptance criteria 1 to 9, each at its stated tolerance and time limit.

Every test prints one ``criterion N: PASS|FAIL`` line (also repeated in the
terminal summary) and then asserts the outcome.
"""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from approxdeco.generators import (
    gen_bipartite_regular,
    gen_random_regular,
    gen_rotation_graph,
    gen_torus,
    gen_truncated_even_tree,
    tree_boundary_fraction,
)
from approxdeco.graph import Graph
from approxdeco.koenig import (
    EliminationConfig,
    OddCycleError,
    chain_load,
    eliminate_color,
    extract_matching,
    koenig_color,
    unmatched_mass,
    vizing_plus_one,
)
from approxdeco.measures import VertexMeasure, edge_measure_from, measure_from_preset
from approxdeco.oracles import (
    euler_balanced_orientation,
    exact_chromatic_index,
    exact_schreier_decoration,
)
from approxdeco.orient import StageRecord, approximate_balanced_orientation
from approxdeco.schreier import decorate, verify_free_action

from conftest import ACCEPTANCE_LINES, complete_graph, cycle_graph, path_graph, random_bipartite


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# ------------------------------------------------------------ criterion 1

C1_CASES = list(itertools.product((3, 5), (1000, 10_000), (0.1, 0.01)))


@pytest.fixture(scope="module")
def koenig_runs():
    """The criterion 1 instances, shared with criterion 8."""
    runs = {}
    for d, n_side, eps in C1_CASES:
        g = gen_bipartite_regular(n_side, d, seed=n_side + d)
        mu = VertexMeasure.uniform(g.n_vertices, exact=True)
        start = time.perf_counter()
        res = koenig_color(g, mu, eps)
        runs[d, n_side, eps] = (g, mu, res, time.perf_counter() - start)
    return runs


def test_criterion_1_koenig_bound(koenig_runs):
    bad = []
    worst = 0.0
    for key, (g, mu, res, elapsed) in koenig_runs.items():
        worst = max(worst, elapsed)
        bound_ok = res.a_mass <= Fraction(1, res.config.L)
        if not (bound_ok and res.report.corr_mass > 1 - key[2] and elapsed < 30):
            bad.append(key)
    report(1, not bad, f"{len(C1_CASES)} instances, slowest {worst:.2f}s, failing {bad}")


# ------------------------------------------------------------ criterion 2


def test_criterion_2_chain_multiplicity():
    start = time.perf_counter()
    worst, bound_ok = 0, True
    cases = [gen_bipartite_regular(n, d, seed=7) for n, d in ((1000, 3), (1000, 5), (2000, 5))]
    cases.append(gen_torus((50, 50))[0])
    for g in cases:
        assert g.n_edges <= 10_000
        c = vizing_plus_one(g)
        eta = edge_measure_from(g, VertexMeasure.uniform(g.n_vertices))
        d = eliminate_color(g, c, eta, EliminationConfig(epsilon=0.6, L=2))
        for col in (c, d):
            load = max(chain_load(g, col), default=0)
            worst = max(worst, load)
            bound_ok &= load <= 2 * g.max_degree
    elapsed = time.perf_counter() - start
    report(2, bound_ok and elapsed < 10, f"max load {worst}, {elapsed:.2f}s")


# ------------------------------------------------------------ criterion 3


def test_criterion_3_exact_koenig_agreement():
    start = time.perf_counter()
    rng = random.Random(2024)
    failures = []
    for i in range(200):
        g = random_bipartite(rng)
        assert g.n_edges <= 40
        chi = exact_chromatic_index(g).value
        res = koenig_color(g, VertexMeasure.uniform(g.n_vertices, exact=True), 1 / (2 * g.n_vertices))
        if chi != g.max_degree or res.report.corr_mass != 1:
            failures.append(i)
    elapsed = time.perf_counter() - start
    report(3, not failures and elapsed < 60, f"200 instances, {elapsed:.2f}s, failing {failures}")


# ------------------------------------------------------------ criterion 4


def even_instances() -> list[Graph]:
    out = [complete_graph(5)]
    for a, b in itertools.product(range(3, 9), repeat=2):
        out.append(gen_torus((a, b))[0])
    for dims in ((3, 3, 3), (3, 4, 5), (4, 4, 4)):
        out.append(gen_torus(dims)[0])
    n = 7
    while len(out) < 100:
        k = 2 + n % 5
        if 2 * k < n:
            out.append(gen_rotation_graph(n, (1, k)))
        n += 1
    return out


def odd_instances() -> list[Graph]:
    return [
        path_graph(3),
        complete_graph(4),
        gen_random_regular(20, 3, seed=1),
        gen_truncated_even_tree(4, 3),
        Graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)]),
    ]


def test_criterion_4_balanced_orientation():
    start = time.perf_counter()
    evens = even_instances()
    good = 0
    for g in evens:
        _, rep = approximate_balanced_orientation(g, None, 0.01)
        good += rep.corr_mass == 1 and euler_balanced_orientation(g).value == 1
    rejected = 0
    for g in odd_instances():
        both = 0
        for fn in (lambda: approximate_balanced_orientation(g, None, 0.1), lambda: euler_balanced_orientation(g)):
            try:
                fn()
            except ValueError:
                both += 1
        rejected += both == 2
    elapsed = time.perf_counter() - start
    ok = len(evens) == 100 and good == 100 and rejected == len(odd_instances()) and elapsed < 10
    report(4, ok, f"{good}/100 even exact, {rejected} odd rejected by both, {elapsed:.2f}s")


# ------------------------------------------------------------ criterion 5


def test_criterion_5_path_system_convergence():
    start = time.perf_counter()
    lines = []
    ok = True
    for depth in range(4, 9):
        g = gen_truncated_even_tree(4, depth)
        mu = VertexMeasure.uniform(g.n_vertices, exact=True)
        trace: list[StageRecord] = []
        approximate_balanced_orientation(g, mu, 1e-9, truncation=True, trace=trace)
        deep = [t.deep_corr_mass for t in trace]
        bound = 3 * tree_boundary_fraction(4, depth)
        deficiency = 1 - deep[-1]
        ok &= all(a <= b for a, b in zip(deep, deep[1:])) and deficiency <= bound
        lines.append(f"D={depth}: {float(deficiency):.3f}<={float(bound):.3f}")
    elapsed = time.perf_counter() - start
    report(5, ok and elapsed < 60, ", ".join(lines) + f", {elapsed:.2f}s")


# ------------------------------------------------------------ criterion 6


def c6_instances():
    rr = gen_random_regular(10_000, 8, seed=11)
    torus = gen_torus((40, 40))[0]
    return [
        ("rr8", rr, "uniform"),
        ("rr8", rr, "random:3"),
        ("torus", torus, "uniform"),
        ("torus", torus, "exp:0,0.9"),
    ]


@pytest.fixture(scope="module")
def decorations():
    runs = []
    for (name, g, preset), eps in itertools.product(c6_instances(), (0.1, 0.05)):
        mu = measure_from_preset(preset, g)
        start = time.perf_counter()
        d = decorate(g, mu, eps)
        runs.append((f"{name}/{preset}/{eps}", g, mu, eps, d, time.perf_counter() - start))
    return runs


def test_criterion_6_decoration_budget(decorations):
    bad = []
    worst_gap = 0.0
    for name, g, mu, eps, d, elapsed in decorations:
        b = d.budget
        gap = abs(b.total - b.predicted_total())
        worst_gap = max(worst_gap, gap)
        if not (gap <= 1e-12 and b.total < eps and elapsed < 120):
            bad.append(name)
    report(6, not bad, f"{len(decorations)} runs, identity gap {worst_gap:.1e}, failing {bad}")


# ------------------------------------------------------------ criterion 7


def test_criterion_7_free_action(decorations):
    start = time.perf_counter()
    injective = all(verify_free_action(g, d).injective_on_corr() for _, g, _, _, d, _ in decorations)
    oracle_graphs = [complete_graph(5), gen_torus((5, 5))[0], gen_torus((3, 4, 5))[0]]
    perms = all(
        verify_free_action(g, exact_schreier_decoration(g).witness).all_permutations()
        for g in oracle_graphs
    )
    canonical = verify_free_action(*gen_torus((6, 7))).all_permutations()
    elapsed = time.perf_counter() - start
    report(7, injective and perms and canonical and elapsed < 10,
           f"injective {injective}, oracle permutations {perms}, {elapsed:.2f}s")


# ------------------------------------------------------------ criterion 8


def test_criterion_8_matchings(koenig_runs):
    start = time.perf_counter()
    worst, ok = 0, True
    for (d, n_side, eps), (g, mu, res, _) in koenig_runs.items():
        for beta in range(res.coloring.palette_size):
            m = unmatched_mass(g, extract_matching(g, res.coloring, beta), mu)
            worst = max(worst, m)
            ok &= m < eps
    elapsed = time.perf_counter() - start
    report(8, ok and elapsed < 10, f"largest unmatched mass {float(worst):.5f}, {elapsed:.2f}s")


# ------------------------------------------------------------ criterion 9


def test_criterion_9_odd_cycle_control():
    start = time.perf_counter()
    raised = []
    for _ in range(3):
        g = cycle_graph(3)
        try:
            eliminate_color(g, vizing_plus_one(g), None, EliminationConfig.for_epsilon(0.5, check=True))
        except OddCycleError:
            raised.append(True)
        with pytest.raises(OddCycleError):
            koenig_color(g, None, 0.5)
    elapsed = time.perf_counter() - start
    report(9, len(raised) == 3 and elapsed < 1, f"K3 raised {len(raised)}/3, {elapsed:.3f}s")
