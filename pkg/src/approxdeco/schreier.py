"""Approximate Schreier decorations of 2Δ-regular graphs.

An almost balanced orientation is lifted to a bipartite double cover (out-copy
and in-copy of every balanced vertex), the cover is edge colored with Δ
colors by the Kőnig pipeline, and the colors are pulled back as labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import (
    CorrReport,
    Graph,
    Orientation,
    PartialEdgeColoring,
    corr_of_coloring,
    corr_of_decoration,
    corr_of_orientation,
)
from .koenig import KoenigResult, koenig_color
from .measures import VertexMeasure
from .orient import approximate_balanced_orientation


@dataclass
class DoubleCover:
    base_corr: list[int]
    cover_graph: Graph
    edge_map: list[int]
    nu: VertexMeasure
    corr_mass: float

    def copy_of(self, v: int, side: int) -> int:
        """Cover vertex of ``v`` in copy 0 (tails) or copy 1 (heads)."""
        return self._slot[v] + side * len(self.base_corr)

    def base_of(self, x: int) -> tuple[int, int]:
        k = len(self.base_corr)
        return self.base_corr[x % k], x // k

    def __post_init__(self):
        self._slot = {v: i for i, v in enumerate(self.base_corr)}


def build_double_cover(g: Graph, s: Orientation, mu: Optional[VertexMeasure] = None) -> DoubleCover:
    """Bipartite cover on two copies of Corr(S); ``(v, w)`` in S gives cover edge ``v^0 w^1``."""
    if g.max_degree % 2:
        raise ValueError(f"max degree {g.max_degree} is odd")
    mu = mu if mu is not None else VertexMeasure.uniform(g.n_vertices)
    corr = sorted(corr_of_orientation(g, s).corr_vertices)
    corr_mass = mu.mass(corr)
    if corr_mass == 0:
        raise ValueError("Corr(S) has measure zero")
    slot = {v: i for i, v in enumerate(corr)}
    k = len(corr)
    cover_edges, edge_map = [], []
    for e in range(g.n_edges):
        tail, head = s.tail(g, e), s.head(g, e)
        if tail in slot and head in slot:
            cover_edges.append((slot[tail], k + slot[head]))
            edge_map.append(e)
    weights = [mu[v] / (2 * corr_mass) for v in corr] * 2
    nu = VertexMeasure.from_weights(weights)
    return DoubleCover(corr, Graph(2 * k, cover_edges), edge_map, nu, corr_mass)


@dataclass
class BudgetReport:
    """Masses of the three failure sets and whether each stage met its budget."""

    outside_x: float
    outside_y0: float
    outside_y1: float
    orientation_deep_mass: float
    orientation_corr_mass: float
    cover_corr_mass: float
    orientation_met: bool
    cover_met: bool

    @property
    def total(self) -> float:
        return self.outside_x + self.outside_y0 + self.outside_y1

    def predicted_total(self) -> float:
        """The same sum recomputed from the two stage reports alone."""
        return (
            (1 - self.orientation_deep_mass)
            + 2 * (1 - self.orientation_corr_mass)
            + 2 * self.orientation_corr_mass * (1 - self.cover_corr_mass)
        )

    def as_dict(self) -> dict:
        return {
            "outside_x": self.outside_x,
            "outside_y0": self.outside_y0,
            "outside_y1": self.outside_y1,
            "total": self.total,
            "orientation_met": self.orientation_met,
            "cover_met": self.cover_met,
        }


@dataclass
class Decoration:
    orientation: Orientation
    labels: PartialEdgeColoring
    report: CorrReport
    budget: Optional[BudgetReport] = None
    cover: Optional[DoubleCover] = None
    cover_result: Optional[KoenigResult] = None

    @property
    def budget_met(self) -> bool:
        return self.budget is None or (self.budget.orientation_met and self.budget.cover_met)


def pull_back(g: Graph, cover: DoubleCover, cover_coloring: PartialEdgeColoring) -> PartialEdgeColoring:
    labels = PartialEdgeColoring.empty(g.n_edges, cover_coloring.palette_size)
    for ce, e in enumerate(cover.edge_map):
        if labels.colors[e] is not None:
            raise AssertionError(f"base edge {e} labelled twice")
        labels.colors[e] = cover_coloring.colors[ce]
    return labels


def decorate(g: Graph, mu: Optional[VertexMeasure], epsilon: float) -> Decoration:
    """Orientation plus Δ labels, correct outside mu-mass epsilon when both stages meet budget.

    The orientation gets ``epsilon / 2`` for its deep Corr set; the cover
    coloring gets ``epsilon / (4 mu(Corr S))`` under the cover measure.
    """
    if not g.is_regular() or g.max_degree % 2:
        raise ValueError(f"need a regular graph of even degree, max degree {g.max_degree}")
    mu = mu if mu is not None else VertexMeasure.uniform(g.n_vertices)
    half = g.max_degree // 2

    s, orient_rep = approximate_balanced_orientation(g, mu, epsilon / 2)
    cover = build_double_cover(g, s, mu)
    cover_eps = epsilon / (4 * cover.corr_mass)
    kres = koenig_color(cover.cover_graph, cover.nu, cover_eps)
    cover_coloring = kres.coloring
    if cover_coloring.palette_size != half:
        # a cover with no vertex of full degree still labels from the base palette
        cover_coloring = PartialEdgeColoring(cover_coloring.colors, half)
    labels = pull_back(g, cover, cover_coloring)
    report = corr_of_decoration(g, s, labels, mu)

    cover_corr = corr_of_coloring(cover.cover_graph, cover_coloring, cover.nu)
    y = [set(), set()]
    for x in cover_corr.corr_vertices:
        v, side = cover.base_of(x)
        y[side].add(v)
    everything = range(g.n_vertices)
    budget = BudgetReport(
        outside_x=1 - orient_rep.deep_corr_mass,
        outside_y0=mu.mass(v for v in everything if v not in y[0]),
        outside_y1=mu.mass(v for v in everything if v not in y[1]),
        orientation_deep_mass=orient_rep.deep_corr_mass,
        orientation_corr_mass=cover.corr_mass,
        cover_corr_mass=cover_corr.corr_mass,
        orientation_met=orient_rep.deep_corr_mass > 1 - epsilon / 2,
        cover_met=cover_corr.corr_mass > 1 - cover_eps,
    )
    return Decoration(s, labels, report, budget, cover, kres)


@dataclass
class LabelAction:
    label: int
    defined: frozenset
    injective: frozenset
    is_permutation: bool


@dataclass
class FreeActionReport:
    actions: list[LabelAction]
    corr_vertices: frozenset

    def injective_on_corr(self) -> bool:
        """Every label map is defined and injective at every Corr(S, c) vertex."""
        return all(self.corr_vertices <= a.injective for a in self.actions)

    def all_permutations(self) -> bool:
        return all(a.is_permutation for a in self.actions)

    def as_dict(self) -> dict:
        return {
            "labels": [
                {
                    "label": a.label,
                    "defined": len(a.defined),
                    "injective": len(a.injective),
                    "permutation": a.is_permutation,
                }
                for a in self.actions
            ],
            "injective_on_corr": self.injective_on_corr(),
            "all_permutations": self.all_permutations(),
        }


def verify_free_action(g: Graph, d: Decoration) -> FreeActionReport:
    """Per label, follow the unique out-edge carrying it and check bijectivity.

    A vertex is in ``injective`` when its label map is defined there and no
    other vertex maps to the same image.
    """
    s, labels = d.orientation, d.labels
    out: list[LabelAction] = []
    for alpha in range(labels.palette_size):
        image: dict[int, int] = {}
        for v in range(g.n_vertices):
            heads = [s.head(g, e) for e in s.out_edges(g, v) if labels.colors[e] == alpha]
            if len(heads) == 1:
                image[v] = heads[0]
        hits: dict[int, int] = {}
        for w in image.values():
            hits[w] = hits.get(w, 0) + 1
        inj = frozenset(v for v, w in image.items() if hits[w] == 1)
        perm = len(image) == g.n_vertices and len(inj) == g.n_vertices
        out.append(LabelAction(alpha, frozenset(image), inj, perm))
    return FreeActionReport(out, d.report.corr_vertices)
