"""Approximate Kőnig edge coloring by alternating-chain elimination.

A graph without odd cycles is first colored properly with ``max_degree + 1``
colors (Misra–Gries).  The highest color, the distinguished color ``a``, is
then removed edge by edge: each ``a``-edge ``e = (v, w)`` owns the chain
``e`` followed by the maximal beta/gamma alternating path from ``v``, and
flipping a chain recolors ``e`` without creating new ``a``-edges.  Chains are
flipped in batches seeded on sparse edge classes, so that the chains of one
batch never share a vertex.  An ``a``-edge survives only if its chain is
heavy, and heavy chains can only be carried by a small ``a``-class.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import CorrReport, Graph, PartialEdgeColoring, corr_of_coloring, sparse_edge_classes
from .measures import (
    EdgeMeasure,
    VertexMeasure,
    edge_measure_from,
    make_quasi_invariant,
)


class OddCycleError(RuntimeError):
    """A chain closed up at the far endpoint of its seed, exposing an odd cycle."""


class _Index:
    """Mutable coloring with per-vertex ``color -> edge`` lookups."""

    def __init__(self, g: Graph, c: PartialEdgeColoring):
        self.g = g
        self.k = c.palette_size
        self.colors = list(c.colors)
        self.at: list[dict[int, int]] = [dict() for _ in range(g.n_vertices)]
        for e, col in enumerate(self.colors):
            if col is None:
                continue
            for x in g.edges[e]:
                if col in self.at[x]:
                    raise ValueError(f"coloring is not proper at vertex {x}")
                self.at[x][col] = e

    def set(self, e: int, col: Optional[int]) -> None:
        old = self.colors[e]
        u, v = self.g.edges[e]
        if old is not None:
            del self.at[u][old]
            del self.at[v][old]
        self.colors[e] = col
        if col is not None:
            self.at[u][col] = e
            self.at[v][col] = e

    def missing(self, v: int) -> list[int]:
        at = self.at[v]
        return [col for col in range(self.k) if col not in at]

    def lowest_missing(self, v: int, exclude: int = -1) -> int:
        at = self.at[v]
        for col in range(self.k):
            if col != exclude and col not in at:
                return col
        raise ValueError(f"no free color at vertex {v}")

    def freeze(self) -> PartialEdgeColoring:
        return PartialEdgeColoring(list(self.colors), self.k)


def vizing_plus_one(g: Graph) -> PartialEdgeColoring:
    """Total proper coloring with ``max_degree + 1`` colors (Misra–Gries fans).

    Edges are colored in id order.  When the endpoints share a free color the
    lowest one is used directly, which keeps the top color rare.
    """
    if g.has_parallel_edges():
        raise ValueError("Misra–Gries needs a simple graph")
    k = g.max_degree + 1
    idx = _Index(g, PartialEdgeColoring.empty(g.n_edges, k))
    at = idx.at
    for e in range(g.n_edges):
        u, v = g.edges[e]
        common = next((col for col in range(k) if col not in at[u] and col not in at[v]), None)
        if common is not None:
            idx.set(e, common)
            continue

        # maximal fan at u starting with the uncolored edge e
        fan, fan_edges = [v], [e]
        in_fan = {v}
        while True:
            last = fan[-1]
            nxt = None
            for col in range(k):
                if col in at[last]:
                    continue
                h = at[u].get(col)
                if h is not None:
                    x = g.other_end(h, u)
                    if x not in in_fan:
                        nxt = (x, h)
                        break
            if nxt is None:
                break
            fan.append(nxt[0])
            fan_edges.append(nxt[1])
            in_fan.add(nxt[0])

        c_free = idx.lowest_missing(u)
        d_free = idx.lowest_missing(fan[-1])
        if c_free != d_free:
            # invert the c/d path leaving u on its d-edge
            path, x, want = [], u, d_free
            while True:
                h = at[x].get(want)
                if h is None:
                    break
                path.append(h)
                x = g.other_end(h, x)
                want = c_free if want == d_free else d_free
            new = [c_free if idx.colors[h] == d_free else d_free for h in path]
            for h in path:
                idx.set(h, None)
            for h, col in zip(path, new):
                idx.set(h, col)

        w = None
        for i, x in enumerate(fan):
            if i > 0 and idx.colors[fan_edges[i]] in at[fan[i - 1]]:
                break
            if d_free not in at[x]:
                w = i
                break
        if w is None:
            raise AssertionError(f"no rotatable fan prefix for edge {e}")
        for j in range(w):
            col = idx.colors[fan_edges[j + 1]]
            idx.set(fan_edges[j + 1], None)
            idx.set(fan_edges[j], col)
        idx.set(fan_edges[w], d_free)
    return idx.freeze()


def missing_colors(g: Graph, c: PartialEdgeColoring, v: int) -> set[int]:
    used = {c.colors[d >> 1] for d in g.adjacency[v]}
    return set(range(c.palette_size)) - used


@dataclass(frozen=True)
class Chain:
    seed: int
    anchor: int
    beta: int
    gamma: int
    edges: tuple[int, ...]
    weight: float
    truncated: bool = False

    @property
    def hops(self) -> int:
        return len(self.edges)

    def vertices(self, g: Graph) -> list[int]:
        """Vertex sequence: far endpoint, anchor, then along the alternating path."""
        far = g.other_end(self.seed, self.anchor)
        out = [far, self.anchor]
        x = self.anchor
        for h in self.edges[1:]:
            x = g.other_end(h, x)
            out.append(x)
        return out


def _chain(
    idx: _Index,
    e: int,
    eta: Optional[EdgeMeasure],
    stop_weight: float,
    max_hops: Optional[int],
) -> Chain:
    g = idx.g
    a = idx.k - 1
    if idx.colors[e] != a:
        raise ValueError(f"edge {e} is not colored with the distinguished color")
    # lexicographically least (anchor, gamma, beta)
    v, w = sorted(g.edges[e])
    gamma = idx.lowest_missing(v, exclude=a)
    beta = idx.lowest_missing(w, exclude=a)

    base = eta.weights[e] if eta is not None else None
    edges = [e]
    weight = 1.0
    x, want = v, beta
    at = idx.at
    truncated = False
    while True:
        h = at[x].get(want)
        if h is None:
            break
        if weight >= stop_weight or (max_hops is not None and len(edges) >= max_hops):
            truncated = True
            break
        y = g.other_end(h, x)
        if y == w:
            raise OddCycleError(
                f"chain of edge {e} returns to its far endpoint {w}; the graph has an odd cycle"
            )
        edges.append(h)
        weight += 1.0 if base is None else eta.weights[h] / base
        x = y
        want = gamma if want == beta else beta
    return Chain(e, v, beta, gamma, tuple(edges), weight, truncated)


def build_chain(
    g: Graph,
    c: PartialEdgeColoring,
    e: int,
    eta: Optional[EdgeMeasure] = None,
    stop_weight: float = math.inf,
    max_hops: Optional[int] = None,
) -> Chain:
    """Chain of the ``a``-edge ``e``, cut once its weight reaches ``stop_weight``.

    ``eta=None`` weights every edge 1, so the weight is the hop count.
    """
    return _chain(_Index(g, c), e, eta, stop_weight, max_hops)


def _flip(idx: _Index, chain: Chain) -> None:
    """Recolor along one complete chain: seed gets beta, the path swaps beta/gamma."""
    path = chain.edges[1:]
    new = []
    for i, h in enumerate(path):
        if i + 1 < len(path):
            new.append(idx.colors[path[i + 1]])
        else:
            other = chain.gamma if idx.colors[h] == chain.beta else chain.beta
            new.append(other)
    for h in chain.edges:
        idx.set(h, None)
    idx.set(chain.seed, chain.beta)
    for h, col in zip(path, new):
        idx.set(h, col)


def _check_disjoint(g: Graph, chains: Iterable[Chain]) -> None:
    owner: dict[int, int] = {}
    for ch in chains:
        for x in ch.vertices(g):
            if owner.setdefault(x, ch.seed) != ch.seed:
                raise ValueError(
                    f"chains of seeds {owner[x]} and {ch.seed} share vertex {x}"
                )


def augment_disjoint(g: Graph, c: PartialEdgeColoring, seeds: Iterable[int]) -> PartialEdgeColoring:
    """Flip the chains of all ``seeds`` at once; the chains must be vertex-disjoint."""
    idx = _Index(g, c)
    a = c.distinguished
    seeds = sorted(set(seeds))
    for e in seeds:
        if idx.colors[e] != a:
            raise ValueError(f"seed {e} is not colored with the distinguished color")
    chains = [_chain(idx, e, None, math.inf, None) for e in seeds]
    _check_disjoint(g, chains)
    for ch in chains:
        _flip(idx, ch)
    return idx.freeze()


@dataclass
class EliminationConfig:
    """Parameters of the elimination loop.

    ``L`` sets the survival threshold ``2 * max_degree * L`` on chain weight,
    which caps the ``a``-class at eta-mass ``1 / L``.
    """

    epsilon: float
    L: int
    weighted: bool = False
    max_hops: Optional[int] = None
    seed_separation: Optional[int] = None
    rng_seed: int = 0
    check: bool = False

    def __post_init__(self):
        if not 1.0 / self.L < self.epsilon:
            raise ValueError(f"need 1/L < epsilon, got L={self.L}, epsilon={self.epsilon}")

    @classmethod
    def for_epsilon(cls, epsilon: float, **kw) -> "EliminationConfig":
        return cls(epsilon=epsilon, L=math.floor(1.0 / epsilon) + 1, **kw)

    def threshold(self, delta: int) -> int:
        return 2 * delta * self.L

    def hop_cap(self, delta: int) -> Optional[int]:
        if not self.weighted:
            return None
        return self.max_hops if self.max_hops is not None else 8 * delta * self.L

    def separation(self, delta: int) -> int:
        if self.weighted:
            need = 2 * self.hop_cap(delta) + 2
        else:
            need = 4 * delta * self.L
        if self.seed_separation is not None:
            if self.seed_separation < need:
                raise ValueError(f"seed separation {self.seed_separation} < required {need}")
            return self.seed_separation
        return need


@dataclass
class EliminationTrace:
    a_counts: list[int] = field(default_factory=list)
    sweeps: int = 0
    augmentations: int = 0


def eliminate_color(
    g: Graph,
    c: PartialEdgeColoring,
    eta: Optional[EdgeMeasure],
    cfg: EliminationConfig,
    trace: Optional[EliminationTrace] = None,
) -> PartialEdgeColoring:
    """Shrink the distinguished class until every surviving chain is heavy.

    Sparse classes of the initial ``a``-edges are swept cyclically; at each
    class every live seed with a short, complete chain is flipped.  The loop
    stops after a full sweep without flips, at which point every remaining
    ``a``-edge has chain weight >= ``2 * max_degree * L``.
    """
    delta = g.max_degree
    if c.palette_size != delta + 1:
        raise ValueError(f"expected a palette of {delta + 1} colors, got {c.palette_size}")
    idx = _Index(g, c)
    a = c.distinguished
    weighted_eta = eta if cfg.weighted else None
    threshold = cfg.threshold(delta)
    cap = cfg.hop_cap(delta)
    seeds = [e for e, col in enumerate(idx.colors) if col == a]
    trace = trace if trace is not None else EliminationTrace()
    trace.a_counts.append(len(seeds))
    if not seeds:
        return idx.freeze()
    classes = sparse_edge_classes(g, cfg.separation(delta), edges=seeds)
    live = len(seeds)

    while True:
        flips = 0
        for cls in classes:
            batch, overflow = [], []
            for e in cls:
                if idx.colors[e] != a:
                    continue
                ch = _chain(idx, e, weighted_eta, threshold, cap)
                if ch.weight >= threshold:
                    continue
                if ch.truncated:
                    overflow.append(e)
                else:
                    batch.append(ch)
            if cfg.check:
                _check_disjoint(g, batch)
            for ch in batch:
                _flip(idx, ch)
            # chains cut by the hop cap but still light are flipped one at a time
            for e in overflow:
                ch = _chain(idx, e, weighted_eta, threshold, None)
                if ch.weight < threshold:
                    _flip(idx, ch)
                    batch.append(ch)
            flips += len(batch)
            if cfg.check and batch and not idx.freeze().is_proper(g):
                raise AssertionError("flip broke properness")
        live -= flips
        trace.sweeps += 1
        trace.augmentations += flips
        trace.a_counts.append(live)
        if flips == 0:
            break
    return idx.freeze()


def finalize_delta_coloring(g: Graph, d: PartialEdgeColoring) -> PartialEdgeColoring:
    """Drop the distinguished color: palette shrinks by one, ``a``-edges become uncolored."""
    a = d.distinguished
    return PartialEdgeColoring(
        [None if col == a else col for col in d.colors], d.palette_size - 1
    )


def extract_matching(g: Graph, c: PartialEdgeColoring, beta: int) -> frozenset[int]:
    return frozenset(e for e, col in enumerate(c.colors) if col == beta)


def unmatched_mass(g: Graph, matching: Iterable[int], mu: Optional[VertexMeasure] = None):
    covered = set()
    for e in matching:
        covered.update(g.edges[e])
    free = [v for v in range(g.n_vertices) if v not in covered]
    return mu.mass(free) if mu is not None else len(free) / g.n_vertices


def chain_load(g: Graph, c: PartialEdgeColoring) -> list[int]:
    """For every edge, how many complete ``a``-chains pass through it."""
    idx = _Index(g, c)
    a = c.distinguished
    load = [0] * g.n_edges
    for e, col in enumerate(idx.colors):
        if col == a:
            for h in _chain(idx, e, None, math.inf, None).edges:
                load[h] += 1
    return load


@dataclass
class KoenigResult:
    coloring: PartialEdgeColoring
    plus_one: PartialEdgeColoring
    eliminated: PartialEdgeColoring
    eta: EdgeMeasure
    config: EliminationConfig
    trace: EliminationTrace
    report: CorrReport
    runtime: float

    @property
    def a_mass(self):
        a = self.eliminated.distinguished
        return self.eta.mass(e for e, col in enumerate(self.eliminated.colors) if col == a)

    def as_dict(self) -> dict:
        return {
            "palette": self.coloring.palette_size,
            "L": self.config.L,
            "weighted": self.config.weighted,
            "a_counts": list(self.trace.a_counts),
            "sweeps": self.trace.sweeps,
            "augmentations": self.trace.augmentations,
            "a_mass": self.a_mass,
            "corr_mass": self.report.corr_mass,
            "runtime": self.runtime,
            "colors": self.coloring.colors,
        }


def koenig_color(
    g: Graph,
    mu: Optional[VertexMeasure],
    epsilon: float,
    weighted: Optional[bool] = None,
    check: bool = False,
) -> KoenigResult:
    """Max-degree coloring of an odd-cycle-free graph, correct outside mu-mass epsilon.

    The elimination runs at ``epsilon / (4 * max_degree)``: surviving ``a``-edges
    touch vertices of nu-mass at most ``max_degree * eta(a-class)`` and mu is at
    most twice the smoothed nu.  Weighted chains are used whenever the derived
    edge measure is not uniform.
    """
    start = time.perf_counter()
    mu = mu if mu is not None else VertexMeasure.uniform(g.n_vertices)
    delta = max(g.max_degree, 1)
    eta = edge_measure_from(g, make_quasi_invariant(mu)) if g.n_edges else None
    if weighted is None:
        weighted = eta is not None and not eta.is_uniform()
    cfg = EliminationConfig.for_epsilon(epsilon / (4 * delta), weighted=weighted, check=check)
    plus_one = vizing_plus_one(g)
    trace = EliminationTrace()
    if g.n_edges:
        eliminated = eliminate_color(g, plus_one, eta, cfg, trace)
    else:
        eliminated = plus_one
    final = finalize_delta_coloring(g, eliminated)
    report = corr_of_coloring(g, final, mu)
    return KoenigResult(
        final,
        plus_one,
        eliminated,
        eta if eta is not None else EdgeMeasure((1.0,)),
        cfg,
        trace,
        report,
        time.perf_counter() - start,
    )
