"""Dart-based bounded-degree graphs, partial structures on them, and Corr sets.

Vertices and edges are dense integer ids starting at 0.  Edge ``e`` joining
``u`` and ``v`` (stored as ``(u, v)``) owns the two darts ``2e`` (``u -> v``)
and ``2e + 1`` (``v -> u``).  Every tie in the package is broken towards the
lowest id.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Sequence

if TYPE_CHECKING:
    from .measures import VertexMeasure

INF = math.inf


class Graph:
    """Immutable undirected multigraph without self-loops."""

    __slots__ = ("n_vertices", "edges", "adjacency", "nbrs", "max_degree", "meta")

    def __init__(
        self,
        n_vertices: int,
        edges: Iterable[Sequence[int]],
        meta: Optional[Mapping] = None,
    ):
        if n_vertices < 0:
            raise ValueError("vertex count must be nonnegative")
        edge_list = []
        adjacency: list[list[int]] = [[] for _ in range(n_vertices)]
        for e, (u, v) in enumerate(edges):
            u, v = int(u), int(v)
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge {e} = ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise ValueError(f"edge {e} is a self-loop at {u}")
            edge_list.append((u, v))
            adjacency[u].append(2 * e)
            adjacency[v].append(2 * e + 1)
        self.n_vertices = n_vertices
        self.edges: tuple[tuple[int, int], ...] = tuple(edge_list)
        self.adjacency: tuple[tuple[int, ...], ...] = tuple(tuple(a) for a in adjacency)
        self.nbrs: tuple[tuple[int, ...], ...] = tuple(
            tuple(edge_list[d >> 1][1 - (d & 1)] for d in a) for a in adjacency
        )
        self.max_degree = max((len(a) for a in adjacency), default=0)
        self.meta = dict(meta) if meta else {}

    def __setattr__(self, name, value):
        if hasattr(self, "max_degree") and name != "meta":
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    def __repr__(self):
        return f"Graph(n={self.n_vertices}, m={self.n_edges}, max_degree={self.max_degree})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_vertices == other.n_vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.n_vertices, self.edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def darts(self) -> list[tuple[int, int, int]]:
        """All darts as ``(source, target, edge id)``, indexed by dart id."""
        out = []
        for e, (u, v) in enumerate(self.edges):
            out.append((u, v, e))
            out.append((v, u, e))
        return out

    @staticmethod
    def dart_edge(dart: int) -> int:
        return dart >> 1

    @staticmethod
    def reverse_dart(dart: int) -> int:
        return dart ^ 1

    def dart_source(self, dart: int) -> int:
        return self.edges[dart >> 1][dart & 1]

    def dart_target(self, dart: int) -> int:
        return self.edges[dart >> 1][1 - (dart & 1)]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def incident_edges(self, v: int) -> list[int]:
        return [d >> 1 for d in self.adjacency[v]]

    def neighbors(self, v: int) -> list[int]:
        """N_0(v), with multiplicity for parallel edges."""
        return list(self.nbrs[v])

    def other_end(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        if v == a:
            return b
        if v == b:
            return a
        raise ValueError(f"vertex {v} is not an endpoint of edge {e}")

    def has_parallel_edges(self) -> bool:
        seen = set()
        for u, v in self.edges:
            key = (u, v) if u < v else (v, u)
            if key in seen:
                return True
            seen.add(key)
        return False

    def is_regular(self) -> bool:
        return all(len(a) == self.max_degree for a in self.adjacency)

    def components(self) -> list[int]:
        """Component label per vertex (labels are the lowest vertex id in the component)."""
        label = [-1] * self.n_vertices
        for s in range(self.n_vertices):
            if label[s] >= 0:
                continue
            label[s] = s
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in self.nbrs[x]:
                    if label[y] < 0:
                        label[y] = s
                        queue.append(y)
        return label

    def vertex_distances(self, sources: Iterable[int], limit: float = INF) -> dict[int, int]:
        """Breadth-first distances from a source set, truncated at ``limit``."""
        dist = dict.fromkeys(sources, 0)
        frontier = list(dist)
        nbrs = self.nbrs
        level = 0
        while frontier and level < limit:
            level += 1
            nxt = []
            for x in frontier:
                for y in nbrs[x]:
                    if y not in dist:
                        dist[y] = level
                        nxt.append(y)
            frontier = nxt
        return dist

    def bipartition(self) -> Optional[list[int]]:
        """A proper 2-coloring of the vertices, or ``None`` if an odd cycle exists."""
        side = [-1] * self.n_vertices
        for s in range(self.n_vertices):
            if side[s] >= 0:
                continue
            side[s] = 0
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in self.nbrs[x]:
                    if side[y] < 0:
                        side[y] = 1 - side[x]
                        queue.append(y)
                    elif side[y] == side[x]:
                        return None
        return side

    def is_bipartite(self) -> bool:
        return self.bipartition() is not None

    def subgraph(self, edge_ids: Iterable[int]) -> tuple["Graph", list[int]]:
        """Spanning subgraph on the given edges; returns it with the new-to-old edge map."""
        keep = sorted(set(edge_ids))
        return Graph(self.n_vertices, [self.edges[e] for e in keep]), keep

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n_vertices} {self.n_edges} {self.max_degree}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 3:
            raise ValueError("missing 'n m max_degree' header")
        n, m, delta = (int(x) for x in rows[0])
        if len(rows) - 1 != m:
            raise ValueError(f"header announces {m} edges, found {len(rows) - 1}")
        g = cls(n, [(int(r[0]), int(r[1])) for r in rows[1:]])
        if g.max_degree != delta:
            raise ValueError(f"header max degree {delta} != actual {g.max_degree}")
        return g

    def to_json(self, weights: Optional[Sequence[float]] = None) -> str:
        doc = {
            "n": self.n_vertices,
            "m": self.n_edges,
            "max_degree": self.max_degree,
            "edges": [list(e) for e in self.edges],
        }
        if weights is not None:
            doc["weights"] = [float(w) for w in weights]
        if self.meta:
            doc["meta"] = self.meta
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> tuple["Graph", Optional[list[float]]]:
        doc = json.loads(text)
        g = cls(doc["n"], doc["edges"], meta=doc.get("meta"))
        if g.max_degree != doc.get("max_degree", g.max_degree):
            raise ValueError("max_degree field disagrees with the edge list")
        return g, doc.get("weights")


def load_graph(path) -> tuple[Graph, Optional[list[float]]]:
    """Read either serialization; the text format carries no weights."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return Graph.from_json(text)
    return Graph.from_text(text), None


def save_graph(g: Graph, path, weights: Optional[Sequence[float]] = None) -> None:
    text = g.to_json(weights) if str(path).endswith(".json") else g.to_text()
    with open(path, "w") as fh:
        fh.write(text)


@dataclass
class Orientation:
    """Bit per edge: 0 selects dart ``u -> v`` of the stored pair ``(u, v)``, 1 the reverse."""

    direction: list[int]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.direction):
            raise ValueError("direction bits must be 0 or 1")

    @classmethod
    def from_arcs(cls, g: Graph, arcs: Mapping[int, tuple[int, int]]) -> "Orientation":
        """Build from ``edge id -> (tail, head)``; every edge must be present."""
        bits = []
        for e, (u, v) in enumerate(g.edges):
            if e not in arcs:
                raise ValueError(f"edge {e} has no direction")
            tail, head = arcs[e]
            if (tail, head) == (u, v):
                bits.append(0)
            elif (tail, head) == (v, u):
                bits.append(1)
            else:
                raise ValueError(f"arc {arcs[e]} does not match edge {e} = {(u, v)}")
        return cls(bits)

    def out_dart(self, e: int) -> int:
        return 2 * e + self.direction[e]

    def tail(self, g: Graph, e: int) -> int:
        return g.edges[e][self.direction[e]]

    def head(self, g: Graph, e: int) -> int:
        return g.edges[e][1 - self.direction[e]]

    def out_edges(self, g: Graph, v: int) -> list[int]:
        return [d >> 1 for d in g.adjacency[v] if self.direction[d >> 1] == (d & 1)]

    def in_edges(self, g: Graph, v: int) -> list[int]:
        return [d >> 1 for d in g.adjacency[v] if self.direction[d >> 1] != (d & 1)]


@dataclass
class PartialEdgeColoring:
    """Colors in ``0..palette_size-1`` on a subset of edges; ``None`` marks uncolored."""

    colors: list[Optional[int]]
    palette_size: int

    @property
    def distinguished(self) -> int:
        return self.palette_size - 1

    @classmethod
    def empty(cls, n_edges: int, palette_size: int) -> "PartialEdgeColoring":
        return cls([None] * n_edges, palette_size)

    def copy(self) -> "PartialEdgeColoring":
        return PartialEdgeColoring(list(self.colors), self.palette_size)

    def domain(self) -> set[int]:
        return {e for e, c in enumerate(self.colors) if c is not None}

    def color_class(self, color: int) -> set[int]:
        return {e for e, c in enumerate(self.colors) if c == color}

    def is_proper(self, g: Graph) -> bool:
        for v in range(g.n_vertices):
            seen = set()
            for d in g.adjacency[v]:
                c = self.colors[d >> 1]
                if c is None:
                    continue
                if c in seen:
                    return False
                seen.add(c)
        return True


@dataclass(frozen=True)
class CorrReport:
    corr_vertices: frozenset
    corr_mass: float
    deep_corr_mass: float

    def as_dict(self) -> dict:
        return {
            "corr_count": len(self.corr_vertices),
            "corr_mass": self.corr_mass,
            "deep_corr_mass": self.deep_corr_mass,
        }


def _mass(mu: Optional["VertexMeasure"], g: Graph, vertices) -> float:
    if mu is None:
        return len(vertices) / g.n_vertices if g.n_vertices else 0.0
    return mu.mass(vertices)


def _report(g: Graph, corr: set[int], mu) -> CorrReport:
    deep = {v for v in corr if all(y in corr for y in g.nbrs[v])}
    return CorrReport(frozenset(corr), _mass(mu, g, corr), _mass(mu, g, deep))


def corr_of_orientation(g: Graph, s: Orientation, mu: Optional["VertexMeasure"] = None) -> CorrReport:
    """Vertices with in-degree equal to out-degree under ``s``."""
    if len(s.direction) != g.n_edges:
        raise ValueError("orientation does not cover every edge")
    corr = set()
    for v in range(g.n_vertices):
        balance = 0
        for d in g.adjacency[v]:
            balance += 1 if s.direction[d >> 1] == (d & 1) else -1
        if balance == 0:
            corr.add(v)
    return _report(g, corr, mu)


def corr_of_coloring(
    g: Graph, c: PartialEdgeColoring, mu: Optional["VertexMeasure"] = None
) -> CorrReport:
    """Vertices whose incident edges are all colored, with pairwise distinct colors."""
    corr = set()
    for v in range(g.n_vertices):
        seen = set()
        for d in g.adjacency[v]:
            col = c.colors[d >> 1]
            if col is None or col in seen:
                break
            seen.add(col)
        else:
            corr.add(v)
    return _report(g, corr, mu)


def corr_of_decoration(
    g: Graph,
    s: Orientation,
    c: PartialEdgeColoring,
    mu: Optional["VertexMeasure"] = None,
) -> CorrReport:
    """Balanced vertices whose in-edges and out-edges are each colored injectively."""
    if g.max_degree % 2:
        raise ValueError(f"decorations need even degree, max degree is {g.max_degree}")
    if g.is_regular() and c.palette_size != g.max_degree // 2:
        raise ValueError(
            f"palette size {c.palette_size} != half the degree {g.max_degree // 2}"
        )
    balanced = corr_of_orientation(g, s).corr_vertices
    corr = set()
    for v in balanced:
        ok = True
        seen_out, seen_in = set(), set()
        for d in g.adjacency[v]:
            e = d >> 1
            col = c.colors[e]
            seen = seen_out if s.direction[e] == (d & 1) else seen_in
            if col is None or col in seen:
                ok = False
                break
            seen.add(col)
        if ok:
            corr.add(v)
    return _report(g, corr, mu)


def edge_distance(g: Graph, e: int, f: int) -> float:
    """Line-graph distance: 0 for e == f, 1 for edges sharing a vertex, INF across components."""
    if e == f:
        return 0
    target = set(g.edges[f])
    dist = g.vertex_distances(g.edges[e])
    best = min((dist[x] for x in target if x in dist), default=None)
    return INF if best is None else best + 1


def sparse_edge_classes(
    g: Graph, k: int, edges: Optional[Iterable[int]] = None
) -> list[list[int]]:
    """Greedy partition of ``edges`` (default: all) into classes with pairwise distance >= k.

    Edges are scanned in ascending id and placed in the lowest class holding no
    edge within distance ``k - 1``.
    """
    if k < 1:
        raise ValueError("separation must be at least 1")
    pool = sorted(set(range(g.n_edges) if edges is None else edges))
    if k == 1 or not pool:
        return [pool] if pool else []

    label = g.components()
    # Eccentricity of one vertex bounds the line-graph diameter of its component
    # by 2 * ecc + 1; past that every pair in the component conflicts.
    saturated: dict[int, bool] = {}
    for e in pool:
        comp = label[g.edges[e][0]]
        if comp not in saturated:
            ecc = max(g.vertex_distances([comp]).values())
            saturated[comp] = 2 * ecc + 1 < k

    # region[c]: vertex -> distance (<= k - 2) to the endpoints of class c;
    # edge f conflicts with class c iff an endpoint of f lies in region[c].
    region: list[dict[int, int]] = []
    rank_in_comp: dict[int, int] = {}
    classes: list[list[int]] = []
    nbrs = g.nbrs
    for e in pool:
        u, v = g.edges[e]
        comp = label[u]
        if saturated[comp]:
            cls = rank_in_comp.get(comp, 0)
            rank_in_comp[comp] = cls + 1
            while len(classes) <= cls:
                classes.append([])
                region.append({})
            classes[cls].append(e)
            continue
        cls = 0
        while cls < len(region) and (u in region[cls] or v in region[cls]):
            cls += 1
        if cls == len(region):
            region.append({})
            classes.append([])
        classes[cls].append(e)
        dist = region[cls]
        frontier = [x for x in (u, v) if dist.get(x, k) > 0]
        for x in frontier:
            dist[x] = 0
        level = 0
        while frontier and level < k - 2:
            level += 1
            nxt = []
            for x in frontier:
                for y in nbrs[x]:
                    if dist.get(y, k) > level:
                        dist[y] = level
                        nxt.append(y)
            frontier = nxt
    return [c for c in classes if c]
