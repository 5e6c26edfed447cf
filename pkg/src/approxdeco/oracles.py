"""Brute-force references for tests and acceptance runs.

Nothing here calls into the approximate pipelines.  Every witness is
re-checked with the graph-core recounts before it is returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Optional

from .graph import (
    Graph,
    Orientation,
    PartialEdgeColoring,
    corr_of_coloring,
    corr_of_decoration,
    corr_of_orientation,
)

DEFAULT_EDGE_CAP = 40


class OracleCapExceeded(ValueError):
    pass


@dataclass
class OracleResult:
    value: Any
    witness: Any = None
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------- coloring


def _colorable(g: Graph, k: int, stats: dict) -> Optional[list[int]]:
    """Backtracking k-edge-coloring; most constrained edge first, ties by endpoint degree."""
    m = g.n_edges
    colors: list[Optional[int]] = [None] * m
    used_at = [set() for _ in range(g.n_vertices)]
    weight = [g.degree(u) + g.degree(v) for u, v in g.edges]

    def pick() -> int:
        best, key = -1, None
        for e in range(m):
            if colors[e] is None:
                u, v = g.edges[e]
                sat = len(used_at[u] | used_at[v])
                cand = (sat, weight[e], -e)
                if key is None or cand > key:
                    best, key = e, cand
        return best

    def search(done: int, top: int) -> bool:
        if done == m:
            return True
        stats["nodes"] += 1
        e = pick()
        u, v = g.edges[e]
        blocked = used_at[u] | used_at[v]
        # colors above the highest used one are interchangeable: try only one
        for col in range(min(k, top + 2)):
            if col in blocked:
                continue
            colors[e] = col
            used_at[u].add(col)
            used_at[v].add(col)
            if search(done + 1, max(top, col)):
                return True
            used_at[u].discard(col)
            used_at[v].discard(col)
            colors[e] = None
        return False

    return colors if search(0, -1) else None


def exact_chromatic_index(g: Graph, cap: int = DEFAULT_EDGE_CAP) -> OracleResult:
    if g.n_edges > cap:
        raise OracleCapExceeded(f"{g.n_edges} edges exceeds the cap of {cap}")
    if g.has_parallel_edges():
        raise ValueError("multigraphs are not supported")
    stats = {"nodes": 0, "tried": []}
    if g.n_edges == 0:
        return OracleResult(0, PartialEdgeColoring([], 0), stats)
    for k in (g.max_degree, g.max_degree + 1):
        stats["tried"].append(k)
        found = _colorable(g, k, stats)
        if found is not None:
            witness = PartialEdgeColoring(list(found), k)
            if not witness.is_proper(g) or None in witness.colors:
                raise AssertionError("backtracking produced an improper coloring")
            if g.is_bipartite() and k != g.max_degree:
                raise AssertionError("bipartite graph needed more than max-degree colors")
            return OracleResult(k, witness, stats)
    raise AssertionError("no coloring with max degree + 1 colors found")


# ------------------------------------------------------------- orientation


def euler_balanced_orientation(g: Graph) -> OracleResult:
    """Orient each component along an Euler circuit (Hierholzer)."""
    for v in range(g.n_vertices):
        if g.degree(v) % 2:
            raise ValueError(f"vertex {v} has odd degree {g.degree(v)}")
    used = [False] * g.n_edges
    pointer = [0] * g.n_vertices
    arcs: dict[int, tuple[int, int]] = {}
    circuits = 0
    for start in range(g.n_vertices):
        if all(used[e] for e in g.incident_edges(start)):
            continue
        circuits += 1
        stack = [(start, -1)]
        while stack:
            v, _ = stack[-1]
            adj = g.adjacency[v]
            while pointer[v] < len(adj) and used[adj[pointer[v]] >> 1]:
                pointer[v] += 1
            if pointer[v] == len(adj):
                stack.pop()
                continue
            d = adj[pointer[v]]
            used[d >> 1] = True
            w = g.dart_target(d)
            arcs[d >> 1] = (v, w)
            stack.append((w, d))
    s = Orientation.from_arcs(g, arcs)
    rep = corr_of_orientation(g, s)
    if len(rep.corr_vertices) != g.n_vertices:
        raise AssertionError("Euler orientation is not balanced")
    return OracleResult(rep.corr_mass, s, {"circuits": circuits})


# --------------------------------------------------------------- matchings


def _perfect_matching(n_left: int, adj: list[list[tuple[int, int]]]) -> Optional[dict[int, int]]:
    """Kuhn's augmenting paths.  ``adj[x]`` lists ``(right, edge)``; returns left -> edge."""
    match_right: dict[int, tuple[int, int]] = {}

    def augment(x: int, seen: set[int]) -> bool:
        for y, e in adj[x]:
            if y in seen:
                continue
            seen.add(y)
            if y not in match_right or augment(match_right[y][0], seen):
                match_right[y] = (x, e)
                return True
        return False

    for x in range(n_left):
        if not augment(x, set()):
            return None
    return {x: e for x, e in match_right.values()}


def regular_bipartite_coloring(cover: Graph, side: list[int]) -> PartialEdgeColoring:
    """Color a k-regular bipartite graph by peeling off k perfect matchings."""
    k = cover.max_degree
    left = [v for v in range(cover.n_vertices) if side[v] == 0]
    pos = {v: i for i, v in enumerate(left)}
    colors: list[Optional[int]] = [None] * cover.n_edges
    for col in range(k):
        adj: list[list[tuple[int, int]]] = [[] for _ in left]
        for e, (u, v) in enumerate(cover.edges):
            if colors[e] is None:
                x, y = (u, v) if side[u] == 0 else (v, u)
                adj[pos[x]].append((y, e))
        m = _perfect_matching(len(left), adj)
        if m is None:
            raise AssertionError("regular bipartite graph without a perfect matching")
        for e in m.values():
            colors[e] = col
    return PartialEdgeColoring(colors, k)


def exact_schreier_decoration(g: Graph, cap: int = 400) -> OracleResult:
    """Euler orientation, exact coloring of the out/in cover, labels pulled back."""
    if g.n_edges > cap:
        raise OracleCapExceeded(f"{g.n_edges} edges exceeds the cap of {cap}")
    if not g.is_regular() or g.max_degree % 2:
        raise ValueError("need a regular graph of even degree")
    s = euler_balanced_orientation(g).witness
    n = g.n_vertices
    cover_edges = [(s.tail(g, e), n + s.head(g, e)) for e in range(g.n_edges)]
    cover = Graph(2 * n, cover_edges)
    coloring = regular_bipartite_coloring(cover, [0] * n + [1] * n)
    labels = PartialEdgeColoring(list(coloring.colors), g.max_degree // 2)
    rep = corr_of_decoration(g, s, labels)
    if len(rep.corr_vertices) != n:
        raise AssertionError("oracle decoration is not correct everywhere")
    from .schreier import Decoration

    return OracleResult(rep.corr_mass, Decoration(s, labels, rep), {"cover_edges": len(cover_edges)})


# ---------------------------------------------------------- naive recounts


def naive_corr_orientation(g: Graph, s: Orientation) -> set[int]:
    outdeg = [0] * g.n_vertices
    indeg = [0] * g.n_vertices
    for e in range(g.n_edges):
        outdeg[s.tail(g, e)] += 1
        indeg[s.head(g, e)] += 1
    return {v for v in range(g.n_vertices) if outdeg[v] == indeg[v]}


def naive_corr_coloring(g: Graph, c: PartialEdgeColoring) -> set[int]:
    at = [[] for _ in range(g.n_vertices)]
    for e, (u, v) in enumerate(g.edges):
        at[u].append(c.colors[e])
        at[v].append(c.colors[e])
    return {
        v for v in range(g.n_vertices) if None not in at[v] and len(set(at[v])) == len(at[v])
    }


def naive_corr_decoration(g: Graph, s: Orientation, c: PartialEdgeColoring) -> set[int]:
    outs = [[] for _ in range(g.n_vertices)]
    ins = [[] for _ in range(g.n_vertices)]
    for e in range(g.n_edges):
        outs[s.tail(g, e)].append(c.colors[e])
        ins[s.head(g, e)].append(c.colors[e])
    good = set()
    for v in range(g.n_vertices):
        o, i = outs[v], ins[v]
        if len(o) == len(i) and None not in o and None not in i:
            if len(set(o)) == len(o) and len(set(i)) == len(i):
                good.add(v)
    return good


def deep_corr(g: Graph, corr: set[int]) -> set[int]:
    nbrs = [set() for _ in range(g.n_vertices)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    return {v for v in corr if nbrs[v] <= corr}


# ----------------------------------------------------- line-graph distances


def line_graph_distances(g: Graph, source: int) -> dict[int, int]:
    """BFS on the explicit line graph from edge ``source``; unreachable edges are absent."""
    by_vertex = [[] for _ in range(g.n_vertices)]
    for e, (u, v) in enumerate(g.edges):
        by_vertex[u].append(e)
        if v != u:
            by_vertex[v].append(e)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        e = queue.popleft()
        for x in set(g.edges[e]):
            for f in by_vertex[x]:
                if f not in dist:
                    dist[f] = dist[e] + 1
                    queue.append(f)
    return dist


def is_sparse(g: Graph, edges, k: int) -> bool:
    edges = list(edges)
    for i, e in enumerate(edges):
        dist = line_graph_distances(g, e)
        for f in edges[i + 1:]:
            if dist.get(f, k) < k:
                return False
    return True


# ------------------------------------------------------ alternating chains


def naive_chain(g: Graph, c: PartialEdgeColoring, e: int) -> list[int]:
    """Seed edge plus the maximal beta/gamma path, with the lowest-id anchor rule.

    Raises ``RuntimeError`` when the path returns to the far endpoint.
    """
    k = c.palette_size
    a = k - 1

    def missing(x: int) -> list[int]:
        seen = {c.colors[f] for f, (p, q) in enumerate(g.edges) if x in (p, q)}
        return [col for col in range(k) if col != a and col not in seen]

    v, w = sorted(g.edges[e])
    gamma = missing(v)[0]
    beta = missing(w)[0]
    out = [e]
    x, col = v, beta
    prev = e
    while True:
        nxt = [
            f
            for f, (p, q) in enumerate(g.edges)
            if f != prev and x in (p, q) and c.colors[f] == col
        ]
        if not nxt:
            return out
        f = nxt[0]
        out.append(f)
        p, q = g.edges[f]
        x = q if p == x else p
        if x == w:
            raise RuntimeError("alternating path closes an odd cycle")
        prev = f
        col = gamma if col == beta else beta


# --------------------------------------------------- cycle decompositions


def _cycles_through(g: Graph, free: set[int], start_edge: int):
    """All simple cycles using ``start_edge`` and otherwise only edges in ``free``."""
    u, v = g.edges[start_edge]

    def walk(x: int, visited: list[int], path: list[int]):
        for f in g.incident_edges(x):
            if f not in free or f in path:
                continue
            y = g.other_end(f, x)
            if y == u:
                yield path + [f]
            elif y not in visited:
                yield from walk(y, visited + [y], path + [f])

    yield from walk(v, [u, v], [start_edge])


def cycle_decompositions(g: Graph, limit: int = 10_000):
    """Enumerate decompositions of all edges into edge-disjoint simple cycles.

    Each decomposition is a sorted tuple of cycle lengths.  The lowest free edge
    always starts the next cycle, so decompositions are produced once per order.
    """
    found: set[tuple[int, ...]] = set()
    count = 0

    def rec(free: set[int], lengths: list[int]):
        nonlocal count
        if count >= limit:
            return
        if not free:
            found.add(tuple(sorted(lengths)))
            count += 1
            return
        e = min(free)
        rest = free - {e}
        for cyc in _cycles_through(g, rest, e):
            rec(rest - set(cyc), lengths + [len(cyc)])

    rec(set(range(g.n_edges)), [])
    return found


def is_cycle_decomposition(g: Graph, cycles) -> bool:
    """Do the edge-id lists in ``cycles`` form closed trails that partition E?"""
    seen: set[int] = set()
    for cyc in cycles:
        if not cyc or any(e in seen for e in cyc):
            return False
        seen.update(cyc)
        deg: dict[int, int] = {}
        for e in cyc:
            for x in g.edges[e]:
                deg[x] = deg.get(x, 0) + 1
        if any(d % 2 for d in deg.values()):
            return False
    return seen == set(range(g.n_edges))
