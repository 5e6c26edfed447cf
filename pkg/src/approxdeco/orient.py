"""Approximate balanced orientations via cycle packing and path systems.

Cycles are packed greedily until the residual is a forest.  The forest is
covered by edge-disjoint paths that grow in stages: at stage ``n`` the seeds
are the classes of a ``3 * 2**n``-sparse partition, and the path through a
seed swallows neighbouring paths that stay within a third of the seed
separation.  Path ends that remain at an even-degree vertex after the last
stage are paired there, and the pairing is pushed back to every stage.
Orienting cycles and paths end to end leaves only path endpoints unbalanced.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .graph import (
    CorrReport,
    Graph,
    Orientation,
    corr_of_orientation,
    sparse_edge_classes,
)
from .measures import VertexMeasure


class Trail(NamedTuple):
    """Vertex sequence and the edges between consecutive vertices.

    A closed trail (cycle) repeats no vertex; its last edge joins the last
    vertex back to the first.
    """

    vertices: tuple[int, ...]
    edges: tuple[int, ...]


@dataclass
class CyclePacking:
    cycles: list[Trail]
    residual: list[int]


class ExtensionConflict(RuntimeError):
    """Two seeds of one stage tried to absorb the same path."""


@dataclass
class PathSystem:
    stage: int
    paths: list[Trail]
    pairing: dict[int, int] = field(default_factory=dict)

    def endpoints(self) -> set[int]:
        ends = set()
        for p in self.paths:
            ends.add(p.vertices[0])
            ends.add(p.vertices[-1])
        return ends

    def path_of(self) -> dict[int, int]:
        return {e: i for i, p in enumerate(self.paths) for e in p.edges}


def pack_cycles(g: Graph) -> CyclePacking:
    """Greedy maximal family of edge-disjoint cycles.

    A walk follows the lowest-id unused edge; revisiting a vertex of the
    current walk closes a cycle, which is removed.  A vertex whose only unused
    edge is the one just walked is a leaf of what is left, so that edge joins
    the residual forest and the walk backs up.
    """
    used = [False] * g.n_edges
    cursor = [0] * g.n_vertices
    cycles: list[Trail] = []
    residual: list[int] = []

    def next_edge(x: int, skip: int) -> Optional[int]:
        adj = g.adjacency[x]
        i = cursor[x]
        while i < len(adj) and used[adj[i] >> 1]:
            i += 1
        cursor[x] = i
        for d in adj[i:]:
            e = d >> 1
            if not used[e] and e != skip:
                return e
        return None

    for start in range(g.n_vertices):
        if next_edge(start, -1) is None:
            continue
        verts, edges = [start], []
        where = {start: 0}
        while verts:
            x = verts[-1]
            arrived = edges[-1] if edges else -1
            e = next_edge(x, arrived)
            if e is None:
                if arrived < 0:
                    break
                used[arrived] = True
                residual.append(arrived)
                edges.pop()
                del where[verts.pop()]
                continue
            used[e] = True
            y = g.other_end(e, x)
            if y in where:
                i = where[y]
                cyc_v = tuple(verts[i:])
                cyc_e = tuple(edges[i:]) + (e,)
                cycles.append(Trail(cyc_v, cyc_e))
                for z in verts[i + 1:]:
                    del where[z]
                del verts[i + 1:]
                del edges[i:]
            else:
                where[y] = len(verts)
                verts.append(y)
                edges.append(e)
    return CyclePacking(cycles, sorted(residual))


class _Growth:
    """Paths of one forest with positions, so that distances along a path are differences."""

    def __init__(self, h: Graph):
        self.h = h
        m = h.n_edges
        self.verts = {e: deque(h.edges[e]) for e in range(m)}
        self.edges = {e: deque([e]) for e in range(m)}
        self.label = {e: e for e in range(m)}
        self.lo = {e: 0 for e in range(m)}
        self.pos = [0] * m
        self.path_of = list(range(m))
        self.ends: list[set[int]] = [set() for _ in range(h.n_vertices)]
        for e, (u, v) in enumerate(h.edges):
            self.ends[u].add(e)
            self.ends[v].add(e)

    def hi(self, pid: int) -> int:
        return self.lo[pid] + len(self.edges[pid]) - 1

    def merge(self, p: int, r: int, x: int) -> int:
        """Concatenate paths ``p`` and ``r`` at their common end ``x``; returns the surviving key."""
        keep, gone = (p, r) if len(self.edges[p]) >= len(self.edges[r]) else (r, p)
        kv, ke = self.verts[keep], self.edges[keep]
        gv, ge = self.verts[gone], self.edges[gone]
        if gv[0] != x:
            gv.reverse()
            ge.reverse()
        far = gv[-1]
        self.ends[x].discard(keep)
        self.ends[x].discard(gone)
        self.ends[far].discard(gone)
        self.ends[far].add(keep)
        if kv[-1] == x:
            nxt = self.hi(keep) + 1
            for i, e in enumerate(ge):
                self.pos[e] = nxt + i
                self.path_of[e] = keep
            ke.extend(ge)
            gv.popleft()
            kv.extend(gv)
        else:
            assert kv[0] == x
            for i, e in enumerate(ge):
                self.pos[e] = self.lo[keep] - 1 - i
                self.path_of[e] = keep
                ke.appendleft(e)
            self.lo[keep] -= len(ge)
            gv.popleft()
            kv.extendleft(gv)
        self.label[keep] = min(self.label[keep], self.label[gone])
        for table in (self.verts, self.edges, self.label, self.lo):
            del table[gone]
        return keep

    def extend(self, pid: int, seeds: list[int], radius: float, claimed: set[int]) -> int:
        """Greedy maximal extension of ``pid`` at both of its ends."""
        frontiers = [
            (self.verts[pid][0], self.edges[pid][0]),
            (self.verts[pid][-1], self.edges[pid][-1]),
        ]
        for frontier, tip in frontiers:
            while True:
                # distance from the nearest seed to the far edge of a candidate
                base = min(abs(self.pos[tip] - self.pos[e]) for e in seeds)
                best = None
                for r in sorted(self.ends[frontier] - {pid}, key=self.label.__getitem__):
                    if base + len(self.edges[r]) < radius:
                        best = r
                        break
                if best is None:
                    break
                if best in claimed:
                    raise ExtensionConflict(f"path {self.label[best]} is claimed twice")
                claimed.add(best)
                rv, re = self.verts[best], self.edges[best]
                if rv[0] == frontier:
                    next_frontier, next_tip = rv[-1], re[-1]
                else:
                    next_frontier, next_tip = rv[0], re[0]
                pid = self.merge(pid, best, frontier)
                claimed.add(pid)
                frontier, tip = next_frontier, next_tip
        return pid

    def snapshot(self) -> list[Trail]:
        out = [
            Trail(tuple(self.verts[p]), tuple(self.edges[p]))
            for p in sorted(self.edges, key=self.label.__getitem__)
        ]
        return out


def _check_forest(h: Graph) -> None:
    parent = list(range(h.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, (u, v) in enumerate(h.edges):
        ru, rv = find(u), find(v)
        if ru == rv:
            raise ValueError(f"edge {e} closes a cycle; path systems need a forest")
        parent[ru] = rv


def default_schedule(h: Graph, stage: int) -> list[list[int]]:
    return sparse_edge_classes(h, 3 * 2 ** stage)


def _line_diameter_bound(h: Graph) -> int:
    comp = h.components()
    roots = {comp[u] for u, _ in h.edges}
    return max((2 * max(h.vertex_distances([r]).values()) + 1 for r in roots), default=0)


def grow_path_system(
    g: Graph,
    stages: int,
    seeds: Optional[Callable[[Graph, int], Sequence[Sequence[int]]]] = None,
    edges: Optional[Sequence[int]] = None,
) -> list[PathSystem]:
    """Path systems ``0..stages`` covering ``edges`` (default: all edges of ``g``).

    ``seeds(h, n)`` returns the sparse classes swept during stage ``n`` as edge
    ids of the forest ``h``; within one class each seed absorbs paths whose
    every edge is closer than a third of the class separation, or without
    limit when the seed is alone in its component.
    """
    if edges is None:
        h, back = g, list(range(g.n_edges))
    else:
        h, back = g.subgraph(edges)
    _check_forest(h)
    # Once one stage has run with a single seed per component, every path is
    # maximal and later default stages cannot change anything.
    stable_after = _line_diameter_bound(h) if seeds is None else math.inf
    seeds = seeds or default_schedule
    comp = h.components()
    growth = _Growth(h)
    raw = [growth.snapshot()]
    for n in range(stages):
        sep = 3 * 2 ** n
        if 3 * 2 ** (n - 1) > stable_after:
            raw.append(raw[-1])
            continue
        for cls in seeds(h, n):
            per_comp: dict[int, int] = {}
            for e in cls:
                c = comp[h.edges[e][0]]
                per_comp[c] = per_comp.get(c, 0) + 1
            claimed: set[int] = set()
            groups: dict[int, list[int]] = {}
            for e in sorted(cls):
                groups.setdefault(growth.path_of[e], []).append(e)
            for pid, members in sorted(groups.items(), key=lambda kv: kv[1][0]):
                if pid in claimed:
                    raise ExtensionConflict(f"seed path {growth.label[pid]} already absorbed")
                claimed.add(pid)
                alone = per_comp[comp[h.edges[members[0]][0]]] == 1
                radius = math.inf if alone else sep / 3
                growth.extend(pid, members, radius, claimed)
        raw.append(growth.snapshot())

    pairing = _pair_ends(h, raw[-1])
    systems = []
    for n, paths in enumerate(raw):
        merged = _apply_pairing(h, paths, pairing)
        systems.append(
            PathSystem(
                n,
                [Trail(p.vertices, tuple(back[e] for e in p.edges)) for p in merged],
                {back[e]: back[f] for e, f in pairing.items()},
            )
        )
    return systems


def _pair_ends(h: Graph, final: list[Trail]) -> dict[int, int]:
    """Pair, at each even-degree vertex, the edges whose final path ends there."""
    at_end: dict[int, list[int]] = {}
    for p in final:
        at_end.setdefault(p.vertices[0], []).append(p.edges[0])
        at_end.setdefault(p.vertices[-1], []).append(p.edges[-1])
    pairing = {}
    for v, es in at_end.items():
        if h.degree(v) % 2:
            continue
        es = sorted(es)
        for e, f in zip(es[::2], es[1::2]):
            pairing[e] = f
            pairing[f] = e
    return pairing


def _apply_pairing(h: Graph, paths: list[Trail], pairing: dict[int, int]) -> list[Trail]:
    if not pairing:
        return list(paths)
    owner = {e: i for i, p in enumerate(paths) for e in p.edges}
    parent = list(range(len(paths)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, f in pairing.items():
        a, b = find(owner[e]), find(owner[f])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(len(paths)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for root in sorted(groups):
        members = groups[root]
        if len(members) == 1:
            out.append(paths[members[0]])
            continue
        edge_set = [e for i in members for e in paths[i].edges]
        out.append(_walk_path(h, edge_set))
    return out


def _walk_path(h: Graph, edge_set: list[int]) -> Trail:
    inc: dict[int, list[int]] = {}
    for e in edge_set:
        for x in h.edges[e]:
            inc.setdefault(x, []).append(e)
    ends = sorted(x for x, es in inc.items() if len(es) == 1)
    if len(ends) != 2 or any(len(es) > 2 for es in inc.values()):
        raise AssertionError("paired pieces do not form a path")
    x, prev = ends[0], None
    verts, edges = [x], []
    while len(edges) < len(edge_set):
        e = next(f for f in inc[x] if f != prev)
        x = h.other_end(e, x)
        verts.append(x)
        edges.append(e)
        prev = e
    return Trail(tuple(verts), tuple(edges))


def _orient_trail(arcs: dict[int, tuple[int, int]], g: Graph, t: Trail, closed: bool) -> None:
    verts, edges = list(t.vertices), list(t.edges)
    if closed:
        k = len(verts)
        i = verts.index(min(verts))
        # rotate so the lowest vertex leads, then go towards its lower neighbour
        verts = verts[i:] + verts[:i]
        edges = edges[i:] + edges[:i]
        if k > 2 and verts[-1] < verts[1]:
            verts = [verts[0]] + verts[:0:-1]
            edges = edges[::-1]
        for j, e in enumerate(edges):
            arcs[e] = (verts[j], verts[(j + 1) % k])
    else:
        if verts[-1] < verts[0]:
            verts.reverse()
            edges.reverse()
        for j, e in enumerate(edges):
            arcs[e] = (verts[j], verts[j + 1])


def orient_from_systems(g: Graph, packing: CyclePacking, paths: Optional[PathSystem]) -> Orientation:
    """Orient every cycle around and every path end to end."""
    arcs: dict[int, tuple[int, int]] = {}
    for cyc in packing.cycles:
        _orient_trail(arcs, g, cyc, closed=True)
    if paths is not None:
        for p in paths.paths:
            _orient_trail(arcs, g, p, closed=False)
    missing = [e for e in range(g.n_edges) if e not in arcs]
    if missing:
        raise ValueError(f"edges {missing[:10]} are covered by no cycle or path")
    return Orientation.from_arcs(g, arcs)


def odd_degree_vertices(g: Graph) -> list[int]:
    return [v for v in range(g.n_vertices) if g.degree(v) % 2]


@dataclass
class StageRecord:
    stage: int
    endpoints: int
    corr_mass: float
    deep_corr_mass: float


def approximate_balanced_orientation(
    g: Graph,
    mu: Optional[VertexMeasure],
    epsilon: float,
    truncation: bool = False,
    stages: Optional[int] = None,
    trace: Optional[list] = None,
) -> tuple[Orientation, CorrReport]:
    """Orientation whose deep Corr set (balanced with balanced neighbours) has mass > 1 - epsilon.

    Odd-degree vertices are an error unless ``truncation`` is set, in which
    case they are treated as boundary.  Stages are tried in order and the
    first one reaching the target is returned; otherwise the best one.
    ``trace`` collects one :class:`StageRecord` per evaluated stage.
    """
    odd = odd_degree_vertices(g)
    if odd and not truncation:
        raise ValueError(f"vertex {odd[0]} has odd degree {g.degree(odd[0])}")
    packing = pack_cycles(g)
    if stages is None:
        stages = max(1, math.ceil(math.log2(max(g.n_edges, 2)))) + 2
    systems = (
        grow_path_system(g, stages, edges=packing.residual) if packing.residual else [None]
    )
    best = None
    for system in systems:
        s = orient_from_systems(g, packing, system)
        rep = corr_of_orientation(g, s, mu)
        stage = system.stage if system is not None else 0
        if trace is not None:
            n_end = len(system.endpoints()) if system is not None else 0
            trace.append(StageRecord(stage, n_end, rep.corr_mass, rep.deep_corr_mass))
        if best is None or rep.deep_corr_mass > best[1].deep_corr_mass:
            best = (s, rep)
        # epsilon >= 1 asks for nothing, even when stage 0 has no deep vertex
        if rep.deep_corr_mass > 1 - epsilon or epsilon >= 1:
            return s, rep
    return best
