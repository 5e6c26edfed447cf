"""Seed-deterministic graph families used by experiments and tests."""

from __future__ import annotations

import math
import random
from collections import defaultdict
from typing import Sequence

from .graph import Graph, Orientation, PartialEdgeColoring, corr_of_decoration

RETRY_BUDGET = 1000


class GenerationError(RuntimeError):
    pass


def gen_random_regular(n: int, d: int, seed: int = 0) -> Graph:
    """Simple d-regular graph from the configuration model.

    Stubs are paired at random; pairs that would form a loop or repeat an
    edge are returned to the pool and re-paired, and the whole attempt is
    rejected if the leftover stubs admit no valid pair.
    """
    if (n * d) % 2:
        raise ValueError("n * d must be even")
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")
    rng = random.Random(seed)

    def suitable(edges, pending) -> bool:
        if not pending:
            return True
        for s1 in pending:
            for s2 in pending:
                if s1 == s2:
                    break
                if (min(s1, s2), max(s1, s2)) not in edges:
                    return True
        return False

    def attempt():
        edges = set()
        stubs = [v for v in range(n) for _ in range(d)]
        while stubs:
            pending = defaultdict(int)
            rng.shuffle(stubs)
            it = iter(stubs)
            for s1, s2 in zip(it, it):
                key = (min(s1, s2), max(s1, s2))
                if s1 != s2 and key not in edges:
                    edges.add(key)
                else:
                    pending[s1] += 1
                    pending[s2] += 1
            if not suitable(edges, pending):
                return None
            stubs = [v for v, k in sorted(pending.items()) for _ in range(k)]
        return edges

    for _ in range(RETRY_BUDGET):
        edges = attempt()
        if edges is not None:
            return Graph(n, sorted(edges), meta={"family": "random_regular", "d": d, "seed": seed})
    raise GenerationError(f"no simple {d}-regular graph on {n} vertices after {RETRY_BUDGET} tries")


def gen_torus(dims: Sequence[int]):
    """Torus grid on Z_{dims[0]} x ... with its canonical Schreier decoration.

    Vertices are numbered row-major (last axis fastest).  Edge ``v -> v + e_i``
    is oriented forward and labelled ``i``.  Returns ``(graph, decoration)``.
    """
    from .schreier import Decoration

    dims = [int(x) for x in dims]
    if not dims or any(x < 3 for x in dims):
        raise ValueError("every side must be at least 3")
    n = math.prod(dims)
    strides = [math.prod(dims[i + 1:]) for i in range(len(dims))]
    edges, labels = [], []
    for v in range(n):
        for i, (side, stride) in enumerate(zip(dims, strides)):
            coord = (v // stride) % side
            w = v + stride if coord + 1 < side else v - coord * stride
            edges.append((v, w))
            labels.append(i)
    g = Graph(n, edges, meta={"family": "torus", "dims": dims})
    s = Orientation([0] * g.n_edges)
    c = PartialEdgeColoring(labels, len(dims))
    return g, Decoration(s, c, corr_of_decoration(g, s, c))


def gen_bipartite_regular(n_side: int, d: int, seed: int = 0) -> Graph:
    """Union of d random perfect matchings between ``0..n-1`` and ``n..2n-1``.

    Each new matching is drawn as a random permutation; collisions with earlier
    matchings are removed by random transpositions, and the draw is repeated
    if that fails.
    """
    if not 0 <= d <= n_side:
        raise ValueError("need 0 <= d <= n_side")
    rng = random.Random(seed)
    used: set[tuple[int, int]] = set()
    for _ in range(d):
        for _attempt in range(RETRY_BUDGET):
            perm = list(range(n_side))
            rng.shuffle(perm)
            bad = [i for i in range(n_side) if (i, perm[i]) in used]
            for _swap in range(50 * n_side):
                if not bad:
                    break
                i = bad.pop()
                if (i, perm[i]) not in used:
                    continue
                j = rng.randrange(n_side)
                if (i, perm[j]) not in used and (j, perm[i]) not in used:
                    perm[i], perm[j] = perm[j], perm[i]
                else:
                    bad.append(i)
            if all((i, perm[i]) not in used for i in range(n_side)):
                used.update((i, perm[i]) for i in range(n_side))
                break
        else:
            raise GenerationError(f"could not add a matching after {RETRY_BUDGET} draws")
    edges = sorted((i, n_side + j) for i, j in used)
    return Graph(2 * n_side, edges, meta={"family": "bipartite_regular", "d": d, "seed": seed})


def gen_truncated_even_tree(branching: int, depth: int) -> Graph:
    """Ball of radius ``depth`` in the ``branching``-regular tree, numbered breadth first."""
    if branching < 2 or branching % 2:
        raise ValueError("branching must be an even number >= 2")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    edges = []
    n = 1
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for _ in range(branching if v == 0 else branching - 1):
                edges.append((v, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    return Graph(n, edges, meta={"family": "tree", "branching": branching, "depth": depth})


def tree_boundary_fraction(branching: int, depth: int):
    """Leaves over vertices for :func:`gen_truncated_even_tree`, in closed form."""
    from fractions import Fraction

    if depth == 0:
        return Fraction(0)
    b = branching - 1
    leaves = branching * b ** (depth - 1)
    total = 1 + branching * sum(b ** i for i in range(depth))
    return Fraction(leaves, total)


def gen_rotation_graph(n: int, steps: Sequence[int]) -> Graph:
    """Circulant graph on Z_n with one cycle layer ``i -- i + k`` per step k.

    Steps producing loops or repeated edges (``k = 0``, ``2k = n``, or two steps
    with ``k' = +-k mod n``) are rejected.
    """
    seen = set()
    for k in steps:
        r = k % n
        if r == 0 or 2 * r == n:
            raise ValueError(f"step {k} gives loops or doubled edges on Z_{n}")
        key = min(r, n - r)
        if key in seen:
            raise ValueError(f"step {k} repeats an earlier layer")
        seen.add(key)
    edges = [(i, (i + k) % n) for k in steps for i in range(n)]
    gcds = [math.gcd(k, n) for k in steps]
    return Graph(n, edges, meta={"family": "rotation", "steps": list(steps), "gcds": gcds})


FAMILIES = {
    "random_regular": lambda p, seed: gen_random_regular(int(p["n"]), int(p["d"]), seed),
    "torus": lambda p, seed: gen_torus([int(x) for x in str(p["dims"]).split("x")])[0],
    "bipartite_regular": lambda p, seed: gen_bipartite_regular(int(p["n_side"]), int(p["d"]), seed),
    "tree": lambda p, seed: gen_truncated_even_tree(int(p["branching"]), int(p["depth"])),
    "rotation": lambda p, seed: gen_rotation_graph(
        int(p["n"]), [int(x) for x in str(p["steps"]).split("/")]
    ),
}


def parse_params(text: str) -> dict[str, str]:
    """``k=v,k=v`` into a dict; list-valued params use ``x`` (dims) or ``/`` (steps)."""
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"parameter {part!r} is not key=value")
        out[key.strip()] = value.strip()
    return out


def generate(family: str, params: dict, seed: int = 0) -> Graph:
    try:
        factory = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return factory(params, seed)
