"""Finite vertex and edge measures.

Weights are floats by default; passing :class:`fractions.Fraction` weights
gives an exact mode used by the oracle comparisons.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import Graph

SUM_TOL = 1e-12


def _total(values) -> float | Fraction:
    values = list(values)
    if values and all(isinstance(w, Fraction) for w in values):
        return sum(values, Fraction(0))
    return math.fsum(values)


def _check_probability(weights: Sequence, what: str, strict: bool) -> None:
    if not weights:
        raise ValueError(f"{what} needs at least one atom")
    for i, w in enumerate(weights):
        if w < 0 or (strict and w == 0):
            raise ValueError(f"{what} weight {i} is {w}")
    total = _total(weights)
    if abs(total - 1) > SUM_TOL:
        raise ValueError(f"{what} weights sum to {total}, not 1")


@dataclass(frozen=True)
class VertexMeasure:
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        _check_probability(self.weights, "vertex measure", strict=False)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, v: int):
        return self.weights[v]

    def mass(self, vertices: Iterable[int]):
        return _total(self.weights[v] for v in vertices)

    def has_full_support(self) -> bool:
        return all(w > 0 for w in self.weights)

    def is_uniform(self) -> bool:
        first = self.weights[0]
        return all(w == first for w in self.weights)

    @classmethod
    def uniform(cls, n: int, exact: bool = False) -> "VertexMeasure":
        w = Fraction(1, n) if exact else 1.0 / n
        return cls((w,) * n)

    @classmethod
    def point(cls, n: int, v: int) -> "VertexMeasure":
        if not 0 <= v < n:
            raise ValueError(f"point mass at {v} outside 0..{n - 1}")
        return cls(tuple(1.0 if i == v else 0.0 for i in range(n)))

    @classmethod
    def from_weights(cls, raw: Sequence[float]) -> "VertexMeasure":
        """Normalize nonnegative raw weights."""
        total = _total(raw)
        if total <= 0:
            raise ValueError("weights must have positive total")
        return cls(tuple(w / total for w in raw))


@dataclass(frozen=True)
class EdgeMeasure:
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        _check_probability(self.weights, "edge measure", strict=True)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, e: int):
        return self.weights[e]

    def mass(self, edges: Iterable[int]):
        return _total(self.weights[e] for e in edges)

    def is_uniform(self) -> bool:
        first = self.weights[0]
        return all(w == first for w in self.weights)


def make_quasi_invariant(mu: VertexMeasure) -> VertexMeasure:
    """Half-mixture with the uniform measure: full support and mu(A) <= 2 nu(A)."""
    n = len(mu)
    if all(isinstance(w, Fraction) for w in mu.weights):
        u = Fraction(1, n)
        return VertexMeasure(tuple((w + u) / 2 for w in mu.weights))
    if mu.is_uniform():
        return mu
    u = 1.0 / n
    return VertexMeasure.from_weights([(w + u) / 2 for w in mu.weights])


def edge_measure_from(g: Graph, mu: VertexMeasure) -> EdgeMeasure:
    """eta(e) proportional to mu(u) + mu(v).

    The normalizer is at most sum_v deg(v) mu(v) <= max_degree, which gives
    mu(vertices touched by A) <= max_degree * eta(A) for every edge set A.
    """
    if len(mu) != g.n_vertices:
        raise ValueError("measure and graph disagree on the vertex count")
    raw = [mu.weights[u] + mu.weights[v] for u, v in g.edges]
    z = _total(raw)
    if not raw or z == 0:
        raise ValueError("measure gives no mass to any edge")
    if any(w == 0 for w in raw):
        raise ValueError("measure lacks full support on edges; apply make_quasi_invariant first")
    if all(isinstance(w, Fraction) for w in raw):
        return EdgeMeasure(tuple(w / z for w in raw))
    if all(w == raw[0] for w in raw):
        return EdgeMeasure((1.0 / len(raw),) * len(raw))
    weights = [w / z for w in raw]
    # Absorb rounding so the float weights still sum to 1 within tolerance.
    s = math.fsum(weights)
    return EdgeMeasure(tuple(w / s for w in weights))


def cocycle_ratio(eta: EdgeMeasure, f: int, e: int):
    """rho(f, e) = eta(f) / eta(e)."""
    return eta.weights[f] / eta.weights[e]


def measure_from_preset(spec: str, g: Graph, dims: Optional[Sequence[int]] = None) -> VertexMeasure:
    """Parse ``uniform``, ``point:<v>``, ``exp:<axis>,<rate>`` or ``random:<seed>``.

    ``exp`` weights vertex ``v`` by ``rate ** coord_axis(v)`` where coordinates
    come from ``dims`` (row-major, last axis fastest) or ``g.meta['dims']``;
    without either the vertex id itself is the coordinate.
    """
    n = g.n_vertices
    name, _, arg = spec.partition(":")
    if name == "uniform":
        return VertexMeasure.uniform(n)
    if name == "point":
        return VertexMeasure.point(n, int(arg))
    if name == "exp":
        axis_s, _, rate_s = arg.partition(",")
        axis, rate = int(axis_s), float(rate_s)
        if rate <= 0:
            raise ValueError("exp rate must be positive")
        dims = list(dims or g.meta.get("dims") or [n])
        if math.prod(dims) != n:
            raise ValueError(f"dims {dims} do not match {n} vertices")
        stride = math.prod(dims[axis + 1:])
        coords = [(v // stride) % dims[axis] for v in range(n)]
        return VertexMeasure.from_weights([rate ** x for x in coords])
    if name == "random":
        rng = random.Random(int(arg))
        return VertexMeasure.from_weights([rng.random() + 1e-3 for _ in range(n)])
    raise ValueError(f"unknown measure preset {spec!r}")
