"""Threshold graph samples and their order-statistics counting kernels.

Vertices ``i != j`` are adjacent iff ``weights[i] + weights[j] > theta``
(strict; a sum exactly at the threshold is no edge).  No adjacency matrix is
ever materialized: every statistic runs off the sorted weights.

Counting identities used below, with weights sorted ascending
``w[0] <= ... <= w[n-1]``:

* degree: ``D(i) = #{j : w[j] > theta - w[i]} - [2 w[i] > theta]`` via binary
  search, the correction removing the self pairing;
* triangles: a triple is a triangle iff its two smallest weights already sum
  above theta, so ``T = sum over sorted pairs a < b with w[a] + w[b] > theta
  of (n - 1 - b)`` (the third vertex ranges over positions after ``b``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import WeightDistribution, parse_dist
from .errors import CapacityError, DomainError
from .stats import register_experiment

EDGE_LIST_CAP = 1_000_000


@dataclass(frozen=True)
class GraphSample:
    """n weights plus the threshold; edges are implicit via the sum rule."""

    n: int
    theta: float
    weights: np.ndarray
    order: np.ndarray = field(repr=False)  # argsort of weights, stable
    sorted_weights: np.ndarray = field(repr=False)

    @classmethod
    def from_weights(cls, weights, theta: float) -> "GraphSample":
        w = np.asarray(weights, dtype=float).copy()
        if w.ndim != 1 or w.size < 1:
            raise DomainError("weights must be a nonempty 1-D sequence")
        order = np.argsort(w, kind="stable")
        sw = w[order]
        for arr in (w, order, sw):
            arr.flags.writeable = False
        return cls(n=int(w.size), theta=float(theta), weights=w, order=order,
                   sorted_weights=sw)


def sample_graph(
    dist: WeightDistribution, n: int, theta: float, stream: np.random.Generator
) -> GraphSample:
    """Draw n i.i.d. weights; deterministic given the stream state."""
    if n < 1:
        raise DomainError("graph needs at least one vertex")
    return GraphSample.from_weights(dist.sample(stream, n), theta)


def all_degrees(g: GraphSample) -> np.ndarray:
    """Degree of every vertex, O(n log n) total."""
    above = g.n - np.searchsorted(g.sorted_weights, g.theta - g.weights, side="right")
    return (above - (2.0 * g.weights > g.theta)).astype(np.int64)


def edge_count(g: GraphSample) -> int:
    return int(all_degrees(g).sum(dtype=np.int64)) // 2


def edge_list(g: GraphSample, cap: int = EDGE_LIST_CAP) -> list[tuple[int, int]]:
    """All edges as 1-based (i, j) pairs with i < j, lexicographically sorted."""
    m = edge_count(g)
    if m > cap:
        raise CapacityError(f"edge list has {m} edges, exceeding the cap of {cap}")
    w = g.weights
    pairs: list[tuple[int, int]] = []
    for i in range(g.n - 1):
        js = np.nonzero(w[i + 1 :] + w[i] > g.theta)[0]
        pairs.extend((i + 1, int(j) + i + 2) for j in js)
    return pairs


def write_edges_csv(g: GraphSample, path, cap: int = EDGE_LIST_CAP) -> None:
    """Export the edge list as CSV with header ``i,j`` (LF line endings)."""
    pairs = edge_list(g, cap)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("i,j\n")
        for i, j in pairs:
            fh.write(f"{i},{j}\n")


def count_triangles(g: GraphSample) -> int:
    """Number of unordered triangles, O(n log n).

    For each sorted position b, every position a < b with
    ``w[a] + w[b] > theta`` closes a triangle with each of the ``n - 1 - b``
    heavier vertices, because the pair (a, b) is then the light pair of the
    triple.
    """
    sw = g.sorted_weights
    n = g.n
    first_ok = np.searchsorted(sw, g.theta - sw, side="right")
    b = np.arange(n, dtype=np.int64)
    light_pairs = np.maximum(0, b - first_ok)
    return int(np.sum(light_pairs * (n - 1 - b), dtype=np.int64))


def count_local_triangles(g: GraphSample, vertex: int) -> int:
    """Triangles through one vertex (1-based), via a two-pointer pair count."""
    if not 1 <= vertex <= g.n:
        raise DomainError(f"vertex must be in 1..{g.n}")
    xi = float(g.weights[vertex - 1])
    sw = g.sorted_weights
    start = int(np.searchsorted(sw, g.theta - xi, side="right"))
    nb = sw[start:]
    if 2.0 * xi > g.theta:
        # the vertex itself sits in its neighbor suffix; drop one copy
        self_pos = int(np.searchsorted(nb, xi, side="left"))
        nb = np.delete(nb, self_pos)
    lo, hi = 0, nb.size - 1
    count = 0
    while lo < hi:
        if nb[lo] + nb[hi] > g.theta:
            count += hi - lo
            hi -= 1
        else:
            lo += 1
    return count


def tagged_pair_degrees(
    dist: WeightDistribution, n: int, theta: float, stream: np.random.Generator
) -> tuple[int, int, bool]:
    """Degrees of two tagged vertices into a shared pool, plus their edge.

    Draws ``n + 2`` weights; the two tagged vertices (indices n, n+1) are
    counted only against the pool of the first n, never against each other,
    and the returned flag says whether they are themselves adjacent.
    """
    if n < 1:
        raise DomainError("pool size must be >= 1")
    w = dist.sample(stream, n + 2)
    pool = w[:n]
    d1 = int(np.count_nonzero(pool + w[n] > theta))
    d2 = int(np.count_nonzero(pool + w[n + 1] > theta))
    return d1, d2, bool(w[n] + w[n + 1] > theta)


# ---------------------------------------------------------------------------
# registered experiments


@register_experiment("degree")
def _degree_experiment(params: dict, stream: np.random.Generator) -> float:
    """D_n(1)/n for one fresh graph on n vertices."""
    dist = parse_dist(params["dist"])
    n = int(params["n"])
    theta = float(params["theta"])
    w = dist.sample(stream, n)
    d = int(np.count_nonzero(w[1:] + w[0] > theta))
    return d / n


@register_experiment("pair", columns=("d1_over_n", "d2_over_n", "edge"))
def _pair_experiment(params: dict, stream: np.random.Generator):
    dist = parse_dist(params["dist"])
    n = int(params["n"])
    theta = float(params["theta"])
    d1, d2, edge = tagged_pair_degrees(dist, n, theta, stream)
    return d1 / n, d2 / n, 1.0 if edge else 0.0


@register_experiment("triangles")
def _triangle_experiment(params: dict, stream: np.random.Generator) -> float:
    """T_n / C(n,3) for one fresh graph."""
    dist = parse_dist(params["dist"])
    n = int(params["n"])
    theta = float(params["theta"])
    g = sample_graph(dist, n, theta, stream)
    return count_triangles(g) / math.comb(n, 3)


@register_experiment("local")
def _local_triangle_experiment(params: dict, stream: np.random.Generator) -> float:
    """Triangles at vertex 1 among n+1 vertices, normalized by C(n,2)."""
    dist = parse_dist(params["dist"])
    n = int(params["n"])
    theta = float(params["theta"])
    g = sample_graph(dist, n + 1, theta, stream)
    return count_local_triangles(g, 1) / math.comb(n, 2)
