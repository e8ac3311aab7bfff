"""Exact motif census over threshold graphs, plus Monte Carlo estimators.

A motif is a pattern graph on k <= 8 vertices.  The census statistic counts
ordered k-tuples of distinct vertices whose weights realize every motif edge
(non-edges of the pattern are not forbidden).  Dividing by the motif's
symmetry count gives the number of subgraphs isomorphic to the pattern.

Census algorithm
----------------
Let the graph weights be sorted ascending.  For a k-subset taken in sorted
order, whether positions (s, t) are adjacent depends only on the subset's
*connection signature* ``(c_2, ..., c_k)``, where ``c_t`` is the number of
earlier subset members adjacent to member t; by monotonicity of the threshold
rule those are always the ``c_t`` heaviest earlier members, and once some
``c_t >= 1`` the counts must grow by at least one per step.  There are at most
``2**(k-1)`` feasible signatures.  For each signature the number of ordered
embeddings of the motif into that adjacency pattern is precomputed once, so
the census is a signature-weighted subset count instead of a k!-fold
permutation sum per subset.  The inner double loop over the last two subset
members is evaluated with suffix tables, never materializing tuples.

The work cap is expressed in nominal kernel evaluations ``C(n,k) * k!`` to
keep the census budget comparable across implementations of the same
contract.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .dist import WeightDistribution
from .errors import CapacityError, DomainError
from .graph import GraphSample

MAX_MOTIF_VERTICES = 8
DEFAULT_WORK_CAP = 1_000_000_000


@dataclass(frozen=True)
class Motif:
    """Pattern graph: vertex count, canonical edge set, symmetry count."""

    k: int
    edges: frozenset  # of (s, t) tuples, 1-based, s < t
    symmetry_count: int

    @classmethod
    def from_edges(cls, k: int, edges) -> "Motif":
        if k < 1:
            raise DomainError("motif needs at least one vertex")
        if k > MAX_MOTIF_VERTICES:
            raise CapacityError(
                f"motif has {k} vertices; symmetry enumeration is capped at "
                f"{MAX_MOTIF_VERTICES}"
            )
        canon = []
        for s, t in edges:
            s, t = int(s), int(t)
            if s == t or not (1 <= s <= k and 1 <= t <= k):
                raise DomainError(f"invalid motif edge ({s}, {t}) for k={k}")
            canon.append((min(s, t), max(s, t)))
        if len(canon) != len(set(canon)):
            raise DomainError("duplicate motif edges")
        edge_set = frozenset(canon)
        return cls(k=k, edges=edge_set, symmetry_count=_symmetries(k, edge_set))


def _symmetries(k: int, edges: frozenset) -> int:
    count = 0
    for perm in itertools.permutations(range(1, k + 1)):
        mapped = {(min(perm[s - 1], perm[t - 1]), max(perm[s - 1], perm[t - 1]))
                  for s, t in edges}
        count += mapped == edges
    return count


def parse_motif(spec: str) -> Motif:
    """Parse a motif spec string like ``k=4;edges=1-2,2-3,3-4,4-1``."""
    try:
        fields = dict(part.split("=", 1) for part in spec.split(";"))
        k = int(fields["k"])
        raw = fields.get("edges", "").strip()
        edges = []
        if raw:
            for item in raw.split(","):
                s, t = item.split("-")
                edges.append((int(s), int(t)))
    except (DomainError, CapacityError):
        raise
    except Exception as exc:
        raise DomainError(f"malformed motif spec {spec!r}: {exc}") from exc
    return Motif.from_edges(k, edges)


def triangle_motif() -> Motif:
    return Motif.from_edges(3, [(1, 2), (2, 3), (1, 3)])


# ---------------------------------------------------------------------------
# kernels


def motif_indicator(motif: Motif, x, theta: float) -> int:
    """1 iff the weight tuple realizes every motif edge."""
    if len(x) != motif.k:
        raise DomainError(f"expected {motif.k} weights, got {len(x)}")
    return int(all(x[s - 1] + x[t - 1] > theta for s, t in motif.edges))


def motif_indicator_symmetrized(motif: Motif, x, theta: float) -> Fraction:
    """Average of the indicator over all k! argument orders, as an exact
    rational m/k! (repeated values still contribute one permutation each)."""
    if len(x) != motif.k:
        raise DomainError(f"expected {motif.k} weights, got {len(x)}")
    hits = 0
    for perm in itertools.permutations(x):
        hits += all(perm[s - 1] + perm[t - 1] > theta for s, t in motif.edges)
    return Fraction(hits, math.factorial(motif.k))


# ---------------------------------------------------------------------------
# pattern table: signature -> ordered embedding count


def _feasible_signatures(k: int):
    """All connection signatures a sorted subset can realize.

    c_2 in {0, 1}; c_t <= t - 1; and once positive the count grows by at
    least one per step (the new heaviest member inherits the previous
    lightest connection).
    """
    sigs: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...]):
        t = len(prefix) + 2  # the column index the next entry fills
        if t > k:
            sigs.append(prefix)
            return
        lo = prefix[-1] + 1 if prefix and prefix[-1] >= 1 else 0
        for c in range(lo, t):
            extend(prefix + (c,))

    extend(())
    return sigs


def _embedding_count(k: int, edges: frozenset, connected: frozenset) -> int:
    """Ordered embeddings of the motif into a k-slot adjacency pattern."""
    # adjacency among slots, symmetric
    adj = [[False] * (k + 1) for _ in range(k + 1)]
    for s, t in connected:
        adj[s][t] = adj[t][s] = True
    # motif constraints grouped by the later-assigned vertex
    later_edges: list[list[int]] = [[] for _ in range(k + 1)]
    for s, t in edges:
        later_edges[max(s, t)].append(min(s, t))

    slots = list(range(1, k + 1))
    assigned = [0] * (k + 1)
    used = [False] * (k + 1)

    def backtrack(v: int) -> int:
        if v > k:
            return 1
        total = 0
        for slot in slots:
            if used[slot]:
                continue
            if all(adj[slot][assigned[u]] for u in later_edges[v]):
                used[slot] = True
                assigned[v] = slot
                total += backtrack(v + 1)
                used[slot] = False
        return total

    return backtrack(1)


@lru_cache(maxsize=128)
def _pattern_table(motif: Motif) -> np.ndarray:
    """Dense table M[c_2, ..., c_k] of embedding counts; -1 marks signatures
    no weight vector can realize (never indexed by the census)."""
    k = motif.k
    shape = tuple(range(2, k + 1))
    table = np.full(shape, -1, dtype=np.int64)
    for sig in _feasible_signatures(k):
        connected = frozenset(
            (s, t) for t, c in zip(range(2, k + 1), sig) for s in range(t - c, t)
        )
        table[sig] = _embedding_count(k, motif.edges, connected)
    return table


# ---------------------------------------------------------------------------
# census


def count_motif_tuples(
    g: GraphSample, motif: Motif, work_cap: int = DEFAULT_WORK_CAP
) -> int:
    """Number of ordered distinct k-tuples realizing every motif edge.

    Equals the sum over unordered k-subsets of k! times the symmetrized
    indicator; the subgraph count isomorphic to the motif is this divided by
    the motif's symmetry count.
    """
    n, k = g.n, motif.k
    if k > n:
        raise DomainError(f"motif needs {k} vertices but the graph has {n}")
    work = math.comb(n, k) * math.factorial(k)
    if work > work_cap:
        raise CapacityError(
            f"census needs {work} nominal kernel evaluations, over the cap "
            f"of {work_cap}"
        )
    if k == 1:
        return n  # a single-vertex motif has no edges to realize

    sw = g.sorted_weights
    first_ok = np.searchsorted(sw, g.theta - sw, side="right")  # A[j]
    # gate[x] = first sorted position j with first_ok[j] <= x, so that for
    # positions i < j:  adjacent(i, j)  iff  j >= gate[i]
    gate = np.searchsorted(-first_ok, -np.arange(n), side="left")

    table = _pattern_table(motif)
    total = 0
    for fixed in itertools.combinations(range(n), k - 2):
        f_arr = np.asarray(fixed, dtype=np.int64)
        prefix_sig = []
        for t_idx in range(1, k - 2):
            a = first_ok[fixed[t_idx]]
            prefix_sig.append(int(np.count_nonzero(f_arr[:t_idx] >= a)))
        m_slice = table[tuple(prefix_sig)]
        if k == 2:
            m_slice = m_slice[np.newaxis, :]

        r0 = fixed[-1] + 1 if fixed else 0
        mlen = n - r0
        if mlen < 2:
            continue
        rem = np.arange(r0, n, dtype=np.int64)
        # connections of each remaining position back into the fixed prefix
        base = (k - 2) - np.searchsorted(f_arr, first_ok[rem], side="left")

        # suffix[c, t] = #{j >= t in rem : base[j] = c}
        onehot = np.zeros((k - 1, mlen), dtype=np.int64)
        onehot[base, np.arange(mlen)] = 1
        suffix = np.zeros((k - 1, mlen + 1), dtype=np.int64)
        suffix[:, :-1] = onehot[:, ::-1].cumsum(axis=1)[:, ::-1]

        idx1 = np.arange(1, mlen + 1, dtype=np.int64)
        split = np.clip(gate[rem] - r0, idx1, mlen)
        grid = m_slice[base]  # (mlen, k): row i maps c_k -> embeddings
        s_lo = suffix[:, idx1]  # partners j > i, any adjacency
        s_hi = suffix[:, split]  # partners j with (i, j) adjacent
        term_far = np.einsum("ic,ci->", grid[:, : k - 1], s_lo - s_hi)
        term_adj = np.einsum("ic,ci->", grid[:, 1:k], s_hi)
        total += int(term_far + term_adj)
    return total


def count_motif_tuples_naive(g: GraphSample, motif: Motif) -> int:
    """Reference census by direct permutation enumeration (small n only)."""
    w = g.weights
    total = 0
    for subset in itertools.combinations(range(g.n), motif.k):
        for perm in itertools.permutations(subset):
            total += all(
                w[perm[s - 1]] + w[perm[t - 1]] > g.theta for s, t in motif.edges
            )
    return total


# ---------------------------------------------------------------------------
# Monte Carlo estimators


def motif_probability_mc(
    dist: WeightDistribution,
    motif: Motif,
    theta: float,
    samples: int,
    stream: np.random.Generator,
    block: int = 1_000_000,
) -> tuple[float, float]:
    """Monte Carlo estimate of P(k fresh weights realize the motif).

    Returns (estimate, binomial standard error).
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    hits = 0
    remaining = samples
    while remaining > 0:
        b = min(block, remaining)
        x = dist.sample(stream, (b, motif.k))
        ok = np.ones(b, dtype=bool)
        for s, t in motif.edges:
            ok &= x[:, s - 1] + x[:, t - 1] > theta
        hits += int(np.count_nonzero(ok))
        remaining -= b
    p = hits / samples
    return p, math.sqrt(p * (1.0 - p) / samples)


def _symmetrized_rows(motif: Motif, first: np.ndarray, rest: np.ndarray,
                      theta: float) -> np.ndarray:
    rows = np.column_stack([first, rest])
    k = motif.k
    acc = np.zeros(rows.shape[0], dtype=np.int64)
    for perm in itertools.permutations(range(k)):
        ok = np.ones(rows.shape[0], dtype=bool)
        for s, t in motif.edges:
            ok &= rows[:, perm[s - 1]] + rows[:, perm[t - 1]] > theta
        acc += ok
    return acc / math.factorial(k)


def motif_kernel_variance_mc(
    dist: WeightDistribution,
    motif: Motif,
    theta: float,
    outer: int,
    stream: np.random.Generator,
) -> tuple[float, float]:
    """Estimate the variance of the conditional motif kernel mean.

    For each outer draw x, two independent inner (k-1)-vectors give an
    unbiased product estimate of the squared conditional mean; the squared
    unconditional mean is removed with a half-sample split so the estimator
    stays unbiased before the final clamp at zero.  Returns the estimate and
    its delete-one jackknife standard error.
    """
    if outer < 2:
        raise DomainError("need at least two outer draws")
    k = motif.k
    x = dist.sample(stream, outer)
    y1 = dist.sample(stream, (outer, k - 1))
    y2 = dist.sample(stream, (outer, k - 1))
    s1 = _symmetrized_rows(motif, x, y1, theta)
    s2 = _symmetrized_rows(motif, x, y2, theta)

    prod = s1 * s2
    half = outer // 2
    p_hat = math.fsum(prod) / outer
    f_a = math.fsum(s1[:half]) / half
    f_b = math.fsum(s2[half:]) / (outer - half)
    estimate = max(0.0, p_hat - f_a * f_b)

    # delete-one jackknife on the unclamped statistic
    p_del = (outer * p_hat - prod) / (outer - 1)
    fa_del = np.full(outer, f_a)
    fb_del = np.full(outer, f_b)
    if half > 1:
        fa_del[:half] = (half * f_a - s1[:half]) / (half - 1)
    if outer - half > 1:
        fb_del[half:] = ((outer - half) * f_b - s2[half:]) / (outer - half - 1)
    reps = p_del - fa_del * fb_del
    se = math.sqrt((outer - 1) / outer * math.fsum((reps - reps.mean()) ** 2))
    return estimate, se
