"""Monte Carlo campaign runner and goodness-of-fit instruments.

Replicate streams
-----------------
Replicate ``i`` of a campaign with master seed ``s`` uses an independent
PCG64 generator seeded with ``substream_seed(s, i)``, a fixed SplitMix64
avalanche of the pair (documented so the seed -> sample mapping is stable):

    z = splitmix64(s) + (i + 1) * 0x9E3779B97F4A7C15   (mod 2**64)
    seed_i = splitmix64(z)

Replicates therefore do not depend on scheduling: any thread count yields the
same sample multiset, and reports are byte-identical for identical inputs.
Sample moments are reduced with exact summation (math.fsum) so the reduction
order cannot perturb reported means.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, UsageError

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, index: int) -> int:
    """64-bit seed for replicate ``index`` of a campaign; see module docs."""
    z = (_splitmix64(master_seed) + (index + 1) * _GOLDEN64) & _MASK64
    return _splitmix64(z)


def make_stream(master_seed: int, index: int = 0) -> np.random.Generator:
    """Independent random stream for one replicate."""
    return np.random.Generator(np.random.PCG64(substream_seed(master_seed, index)))


# ---------------------------------------------------------------------------
# experiment registry (populated by the owning modules at import time)

_EXPERIMENTS: dict[str, tuple[Callable, Optional[tuple[str, ...]]]] = {}


def register_experiment(name: str, columns: Optional[tuple[str, ...]] = None):
    def deco(fn):
        _EXPERIMENTS[name] = (fn, columns)
        return fn

    return deco


def experiment_names() -> tuple[str, ...]:
    return tuple(sorted(_EXPERIMENTS))


@dataclass
class ReplicateReport:
    """Result of one Monte Carlo campaign."""

    experiment: str
    config: dict
    seed: int
    replicates: int
    columns: Optional[tuple[str, ...]]
    samples: np.ndarray  # shape (R,) or (R, m)
    mean: object  # float or list of floats
    variance: object
    stderr: object
    gof: Optional[dict] = None
    extras: dict = field(default_factory=dict)

    def to_dict(self, samples_path: Optional[str] = None) -> dict:
        out = {
            "experiment": self.experiment,
            "config": self.config,
            "seed": self.seed,
            "R": self.replicates,
            "mean": self.mean,
            "variance": self.variance,
            "stderr": self.stderr,
            "gof": self.gof,
        }
        if self.columns is not None:
            out["columns"] = list(self.columns)
        if samples_path is not None:
            out["samples_path"] = samples_path
        out.update(self.extras)
        return out


def _column_moments(col: np.ndarray) -> tuple[float, float, float]:
    n = col.size
    mean = math.fsum(col) / n
    var = math.fsum((x - mean) ** 2 for x in col) / (n - 1) if n > 1 else 0.0
    return mean, var, math.sqrt(var / n)


def run_replicates(
    experiment: str,
    params: dict,
    replicates: int,
    master_seed: int,
    threads: Optional[int] = None,
) -> ReplicateReport:
    """Run ``replicates`` independent replicates of a named experiment.

    Replicate ``i`` receives the stream derived from ``(master_seed, i)``;
    the result does not depend on thread count or scheduling order.
    """
    if experiment not in _EXPERIMENTS:
        raise UsageError(
            f"unknown experiment {experiment!r}; known: {', '.join(experiment_names())}"
        )
    if replicates < 1:
        raise DomainError("replicate count must be >= 1")
    fn, columns = _EXPERIMENTS[experiment]
    if threads is None:
        threads = max(1, int(os.environ.get("THRESHNET_THREADS", "1")))

    rows: list = [None] * replicates

    def work(i: int) -> None:
        rows[i] = fn(params, make_stream(master_seed, i))

    if threads == 1:
        for i in range(replicates):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(replicates)))

    samples = np.asarray(rows, dtype=float)
    if samples.ndim == 1:
        mean, var, se = _column_moments(samples)
    else:
        stats = [_column_moments(samples[:, j]) for j in range(samples.shape[1])]
        mean = [s[0] for s in stats]
        var = [s[1] for s in stats]
        se = [s[2] for s in stats]
    return ReplicateReport(
        experiment=experiment,
        config=dict(params),
        seed=master_seed,
        replicates=replicates,
        columns=columns,
        samples=samples,
        mean=mean,
        variance=var,
        stderr=se,
    )


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


def ks_statistic(samples, cdf) -> float:
    """Sup distance between the sample ECDF and a reference CDF.

    Both one-sided gaps are evaluated at each sorted sample point, so the
    supremum over the full line is attained exactly.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise DomainError("ks_statistic requires a nonempty sample")
    fvals = np.asarray([cdf(float(x)) for x in xs], dtype=float)
    i = np.arange(1, n + 1, dtype=float)
    d_plus = np.max(i / n - fvals)
    d_minus = np.max(fvals - (i - 1.0) / n)
    return float(max(d_plus, d_minus, 0.0))


def ks_two_sample(a, b) -> float:
    """Sup distance between two sample ECDFs (exact for tied/discrete data)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("ks_two_sample requires nonempty samples")
    grid = np.union1d(a, b)
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def kolmogorov_sf(t: float) -> float:
    """Upper tail of the Kolmogorov distribution, P(sup|B(F)| > t)."""
    if t <= 0.0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * t * t)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


# ---------------------------------------------------------------------------
# chi-square goodness of fit


def _gamma_upper_reg(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) to ~1e-14 absolute.

    Series for P(a,x) when x < a + 1, Lentz continued fraction for Q(a,x)
    otherwise.
    """
    if a <= 0.0 or x < 0.0:
        raise DomainError("gamma tail requires a > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    lg = math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        n = a
        for _ in range(1000):
            n += 1.0
            term *= x / n
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        p = total * math.exp(-x + a * math.log(x) - lg)
        return max(0.0, min(1.0, 1.0 - p))
    # modified Lentz for the continued fraction of Q
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = h * math.exp(-x + a * math.log(x) - lg)
    return max(0.0, min(1.0, q))


def chi_square_gof(observed, probs, min_expected: float = 5.0):
    """Pearson chi-square test of counts against cell probabilities.

    Starved cells are merged inward from both tails until every expected
    count reaches ``min_expected``; remaining starvation is an error.
    Returns ``(statistic, dof, p_value)`` with ``dof = cells - 1``.
    """
    obs = [float(o) for o in observed]
    prb = [float(p) for p in probs]
    if len(obs) != len(prb) or len(obs) < 2:
        raise DomainError("observed and probs must have equal length >= 2")
    if abs(math.fsum(prb) - 1.0) > 1e-9:
        raise DomainError("cell probabilities must sum to 1")
    n = math.fsum(obs)
    while len(obs) > 1 and n * prb[-1] < min_expected:
        obs[-2] += obs[-1]
        prb[-2] += prb[-1]
        del obs[-1], prb[-1]
    while len(obs) > 1 and n * prb[0] < min_expected:
        obs[1] += obs[0]
        prb[1] += prb[0]
        del obs[0], prb[0]
    expected = [n * p for p in prb]
    if any(e < min_expected for e in expected) or len(obs) < 2:
        raise DomainError(
            f"cell starvation: {len(obs)} cells left with an expected count "
            f"below {min_expected}"
        )
    stat = math.fsum((o - e) ** 2 / e for o, e in zip(obs, expected))
    dof = len(obs) - 1
    return stat, dof, _gamma_upper_reg(dof / 2.0, stat / 2.0)


# ---------------------------------------------------------------------------
# reference laws


def normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def poisson_pmf(mean: float, k: int) -> float:
    """Poisson probability mass, evaluated in log space."""
    if mean < 0.0:
        raise DomainError("poisson mean must be >= 0")
    if k < 0:
        return 0.0
    if mean == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1.0))


def poisson_tail_cutoff(mean: float, eps: float = 1e-10) -> int:
    """Smallest K with P(Poisson(mean) > K) < eps."""
    if mean < 0.0:
        raise DomainError("poisson mean must be >= 0")
    if mean == 0.0:
        return 0
    k = 0
    term = math.exp(-mean)
    cum = term
    cap = int(mean + 20.0 * math.sqrt(mean) + 200.0)
    while cum < 1.0 - eps and k < cap:
        k += 1
        term *= mean / k
        cum += term
    return k
