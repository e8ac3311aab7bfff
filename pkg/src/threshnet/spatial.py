"""Spatial extension: Poisson points in a d-ball with threshold-in-distance
edges to the origin.

A point at distance s connects to the origin (weight x) iff
``x + X > theta * s**beta``, so the origin's degree inside radius r is, given
x, Poisson with parameter ``lam * surface_d * integral_0^r s**(d-1) *
(1 - F(theta * s**beta - x)) ds`` (thinning).  The mixture sampler draws the
degree directly from that law; the direct sampler materializes the point
cloud.  Both are distributionally identical, and the mixture path is O(1) in
the radius.

Only the radial coordinate of a point ever enters the connection rule, so
the direct sampler draws radii (``r * U**(1/d)``) and never materializes
directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dist import WeightDistribution, expectation, parse_dist, quad_checked
from .errors import CapacityError, DomainError, RegimeError
from .stats import poisson_pmf, register_experiment

DIRECT_POINT_CAP = 100_000_000


@dataclass(frozen=True)
class SpatialConfig:
    """Dimension, distance exponent, threshold, intensity, ball radius."""

    d: int
    beta: float
    theta: float
    lam: float
    r: float

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError("dimension d must be 1, 2 or 3")
        if not self.lam > 0.0:
            raise DomainError("intensity lam must be > 0")
        if not self.r > 0.0:
            raise DomainError("radius r must be > 0")


def sphere_surface(d: int) -> float:
    """Surface measure of the unit sphere in d dimensions.

    This is the polar-coordinate factor: integrating it against
    ``s**(d-1) ds`` gives the ball volume.
    """
    if d not in (1, 2, 3):
        raise DomainError("dimension d must be 1, 2 or 3")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ball_volume(d: int, r: float) -> float:
    return sphere_surface(d) * r**d / d


def radial_intensity(
    cfg: SpatialConfig, dist: WeightDistribution, x: float, r: float | None = None
) -> float:
    """The radial integral C_r(x) = int_0^r s**(d-1) (1 - F(theta s**beta - x)) ds.

    ``r`` defaults to the config radius and may be ``inf`` for the limiting
    value.  For bounded-support laws the integrand vanishes beyond the cutoff
    radius ``((sup support + x) / theta)**(1/beta)``, which is split (or used
    to truncate) exactly.
    """
    if r is None:
        r = cfg.r
    if not r > 0.0:
        raise DomainError("radius must be > 0")
    return _radial_intensity_cached(cfg.d, cfg.beta, cfg.theta, dist, float(x), float(r))


@lru_cache(maxsize=65536)
def _radial_intensity_cached(
    d: int, beta: float, theta: float, dist: WeightDistribution, x: float, r: float
) -> float:
    def integrand(s: float) -> float:
        return s ** (d - 1) * (1.0 - dist.cdf(theta * s**beta - x))

    upper = r
    breakpoints = []
    if theta > 0.0 and beta > 0.0:
        lo_s, hi_s = dist.support()
        if math.isfinite(hi_s):
            cut = hi_s + x
            upper = min(upper, (cut / theta) ** (1.0 / beta)) if cut > 0.0 else 0.0
        flat = lo_s + x  # below this radius the integrand is s**(d-1) exactly
        if flat > 0.0:
            breakpoints.append((flat / theta) ** (1.0 / beta))
        if dist.is_discrete:
            # the survival factor jumps where theta * s**beta - x crosses an atom
            for atom, _ in dist.atoms():
                if atom + x > 0.0:
                    breakpoints.append(((atom + x) / theta) ** (1.0 / beta))
    if upper <= 0.0:
        return 0.0
    if math.isinf(upper):
        split = max([1.0] + [b for b in breakpoints if math.isfinite(b)])
        head = quad_checked(integrand, 0.0, split, points=breakpoints)
        tail = quad_checked(integrand, split, math.inf)
        return max(0.0, head + tail)
    return max(0.0, quad_checked(integrand, 0.0, upper, points=breakpoints))


def sample_origin_degree_direct(
    cfg: SpatialConfig,
    dist: WeightDistribution,
    x0: float | None,
    stream: np.random.Generator,
    point_cap: float = DIRECT_POINT_CAP,
) -> int:
    """Origin degree by simulating the whole Poisson cloud in the ball."""
    expected_points = cfg.lam * ball_volume(cfg.d, cfg.r)
    if expected_points > point_cap:
        raise CapacityError(
            f"direct simulation needs ~{expected_points:.3g} points, over the "
            f"cap of {point_cap:.3g}; use the mixture sampler"
        )
    origin_weight = float(x0) if x0 is not None else dist.sample(stream)
    count = int(stream.poisson(expected_points))
    radii = cfg.r * stream.random(count) ** (1.0 / cfg.d)
    weights = dist.sample(stream, count)
    return int(np.count_nonzero(origin_weight + weights > cfg.theta * radii**cfg.beta))


def sample_origin_degree_mixture(
    cfg: SpatialConfig,
    dist: WeightDistribution,
    x0: float | None,
    stream: np.random.Generator,
) -> int:
    """Origin degree drawn from its exact conditional Poisson law."""
    origin_weight = float(x0) if x0 is not None else dist.sample(stream)
    mu = cfg.lam * sphere_surface(cfg.d) * radial_intensity(cfg, dist, origin_weight)
    return int(stream.poisson(mu))


def origin_degree_rate(cfg: SpatialConfig, dist: WeightDistribution, x: float) -> float:
    """Poisson parameter of the origin degree given the origin weight."""
    return cfg.lam * sphere_surface(cfg.d) * radial_intensity(cfg, dist, x)


def _require_finite_limit(cfg: SpatialConfig, dist: WeightDistribution) -> None:
    if cfg.theta <= 0.0:
        raise RegimeError(
            "the limiting intensity integral diverges for theta <= 0"
        )
    if not dist.has_finite_abs_moment(cfg.d / cfg.beta):
        raise RegimeError(
            f"E[|X|**(d/beta)] = E[|X|**{cfg.d / cfg.beta:g}] is infinite, so "
            "the limit degree law does not exist; use the standardized CLT "
            "path with an explicit centering sequence instead"
        )


def origin_degree_pmf(cfg: SpatialConfig, dist: WeightDistribution, k: int) -> float:
    """Limiting origin-degree pmf: a mixed Poisson over the weight law."""
    if k < 0:
        raise DomainError("k must be >= 0")
    _require_finite_limit(cfg, dist)
    return expectation(
        dist,
        lambda x: poisson_pmf(
            cfg.lam * sphere_surface(cfg.d) * radial_intensity(cfg, dist, x, math.inf),
            k,
        ),
    )


def standardized_origin_degree(
    cfg: SpatialConfig,
    dist: WeightDistribution,
    centering: float,
    stream: np.random.Generator,
) -> float:
    """One sample of (degree - lam c_d Cr) / sqrt(lam c_d Cr).

    ``centering`` is the caller-supplied centering sequence value Cr (no
    general recipe exists; it is model-specific).
    """
    if not centering > 0.0:
        raise DomainError("centering must be > 0")
    scale = cfg.lam * sphere_surface(cfg.d) * centering
    delta = sample_origin_degree_mixture(cfg, dist, None, stream)
    return (delta - scale) / math.sqrt(scale)


# ---------------------------------------------------------------------------
# registered experiments


def _config_from_params(params: dict) -> tuple[SpatialConfig, WeightDistribution]:
    cfg = SpatialConfig(
        d=int(params["d"]),
        beta=float(params["beta"]),
        theta=float(params["theta"]),
        lam=float(params["lam"]),
        r=float(params["r"]),
    )
    return cfg, parse_dist(params["dist"])


@register_experiment("spatial")
def _spatial_experiment(params: dict, stream: np.random.Generator) -> float:
    cfg, dist = _config_from_params(params)
    x0 = params.get("x0")
    if params.get("mode", "mixture") == "direct":
        return float(sample_origin_degree_direct(cfg, dist, x0, stream))
    return float(sample_origin_degree_mixture(cfg, dist, x0, stream))


@register_experiment("clt")
def _clt_experiment(params: dict, stream: np.random.Generator) -> float:
    cfg, dist = _config_from_params(params)
    return standardized_origin_degree(cfg, dist, float(params["Cr"]), stream)
