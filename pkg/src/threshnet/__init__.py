"""threshnet: simulator and statistical verification toolkit for threshold
random graphs (edge iff the two endpoint weights sum above a threshold) and
their spatial Poisson extension."""

from . import dist, errors, graph, limits, motifs, spatial, stats  # noqa: F401

__version__ = "0.1.0"
