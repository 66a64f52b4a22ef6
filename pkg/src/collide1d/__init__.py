"""Collision-time statistics for a one-dimensional gas of point particles.

Subpackages:
    distributions -- initial-condition laws and reproducible sampling
    elastic       -- exact elastic intersection times and order statistics
    simulate      -- event-driven simulation of the general collision rule
    limits        -- asymptotic limit laws and their constants
    stats         -- ECDFs, sup distances, bootstrap medians, regressions
    experiments   -- Monte Carlo experiment harness
    cli           -- command-line entry point
"""

from collide1d.distributions import DistributionSpec, SeedSpec, density, cdf, sample
from collide1d.elastic import ParticleEnsemble, ElasticOrderStats, pair_time, order_stats
from collide1d.simulate import CollisionRule, SimulationOutcome, simulate, time_reverse_rule
from collide1d.limits import LawKind, LimitLaw

__all__ = [
    "DistributionSpec",
    "SeedSpec",
    "density",
    "cdf",
    "sample",
    "ParticleEnsemble",
    "ElasticOrderStats",
    "pair_time",
    "order_stats",
    "CollisionRule",
    "SimulationOutcome",
    "simulate",
    "time_reverse_rule",
    "LawKind",
    "LimitLaw",
]

__version__ = "0.1.0"
