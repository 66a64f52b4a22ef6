"""Exact elastic intersection times and their order statistics.

With elastic collisions the labelled trajectories are straight lines, so
every collision time is a line-crossing time

    tau_ij = (x_j - x_i) / (v_i - v_j),

and the per-particle / system final times are row and global maxima of the
pair array.  Everything here is computed directly from the initial data in
O(N^2) time and O(N) extra space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateVelocityError(ValueError):
    """Two particles share a velocity; crossing times are undefined."""


class DegenerateEnsembleError(ValueError):
    """Initial positions or velocities are not pairwise distinct."""


class NotYetSortedError(ValueError):
    """Requested state at a time before the final collision."""


@dataclass(frozen=True)
class ParticleEnsemble:
    """Initial positions and velocities of N >= 2 point particles."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        v = np.asarray(self.velocities, dtype=float)
        if x.ndim != 1 or v.shape != x.shape:
            raise ValueError("positions and velocities must be equal-length 1-D arrays")
        if x.size < 2:
            raise ValueError("an ensemble needs at least two particles")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("non-finite initial data")
        if np.unique(x).size != x.size:
            raise DegenerateEnsembleError("positions are not pairwise distinct")
        if np.unique(v).size != v.size:
            raise DegenerateEnsembleError("velocities are not pairwise distinct")
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "velocities", v)

    @property
    def n(self) -> int:
        return self.positions.size


@dataclass(frozen=True)
class ElasticOrderStats:
    """Row maxima, global maximum and global minimum of the pair-time array."""

    per_particle_final: np.ndarray  # t_i, length N
    system_final: float             # max over all pairs
    system_min: float               # min over all pairs

    @property
    def pair_count(self) -> int:
        n = self.per_particle_final.size
        return n * (n - 1) // 2


def pair_time(ensemble: ParticleEnsemble, i: int, j: int) -> float:
    """Crossing time of trajectories i and j; may be negative."""
    if i == j:
        raise ValueError("pair_time requires two distinct indices")
    x, v = ensemble.positions, ensemble.velocities
    dv = v[i] - v[j]
    if dv == 0.0:
        raise DegenerateVelocityError(f"particles {i} and {j} share a velocity")
    return float((x[j] - x[i]) / dv)


def order_stats(ensemble: ParticleEnsemble) -> ElasticOrderStats:
    """Per-particle final times, system final time, and system minimum."""
    x, v = ensemble.positions, ensemble.velocities
    n = x.size
    finals = np.empty(n)
    lo = np.inf
    for i in range(n):
        dx = np.delete(x - x[i], i)
        dv = np.delete(v[i] - v, i)
        tau = dx / dv
        finals[i] = tau.max()
        lo = min(lo, tau.min())
    return ElasticOrderStats(finals, float(finals.max()), float(lo))


def pair_times_upper(ensemble: ParticleEnsemble) -> np.ndarray:
    """All N(N-1)/2 unordered pair times as a flat array (test oracle)."""
    x, v = ensemble.positions, ensemble.velocities
    iu, ju = np.triu_indices(x.size, k=1)
    return (x[ju] - x[iu]) / (v[iu] - v[ju])


def sorted_final_state(ensemble: ParticleEnsemble, t: float) -> list[tuple[float, float]]:
    """Free-flight state at a time t past the final collision.

    Returns (position, velocity) pairs ordered by position; velocities come
    out strictly increasing, which is exactly what "no further collisions"
    means.
    """
    stats = order_stats(ensemble)
    if t <= stats.system_final:
        raise NotYetSortedError(
            f"t={t} is not past the final collision time {stats.system_final}"
        )
    pos = ensemble.positions + t * ensemble.velocities
    idx = np.argsort(pos)
    return [(float(pos[k]), float(ensemble.velocities[k])) for k in idx]


def exceedance_count(ensemble: ParticleEnsemble, z: float) -> int:
    """Number of unordered pairs whose crossing time exceeds z."""
    x, v = ensemble.positions, ensemble.velocities
    n = x.size
    count = 0
    for i in range(n - 1):
        dx = x[i + 1:] - x[i]
        dv = v[i] - v[i + 1:]
        count += int(np.count_nonzero(dx / dv > z))
    return count


# ---------------------------------------------------------------------------
# batched trial helpers (used by the experiment harness)
# ---------------------------------------------------------------------------

def batch_pair_times(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Pair-time tensor (B, N, N) for a batch of trials; diagonal is NaN."""
    dx = X[:, None, :] - X[:, :, None]
    dv = V[:, :, None] - V[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = dx / dv
    return tau


def batch_system_final(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    """System final times for a batch: max pair time per trial."""
    tau = batch_pair_times(X, V)
    return np.nanmax(tau.reshape(tau.shape[0], -1), axis=1)


def batch_system_extrema(X: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(max, min) pair time per trial in a batch."""
    tau = batch_pair_times(X, V).reshape(X.shape[0], -1)
    return np.nanmax(tau, axis=1), np.nanmin(tau, axis=1)


def batch_row_final(X: np.ndarray, V: np.ndarray, row: int = 0) -> np.ndarray:
    """Final time of one labelled particle per trial: max_j tau_{row,j}."""
    mask = np.arange(X.shape[1]) != row
    dx = X[:, mask] - X[:, row, None]
    dv = V[:, row, None] - V[:, mask]
    return np.max(dx / dv, axis=1)


def batch_exceedance_count(X: np.ndarray, V: np.ndarray, z: float) -> np.ndarray:
    """Per-trial count of unordered pairs with crossing time above z."""
    tau = batch_pair_times(X, V)
    n = X.shape[1]
    iu, ju = np.triu_indices(n, k=1)
    return np.count_nonzero(tau[:, iu, ju] > z, axis=1)
