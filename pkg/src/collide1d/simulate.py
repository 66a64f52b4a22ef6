"""Event-driven simulation of the linear binary collision rule.

An approaching adjacent pair (v_left > v_right) collides and leaves with

    v_left'  = (1 - eps) * v_right + beta * v_left
    v_right' = (1 - eps) * v_left  + beta * v_right

so eps = 0, beta = 0 is the elastic exchange.  Labels keep their physical
order: particles never pass through each other, so only position-adjacent
pairs can ever collide and the spatial order is fixed for the whole run.
The loop keeps a binary heap of candidate adjacent-pair collision times
with lazy invalidation via per-pair version counters; each collision
refreshes at most three candidates.

For eps < 1 every run reaches quiescence: the terminal velocities read in
position order are strictly increasing.  A safety cap on the event count
guards the degenerate corners of the rule (it never fires for valid input
in the studied eps range).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from collide1d.elastic import ParticleEnsemble

# an approach speed below this is treated as non-colliding (denormal guard)
_MIN_APPROACH = 1e-300


class NonterminationError(RuntimeError):
    """Event count exceeded the safety cap; dynamics suspected divergent."""


@dataclass(frozen=True)
class CollisionRule:
    """Collision parameters: eps < 1 strictly; beta >= 0 (experiments use 0)."""

    epsilon: float
    beta: float = 0.0

    def __post_init__(self):
        if not self.epsilon < 1.0:
            raise ValueError("epsilon must be strictly below 1")
        if self.beta < 0.0:
            raise ValueError("beta must be non-negative")

    def apply(self, v_left: float, v_right: float) -> tuple[float, float]:
        """Post-collision velocities of an approaching (left, right) pair."""
        return (
            (1.0 - self.epsilon) * v_right + self.beta * v_left,
            (1.0 - self.epsilon) * v_left + self.beta * v_right,
        )

    def default_cap(self, n: int) -> int:
        factor = max(1, math.ceil(1.0 / (1.0 - abs(self.epsilon))))
        return 10 * n * n * factor


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    left_index: int
    right_index: int
    pre_velocities: tuple[float, float]
    post_velocities: tuple[float, float]


@dataclass(frozen=True)
class SimulationOutcome:
    """Full collision log plus per-particle and system summaries."""

    event_times: np.ndarray
    event_left: np.ndarray
    event_right: np.ndarray
    pre_left: np.ndarray
    pre_right: np.ndarray
    post_left: np.ndarray
    post_right: np.ndarray
    per_particle_final: np.ndarray      # 0.0 for particles that never collide
    system_final: float                 # 0.0 if there are no events
    collisions_per_particle: np.ndarray
    terminal_velocities: np.ndarray     # indexed by particle label
    _events: list = field(default=None, repr=False, compare=False)

    @property
    def n_events(self) -> int:
        return self.event_times.size

    @property
    def events(self) -> list[CollisionEvent]:
        if self._events is None:
            evs = [
                CollisionEvent(
                    float(self.event_times[k]),
                    int(self.event_left[k]),
                    int(self.event_right[k]),
                    (float(self.pre_left[k]), float(self.pre_right[k])),
                    (float(self.post_left[k]), float(self.post_right[k])),
                )
                for k in range(self.n_events)
            ]
            object.__setattr__(self, "_events", evs)
        return self._events


@njit(cache=True)
def _heap_push(ht, hid, hslot, hver, size, t, pid, slot, ver):
    i = size
    ht[i] = t
    hid[i] = pid
    hslot[i] = slot
    hver[i] = ver
    while i > 0:
        p = (i - 1) >> 1
        if ht[p] < ht[i] or (ht[p] == ht[i] and hid[p] <= hid[i]):
            break
        ht[p], ht[i] = ht[i], ht[p]
        hid[p], hid[i] = hid[i], hid[p]
        hslot[p], hslot[i] = hslot[i], hslot[p]
        hver[p], hver[i] = hver[i], hver[p]
        i = p
    return size + 1


@njit(cache=True)
def _heap_pop(ht, hid, hslot, hver, size):
    last = size - 1
    ht[0], ht[last] = ht[last], ht[0]
    hid[0], hid[last] = hid[last], hid[0]
    hslot[0], hslot[last] = hslot[last], hslot[0]
    hver[0], hver[last] = hver[last], hver[0]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= last:
            break
        r = l + 1
        c = l
        if r < last and (ht[r] < ht[l] or (ht[r] == ht[l] and hid[r] < hid[l])):
            c = r
        if ht[i] < ht[c] or (ht[i] == ht[c] and hid[i] <= hid[c]):
            break
        ht[c], ht[i] = ht[i], ht[c]
        hid[c], hid[i] = hid[i], hid[c]
        hslot[c], hslot[i] = hslot[i], hslot[c]
        hver[c], hver[i] = hver[i], hver[c]
        i = c
    return size - 1


@njit(cache=True)
def _event_loop(x, v, eps, beta, cap):
    n = x.size
    order = np.argsort(x)

    x0 = x.copy()
    t0 = np.zeros(n)
    vel = v.copy()

    nslots = n - 1
    version = np.zeros(nslots, dtype=np.int64)

    hcap = nslots + 3 * cap + 8
    ht = np.empty(hcap)
    hid = np.empty(hcap, dtype=np.int64)
    hslot = np.empty(hcap, dtype=np.int64)
    hver = np.empty(hcap, dtype=np.int64)
    hsize = 0

    et = np.empty(cap)
    ea = np.empty(cap, dtype=np.int64)
    eb = np.empty(cap, dtype=np.int64)
    evla = np.empty(cap)
    evlb = np.empty(cap)
    epla = np.empty(cap)
    eplb = np.empty(cap)

    last = np.zeros(n)
    cnt = np.zeros(n, dtype=np.int64)

    for s in range(nslots):
        p = order[s]
        q = order[s + 1]
        w = vel[p] - vel[q]
        if w > _MIN_APPROACH:
            tc = ((x0[q] - vel[q] * t0[q]) - (x0[p] - vel[p] * t0[p])) / w
            if tc < 0.0:
                tc = 0.0
            hsize = _heap_push(ht, hid, hslot, hver, hsize, tc, p, s, version[s])

    nev = 0
    status = 0
    while hsize > 0:
        tcur = ht[0]
        s = hslot[0]
        ver = hver[0]
        hsize = _heap_pop(ht, hid, hslot, hver, hsize)
        if ver != version[s]:
            continue

        a = order[s]
        b = order[s + 1]
        va = vel[a]
        vb = vel[b]
        pa = x0[a] + (tcur - t0[a]) * va
        pb = x0[b] + (tcur - t0[b]) * vb
        van = (1.0 - eps) * vb + beta * va
        vbn = (1.0 - eps) * va + beta * vb
        x0[a] = pa
        t0[a] = tcur
        vel[a] = van
        x0[b] = pb
        t0[b] = tcur
        vel[b] = vbn

        if nev >= cap:
            status = 1
            break
        et[nev] = tcur
        ea[nev] = a
        eb[nev] = b
        evla[nev] = va
        evlb[nev] = vb
        epla[nev] = van
        eplb[nev] = vbn
        nev += 1
        last[a] = tcur
        last[b] = tcur
        cnt[a] += 1
        cnt[b] += 1

        lo = s - 1 if s > 0 else s
        hi = s + 1 if s < nslots - 1 else s
        for sn in range(lo, hi + 1):
            version[sn] += 1
            p = order[sn]
            q = order[sn + 1]
            w = vel[p] - vel[q]
            if w > _MIN_APPROACH:
                tc = ((x0[q] - vel[q] * t0[q]) - (x0[p] - vel[p] * t0[p])) / w
                if tc < tcur:
                    tc = tcur
                hsize = _heap_push(ht, hid, hslot, hver, hsize, tc, p, sn, version[sn])

    return status, nev, et, ea, eb, evla, evlb, epla, eplb, last, cnt, vel


def simulate(
    ensemble: ParticleEnsemble,
    rule: CollisionRule,
    max_events: int | None = None,
) -> SimulationOutcome:
    """Run the dynamics from t = 0 until no further collision is possible."""
    cap = rule.default_cap(ensemble.n) if max_events is None else int(max_events)
    status, nev, et, ea, eb, evla, evlb, epla, eplb, last, cnt, vel = _event_loop(
        ensemble.positions, ensemble.velocities, rule.epsilon, rule.beta, cap
    )
    if status != 0:
        raise NonterminationError(
            f"event count exceeded the safety cap ({cap}); "
            f"eps={rule.epsilon}, beta={rule.beta}, N={ensemble.n}"
        )
    sl = slice(0, nev)
    return SimulationOutcome(
        event_times=et[sl].copy(),
        event_left=ea[sl].copy(),
        event_right=eb[sl].copy(),
        pre_left=evla[sl].copy(),
        pre_right=evlb[sl].copy(),
        post_left=epla[sl].copy(),
        post_right=eplb[sl].copy(),
        per_particle_final=last,
        system_final=float(et[nev - 1]) if nev else 0.0,
        collisions_per_particle=cnt,
        terminal_velocities=vel,
    )


def time_reverse_rule(rule: CollisionRule) -> CollisionRule:
    """Exact inverse-dynamics parameter: eps -> 1 - 1/(1 - eps).

    Backward-time statistics of (ensemble, eps) are those of the ensemble
    with negated velocities run under the returned rule, with event times
    negated.  Only defined for beta = 0.
    """
    if rule.beta != 0.0:
        raise ValueError("time reversal is only defined for beta = 0")
    return CollisionRule(1.0 - 1.0 / (1.0 - rule.epsilon))


def positive_collision_fraction(outcome: SimulationOutcome, n: int) -> np.ndarray:
    """Per-particle fraction of its N-1 path intersections at positive time."""
    if n < 2:
        raise ValueError("need at least two particles")
    return outcome.collisions_per_particle / (n - 1)


def dump_events(outcome: SimulationOutcome, path) -> None:
    """Write the collision log as CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "event_index",
                "time",
                "left",
                "right",
                "v_left_pre",
                "v_right_pre",
                "v_left_post",
                "v_right_post",
            ]
        )
        for k in range(outcome.n_events):
            w.writerow(
                [
                    k,
                    repr(float(outcome.event_times[k])),
                    int(outcome.event_left[k]),
                    int(outcome.event_right[k]),
                    repr(float(outcome.pre_left[k])),
                    repr(float(outcome.pre_right[k])),
                    repr(float(outcome.post_left[k])),
                    repr(float(outcome.post_right[k])),
                ]
            )
