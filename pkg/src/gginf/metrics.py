"""Occupancy and busy/idle period statistics of a state trajectory."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .trajectory import ARRIVAL, Trajectory


@dataclass
class OccupancyStats:
    visits: np.ndarray          # NO(k), indexed by state k = 0..max
    total_sojourn: np.ndarray   # T(k)

    @property
    def states(self) -> np.ndarray:
        return np.arange(len(self.visits))

    @property
    def mean_sojourn(self) -> np.ndarray:
        # TM(k) = T(k)/NO(k); unvisited states report 0 as the original program did
        out = np.zeros(len(self.visits))
        seen = self.visits > 0
        out[seen] = self.total_sojourn[seen] / self.visits[seen]
        return out

    @property
    def total_time(self) -> float:
        return float(self.total_sojourn.sum())

    @property
    def pmf(self) -> np.ndarray:
        total = self.total_time
        if total <= 0:
            return np.zeros(len(self.visits))
        return self.total_sojourn / total

    @property
    def mean_in_system(self) -> float:
        return float(np.dot(self.states, self.pmf))

    @property
    def mode(self) -> int:
        return int(np.argmax(self.total_sojourn))

    def to_dict(self) -> dict:
        return {
            "visits": [int(v) for v in self.visits],
            "total_sojourn": [float(t) for t in self.total_sojourn],
            "mean_sojourn": [float(t) for t in self.mean_sojourn],
            "pmf": [float(p) for p in self.pmf],
            "mean_in_system": self.mean_in_system,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OccupancyStats":
        return cls(np.asarray(d["visits"], dtype=np.int64), np.asarray(d["total_sojourn"], dtype=np.float64))


@dataclass(frozen=True)
class BusyPeriodRecord:
    index: int
    start: float
    length: float
    customers_served: int   # Y
    max_simultaneous: int   # X
    censored: bool = False

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "start": self.start,
            "length": self.length,
            "customers_served": self.customers_served,
            "max_simultaneous": self.max_simultaneous,
            "censored": self.censored,
        }


@dataclass(frozen=True)
class IdleStats:
    count: int
    total: float

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    def to_dict(self) -> dict:
        return {"count": self.count, "total": self.total, "mean": self.mean}


def occupancy(traj: Trajectory) -> OccupancyStats:
    k = traj.segment_states
    size = traj.max_state + 1
    visits = np.bincount(k, minlength=size)
    totals = np.bincount(k, weights=traj.durations, minlength=size)
    return OccupancyStats(visits.astype(np.int64), totals.astype(np.float64))


def pool_occupancy(stats: Sequence[OccupancyStats]) -> OccupancyStats:
    """Time-weighted pooling: visits and sojourn totals add state by state."""
    size = max(len(s.visits) for s in stats)
    visits = np.zeros(size, dtype=np.int64)
    totals = np.zeros(size)
    for s in stats:
        visits[: len(s.visits)] += s.visits
        totals[: len(s.total_sojourn)] += s.total_sojourn
    return OccupancyStats(visits, totals)


def idle_durations(traj: Trajectory) -> np.ndarray:
    return traj.durations[traj.segment_states == 0]


def segment_busy_periods(traj: Trajectory) -> tuple[list[BusyPeriodRecord], IdleStats]:
    states, times = traj.states, traj.times
    n = len(states)
    ends = np.flatnonzero(states == 0)
    starts = np.concatenate([[0], ends[:-1] + 1]).astype(np.int64) if len(ends) else np.zeros(0, np.int64)
    open_tail = traj.final_state != 0
    if open_tail:
        tail_start = ends[-1] + 1 if len(ends) else 0
        starts = np.append(starts, tail_start)
        ends = np.append(ends, n - 1)

    records: list[BusyPeriodRecord] = []
    if len(starts):
        x = np.maximum.reduceat(states, starts)
        y = np.add.reduceat((traj.marks == ARRIVAL).astype(np.int64), starts)
        lengths = times[ends] - times[starts]
        if open_tail:
            lengths[-1] = traj.end_time - times[starts[-1]]
        last = len(starts) - 1
        for i in range(len(starts)):
            records.append(
                BusyPeriodRecord(
                    index=i + 1,
                    start=float(times[starts[i]]),
                    length=float(lengths[i]),
                    customers_served=int(y[i]),
                    max_simultaneous=int(x[i]),
                    censored=bool(open_tail and i == last),
                )
            )
    idle = idle_durations(traj)
    return records, IdleStats(int(len(idle)), float(idle.sum()))


def mean_busy_period(records: Sequence[BusyPeriodRecord]) -> float:
    if not records:
        raise ValueError("no busy periods to average")
    return math.fsum(r.length for r in records) / len(records)


def histogram(values, bin_width: float) -> list[tuple[float, int]]:
    """Contiguous ``[start, start + width)`` bins spanning the data, empty bins included."""
    if not bin_width > 0:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return []
    idx = np.floor(v / bin_width).astype(np.int64)
    lo = int(idx.min())
    counts = np.bincount(idx - lo)
    return [((lo + i) * bin_width, int(c)) for i, c in enumerate(counts)]


def value_counts(values) -> dict[int, int]:
    vals, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}
