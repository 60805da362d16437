"""Departures, the merged +1/-1 event stream, and the state path N(t)."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .errors import TrajectoryError

ARRIVAL = 1
DEPARTURE = -1


@dataclass(frozen=True)
class EventStream:
    times: np.ndarray
    marks: np.ndarray
    n_arrivals: int
    end_time: Optional[float] = None   # observation end, when later than the last event

    def __len__(self) -> int:
        return len(self.times)

    @property
    def complete(self) -> bool:
        """True when every arrival in the stream also departs within it."""
        return int(self.marks.sum()) == 0


class Segment(NamedTuple):
    state: int
    start: float
    duration: float


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-constant N(t) sampled at event instants.

    ``states[i]`` is the number in system just after event ``i``; it holds
    on ``[times[i], times[i+1])``. The window closes at the last event
    unless ``end`` extends it; a state with no duration inside the window
    is not a segment.
    """

    times: np.ndarray
    marks: np.ndarray
    states: np.ndarray
    end: Optional[float] = None

    @property
    def _open(self) -> bool:
        return self.end is not None and self.end > self.times[-1]

    @property
    def durations(self) -> np.ndarray:
        if self._open:
            return np.diff(np.append(self.times, self.end))
        return np.diff(self.times)

    @property
    def segment_states(self) -> np.ndarray:
        return self.states if self._open else self.states[:-1]

    @property
    def end_time(self) -> float:
        return float(self.end) if self._open else float(self.times[-1])

    @property
    def max_state(self) -> int:
        return int(self.states.max()) if len(self.states) else 0

    @property
    def window(self) -> float:
        return self.end_time - float(self.times[0]) if len(self.times) else 0.0

    @property
    def final_state(self) -> int:
        return int(self.states[-1])

    def segments(self) -> Iterator[Segment]:
        for k, start, dur in zip(self.segment_states, self.times, self.durations):
            yield Segment(int(k), float(start), float(dur))

    def __len__(self) -> int:
        return len(self.segment_states)


def build_departures(arrival_times, service_times) -> np.ndarray:
    a = np.asarray(arrival_times, dtype=np.float64)
    s = np.asarray(service_times, dtype=np.float64)
    if a.shape != s.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} arrivals, {s.shape[0]} service times")
    if np.any(~(s > 0)):
        raise ValueError("service times must be strictly positive")
    if np.any(np.diff(a) < 0):
        raise ValueError("arrival times must be non-decreasing")
    return a + s


def arrival_times_from_gaps(gaps) -> np.ndarray:
    # running sum, first arrival at the first gap
    return np.cumsum(np.asarray(gaps, dtype=np.float64))


def merge_events(arrivals, departures) -> EventStream:
    """Sort all instants; departures precede arrivals at equal timestamps."""
    a = np.asarray(arrivals, dtype=np.float64)
    d = np.asarray(departures, dtype=np.float64)
    if a.shape != d.shape:
        raise ValueError("arrivals and departures must have equal length")
    times = np.concatenate([a, d])
    marks = np.concatenate([np.full(a.shape, ARRIVAL, np.int8), np.full(d.shape, DEPARTURE, np.int8)])
    order = np.lexsort((marks, times))
    return EventStream(times[order], marks[order], int(a.shape[0]))


def truncate(stream: EventStream, end_time: float) -> EventStream:
    """Keep events at or before ``end_time``; the result may end with customers in service."""
    keep = stream.times <= end_time
    marks = stream.marks[keep]
    return EventStream(stream.times[keep], marks, int((marks == ARRIVAL).sum()), float(end_time))


def build_trajectory(stream: EventStream) -> Trajectory:
    if len(stream) == 0:
        raise TrajectoryError("empty event stream")
    states = np.cumsum(stream.marks, dtype=np.int64)
    if states.min() < 0:
        bad = int(np.argmax(states < 0))
        raise TrajectoryError(f"state went negative at event {bad} (t={stream.times[bad]!r})")
    return Trajectory(stream.times, stream.marks, states, stream.end_time)


def simulate_trajectory(gaps, services) -> Trajectory:
    arrivals = arrival_times_from_gaps(gaps)
    return build_trajectory(merge_events(arrivals, build_departures(arrivals, services)))


def write_trace(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "mark", "state"])
        for t, m, k in zip(traj.times, traj.marks, traj.states):
            w.writerow([repr(float(t)), int(m), int(k)])
