import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from gginf.errors import TrajectoryError
from gginf.trajectory import (
    EventStream,
    build_departures,
    build_trajectory,
    merge_events,
    simulate_trajectory,
    truncate,
    write_trace,
)

ARR = [1.0, 2.0, 10.0]
SVC = [3.0, 0.5, 1.0]


def six_event():
    return build_trajectory(merge_events(ARR, build_departures(ARR, SVC)))


def test_build_departures():
    assert list(build_departures(ARR, SVC)) == [4.0, 2.5, 11.0]
    assert list(build_departures([0.0], [5.0])) == [5.0]


def test_departure_errors():
    with pytest.raises(ValueError, match="length"):
        build_departures([1, 2], [3])
    with pytest.raises(ValueError):
        build_departures([1, 2], [3, 0])


def test_merge_hand_sorted():
    s = merge_events(ARR, [4.0, 2.5, 11.0])
    assert list(s.times) == [1, 2, 2.5, 4, 10, 11]
    assert list(s.marks) == [1, 1, -1, -1, 1, -1]
    assert s.n_arrivals == 3 and s.complete


def test_tie_departure_first():
    # customer 1 leaves at t=5 exactly when customer 2 arrives
    s = merge_events([0.0, 5.0], [5.0, 7.0])
    assert list(s.marks) == [1, -1, 1, -1]
    traj = build_trajectory(s)
    assert traj.max_state == 1
    assert list(traj.states) == [1, 0, 1, 0]


def test_single_customer():
    traj = build_trajectory(merge_events([0.0], [5.0]))
    assert list(traj.segments()) == [(1, 0.0, 5.0)]


def test_six_event_trajectory():
    traj = six_event()
    assert list(traj.states) == [1, 2, 1, 0, 1, 0]
    assert list(traj.durations) == [1.0, 0.5, 1.5, 6.0, 1.0]
    assert traj.max_state == 2
    assert traj.window == 10.0


def test_negative_state_rejected():
    bad = EventStream(np.array([1.0, 2.0]), np.array([-1, 1], dtype=np.int8), 1)
    with pytest.raises(TrajectoryError):
        build_trajectory(bad)


def test_truncate_leaves_open_tail():
    s = truncate(merge_events(ARR, [4.0, 2.5, 11.0]), 10.5)
    assert not s.complete
    assert build_trajectory(s).final_state == 1


def test_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace(six_event(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "timestamp,mark,state"
    assert lines[1] == "1.0,1,1"
    assert len(lines) == 7


def random_instance(rng, max_n=20):
    n = int(rng.integers(1, max_n + 1))
    gaps = rng.exponential(1.0, n)
    services = rng.exponential(rng.uniform(0.5, 6.0), n)
    return gaps, services


def test_matches_grid_oracle(rng):
    for _ in range(300):
        gaps, services = random_instance(rng)
        traj = simulate_trajectory(gaps, services)
        arrivals = np.cumsum(gaps)
        pairs = list(zip(arrivals, arrivals + services))
        path = oracles.state_path(pairs)
        assert [k for _, _, k in path] == list(traj.segment_states)
        assert [hi - lo for lo, hi, _ in path] == list(traj.durations)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(0.01, 5.0), st.floats(0.01, 20.0)),
        min_size=1,
        max_size=30,
    )
)
def test_structural_invariants(customers):
    gaps, services = map(np.array, zip(*customers))
    traj = simulate_trajectory(gaps, services)
    n = len(gaps)
    assert (traj.marks == 1).sum() == n and (traj.marks == -1).sum() == n
    assert traj.states.min() >= 0 and traj.final_state == 0
    assert np.all(np.diff(traj.times) >= 0)
    assert set(np.abs(np.diff(traj.states))) <= {1}
    assert traj.durations.sum() == pytest.approx(traj.window, rel=1e-12, abs=1e-12)
    assert traj.max_state >= 1


def test_time_in_system_equals_service(rng):
    # no waiting: each customer's own arrival/departure pair is service apart
    for _ in range(50):
        gaps, services = random_instance(rng)
        arrivals = np.cumsum(gaps)
        departures = build_departures(arrivals, services)
        s = merge_events(arrivals, departures)
        for a, d, sv in zip(arrivals, departures, services):
            assert d - a == pytest.approx(sv, rel=1e-12)
            assert a in s.times and d in s.times
