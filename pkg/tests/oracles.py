"""Brute-force references computed straight from (arrival, departure) pairs.

Nothing here touches the event-merge or prefix-sum code paths; instances are
assumed tie-free (continuous random times).
"""
from collections import defaultdict


def count_in_system(pairs, t):
    return sum(1 for a, d in pairs if a <= t < d)


def event_times(pairs):
    return sorted({a for a, _ in pairs} | {d for _, d in pairs})


def state_path(pairs):
    """(start, end, state) for every interval between consecutive event instants."""
    ts = event_times(pairs)
    out = []
    for lo, hi in zip(ts, ts[1:]):
        out.append((lo, hi, count_in_system(pairs, lo + (hi - lo) / 2)))
    return out


def occupancy(pairs):
    visits = defaultdict(int)
    totals = defaultdict(float)
    for lo, hi, k in state_path(pairs):
        visits[k] += 1
        totals[k] += hi - lo
    return dict(visits), dict(totals)


def busy_periods(pairs):
    """Merge overlapping service intervals; returns (records, idle durations).

    Each record is (start, length, customers, max simultaneous).
    """
    groups = []
    for a, d in sorted(pairs):
        if groups and a < groups[-1][1]:
            g = groups[-1]
            g[1] = max(g[1], d)
            g[2].append((a, d))
        else:
            groups.append([a, d, [(a, d)]])
    records = []
    for start, end, members in groups:
        peak = max(count_in_system(members, a) for a, _ in members)
        records.append((start, end - start, len(members), peak))
    idle = [nxt[0] - cur[1] for cur, nxt in zip(groups, groups[1:])]
    return records, idle
