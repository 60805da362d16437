"""Exit criteria. Each test appends one PASS/FAIL line to the terminal summary."""
import math

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from gginf.experiments import PRESETS, run_experiment
from gginf.metrics import occupancy, segment_busy_periods
from gginf.report import to_json
from gginf.theory import mg_inf_mean_busy_period, poisson_pmf, theoretical_mean_sojourn, total_variation
from gginf.trajectory import simulate_trajectory

SOJOURN_REL_TOL = 0.10
SOJOURN_MIN_VISITS = 200
TV_MAX = 0.05
IDLE_SIGMAS = 3.0
BUSY_REL_TOL = 0.15
ORDER_MIN_REPS = 9
X_P99_MAX = 16
R_MIN = 0.9
ORACLE_INSTANCES = 1000
ORACLE_MAX_CUSTOMERS = 20


def verdict(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def reports():
    return {name: run_experiment(cfg) for name, cfg in PRESETS.items()}


def test_1_mm_mean_sojourn(reports):
    r = reports["MM-rho4"]
    occ = r.pooled_occupancy
    ms = r.config["service_law"]["mean_service"]
    worst, worst_state, checked = 0.0, None, 0
    for i, (visits, observed) in enumerate(zip(occ.visits, occ.mean_sojourn)):
        if visits < SOJOURN_MIN_VISITS:
            continue
        checked += 1
        rel = abs(observed / theoretical_mean_sojourn(i, ms, r.rho) - 1.0)
        if rel > worst:
            worst, worst_state = rel, i
    verdict(1, "M/M/inf sojourn vs mu^-1/(i+rho)", checked > 0 and worst <= SOJOURN_REL_TOL,
            f"{checked} states with >= {SOJOURN_MIN_VISITS} visits, worst rel err {worst:.4f} at i={worst_state}")


def test_2_equilibrium_distribution(reports):
    r = reports["MM-rho4"]
    occ = r.pooled_occupancy
    theo = [poisson_pmf(n, r.rho) for n in range(max(len(occ.pmf), 40))]
    tv = total_variation(occ.pmf, theo)
    verdict(2, "M/M/inf number-in-system vs Poisson(rho)", tv < TV_MAX and occ.mode == 4,
            f"TV={tv:.5f} (< {TV_MAX}), empirical mode={occ.mode}")


def test_3_idle_period_law(reports):
    details, ok = [], True
    for name, r in reports.items():
        if r.config["arrival_law"]["kind"] != "exponential":
            continue
        idle = r.pooled["idle"]
        target = r.config["arrival_law"]["mean_interarrival"]
        se = target / math.sqrt(idle["count"])
        z = (idle["mean"] - target) / se
        ok &= abs(z) <= IDLE_SIGMAS
        details.append(f"{name} mean={idle['mean']:.4f} z={z:+.2f}")
    verdict(3, "idle periods ~ Exp(lambda) under Poisson arrivals", ok, "; ".join(details))


def test_4_busy_period_mean(reports):
    r = reports["MM-rho4"]
    target = mg_inf_mean_busy_period(r.config["arrival_law"]["mean_interarrival"], r.rho)
    got = r.pooled["busy_periods"]["mean_length"]
    rel = abs(got / target - 1.0)
    verdict(4, "M/M/inf mean busy period vs (e^rho - 1)/lambda", rel <= BUSY_REL_TOL,
            f"observed {got:.3f} s, theory {target:.3f} s, rel err {rel:.4f}")


def _counts(report):
    return [rep["busy_periods"]["count"] for rep in report.replications]


@pytest.mark.parametrize("rho_tag", ["rho4", "rho5"])
def test_5_cross_system_ordering(reports, rho_tag):
    mm, me2, e2 = (_counts(reports[f"{s}-{rho_tag}"]) for s in ("MM", "ME2", "E2E2"))
    hits = sum(a < b < c for a, b, c in zip(mm, me2, e2))
    verdict(5, f"busy-period counts M/M < M/E2 < E2/E2 at {rho_tag}", hits >= ORDER_MIN_REPS,
            f"{hits}/10 replications ordered; M/M={mm} M/E2={me2} E2/E2={e2}")


def test_6_max_simultaneous_shape(reports):
    details, ok = [], True
    for name, r in reports.items():
        dist = dict((x, c) for x, c in r.pooled["busy_periods"]["max_simultaneous_distribution"])
        ranked = sorted(dist, key=lambda x: -dist[x])
        rank_of_one = ranked.index(1) + 1 if 1 in dist else None
        p99 = float(np.percentile(r.pooled["records"]["max_simultaneous"], 99))
        ok &= rank_of_one in (1, 2) and p99 <= X_P99_MAX
        details.append(f"{name} X=1 rank {rank_of_one}, p99={p99:g}, max={max(dist)}")
    verdict(6, "X=1 most frequent, 99th percentile of X <= 16", ok, "; ".join(details))


def test_7_regression_strength(reports):
    details, ok = [], True
    for name, r in reports.items():
        fit = r.pooled["regression"]
        ok &= fit is not None and fit["correlation"] > R_MIN
        details.append(f"{name} R={fit['correlation']:.3f} a={fit['intercept']:.3f} b={fit['slope']:.3f}")
    verdict(7, "ln Y on X regression R > 0.9", ok, "; ".join(details))


def test_8_oracle_equivalence():
    rng = np.random.default_rng(8)
    mismatches = 0
    for _ in range(ORACLE_INSTANCES):
        n = int(rng.integers(1, ORACLE_MAX_CUSTOMERS + 1))
        gaps = rng.exponential(1.0, n)
        services = rng.exponential(rng.uniform(0.5, 8.0), n)
        traj = simulate_trajectory(gaps, services)
        arr = np.cumsum(gaps)
        pairs = list(zip(arr, arr + services))
        path = oracles.state_path(pairs)
        same = [k for _, _, k in path] == list(traj.segment_states)
        same &= [hi - lo for lo, hi, _ in path] == list(traj.durations)
        visits, totals = oracles.occupancy(pairs)
        occ = occupancy(traj)
        same &= {k: int(v) for k, v in enumerate(occ.visits) if v} == visits
        same &= {k: float(t) for k, t in enumerate(occ.total_sojourn) if occ.visits[k]} == totals
        records, idle = segment_busy_periods(traj)
        want, want_idle = oracles.busy_periods(pairs)
        same &= [(r.start, r.length, r.customers_served, r.max_simultaneous) for r in records] == want
        same &= idle.count == len(want_idle)
        mismatches += not same
    verdict(8, "brute-force oracle equivalence", mismatches == 0,
            f"{ORACLE_INSTANCES} instances of <= {ORACLE_MAX_CUSTOMERS} customers, {mismatches} mismatches")


def test_9_determinism(reports):
    differing = [name for name, cfg in PRESETS.items() if to_json(run_experiment(cfg)) != to_json(reports[name])]
    verdict(9, "byte-identical JSON on rerun", not differing,
            f"{len(PRESETS) - len(differing)}/{len(PRESETS)} presets identical")
