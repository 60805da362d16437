"""Closed-form references for infinite-server queues and the ln Y on X regression."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


def traffic_intensity(mean_interarrival: float, mean_service: float) -> float:
    return mean_service / mean_interarrival


def theoretical_mean_sojourn(i: int, mean_service: float, rho: float) -> float:
    """Mean holding time of state ``i`` in M/M/inf: ``mean_service / (i + rho)``."""
    if i < 0 or not mean_service > 0 or not rho > 0:
        raise ValueError("need i >= 0, mean_service > 0, rho > 0")
    return mean_service / (i + rho)


def poisson_pmf(n: int, rho: float) -> float:
    if n < 0:
        return 0.0
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    return math.exp(n * math.log(rho) - rho - math.lgamma(n + 1))


def poisson_support(rho: float, tail: float = 1e-12) -> int:
    """Smallest ``N`` with ``P(n > N) < tail``."""
    n, cdf = 0, 0.0
    while True:
        cdf += poisson_pmf(n, rho)
        if 1.0 - cdf < tail or n > rho + 50 * math.sqrt(rho) + 50:
            return n
        n += 1


def mg_inf_mean_busy_period(mean_interarrival: float, rho: float) -> float:
    # Poisson arrivals: idle periods are Exp(lambda) and P(empty) = exp(-rho)
    return (math.exp(rho) - 1.0) * mean_interarrival


@dataclass
class TheoreticalOccupancy:
    rho: float
    mean_service: float
    pmf: list[float]
    mean_sojourn: Optional[list[float]]   # only for exponential arrivals and services

    @classmethod
    def build(cls, rho: float, mean_service: float, states: int, with_sojourn: bool) -> "TheoreticalOccupancy":
        pmf = [poisson_pmf(n, rho) for n in range(states)]
        soj = [theoretical_mean_sojourn(i, mean_service, rho) for i in range(states)] if with_sojourn else None
        return cls(rho, mean_service, pmf, soj)


@dataclass(frozen=True)
class RegressionResult:
    intercept: float
    slope: float
    correlation: float
    n_points: int

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "slope": self.slope,
            "correlation": self.correlation,
            "n_points": self.n_points,
        }


class DegenerateRegression(ValueError):
    pass


def fit_regression(xs: Sequence[float], ys: Sequence[float]) -> RegressionResult:
    """Least-squares line of ``Z = ln Y`` on ``X``.

    A constant ``Z`` gives a zero slope and a correlation of 0. A constant
    ``X`` has no slope and raises :class:`DegenerateRegression`.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("xs and ys differ in length")
    if x.size < 2:
        raise DegenerateRegression("need at least two points")
    if np.any(y < 1):
        raise ValueError("Y values must be >= 1")
    z = np.log(y)
    dx = x - x.mean()
    dz = z - z.mean()
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise DegenerateRegression("all X values are identical")
    szz = float(np.dot(dz, dz))
    sxz = float(np.dot(dx, dz))
    slope = sxz / sxx
    intercept = float(z.mean()) - slope * float(x.mean())
    r = 0.0 if szz == 0.0 else sxz / math.sqrt(sxx * szz)
    return RegressionResult(intercept, slope, max(-1.0, min(1.0, r)), int(x.size))


def _align(p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    size = max(len(p), len(q))
    return np.pad(p, (0, size - len(p))), np.pad(q, (0, size - len(q)))


def total_variation(p, q) -> float:
    p, q = _align(p, q)
    return 0.5 * float(np.abs(p - q).sum())


def compare_distributions(empirical_pmf, theoretical_pmf, sample_size: Optional[float] = None,
                          min_expected: float = 5.0) -> tuple[float, float]:
    """Total variation and a chi-square statistic between two pmfs on ``0..n``.

    With ``sample_size`` the chi-square is on counts and states whose
    expected count falls below ``min_expected`` are merged into one tail
    bin. Without it the statistic is per unit sample, merging states with
    theoretical mass below 1e-9.
    """
    p, q = _align(empirical_pmf, theoretical_pmf)
    tv = 0.5 * float(np.abs(p - q).sum())
    scale = 1.0 if sample_size is None else float(sample_size)
    floor = 1e-9 if sample_size is None else min_expected
    expected = q * scale
    observed = p * scale
    small = expected < floor
    chi = 0.0
    big = ~small
    if big.any():
        chi += float(((observed[big] - expected[big]) ** 2 / expected[big]).sum())
    tail_e, tail_o = float(expected[small].sum()), float(observed[small].sum())
    if tail_e > 0:
        chi += (tail_o - tail_e) ** 2 / tail_e
    return tv, chi
