"""Inter-arrival and service time samplers.

Every sampler is a pure function of its parameters and the uniforms it is
handed. Uniform arguments may be floats or numpy arrays; array inputs give
array outputs so whole runs are generated in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ConfigError, SamplingDomainError
from .rng import Role, SeedPlan

TWO_PI = 8.0 * math.atan(1.0)

# Erlang-mixture components as (weight, stages, component mean before calibration).
ERLANG_MIXTURE = (
    (0.40, 4, 10.0 / 2.7),
    (0.35, 2, 10.0 / 4.2),
    (0.25, 3, 10.0 / 3.6),
)
_ERLANG_MIXTURE_RAW_MEAN = sum(w * m for w, _, m in ERLANG_MIXTURE)


def _out(x):
    x = np.asarray(x, dtype=np.float64)
    return float(x) if x.ndim == 0 else x


def _unit(u, name="u", allow_zero=False):
    u = np.asarray(u, dtype=np.float64)
    low_ok = (u >= 0.0) if allow_zero else (u > 0.0)
    if not np.all(low_ok & (u < 1.0)):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise SamplingDomainError(f"{name} must lie in {interval}")
    return u


def _positive(value, name):
    if not value > 0 or not math.isfinite(value):
        raise SamplingDomainError(f"{name} must be positive and finite, got {value}")


def sample_exponential(mean, u):
    _positive(mean, "mean")
    return _out(-mean * np.log(_unit(u)))


def sample_erlang2(mean, u1, u2):
    """Sum of two exponential stages, each with mean ``mean / 2``."""
    _positive(mean, "mean")
    u1, u2 = _unit(u1, "u1"), _unit(u2, "u2")
    return _out(-(mean / 2.0) * (np.log(u1) + np.log(u2)))


def pareto_shape(gamma: float) -> float:
    return 2.0 * gamma / (gamma - 1.0)


def sample_pareto(gamma, mean, u):
    """Pareto variate ``k / (1 - u)**(1/alpha)`` with ``alpha = 2 gamma / (gamma - 1)``.

    The scale ``k = mean (alpha - 1) / alpha`` makes the mean exactly ``mean``.
    ``u = 0`` is accepted and returns the scale itself.
    """
    if not gamma > 1 or not math.isfinite(gamma):
        raise SamplingDomainError(f"pareto gamma must exceed 1, got {gamma}")
    _positive(mean, "mean")
    alpha = pareto_shape(gamma)
    k = mean * (alpha - 1.0) / alpha
    return _out(k / (1.0 - _unit(u, allow_zero=True)) ** (1.0 / alpha))


def sample_lognormal(mean, u1, u2, sigma=1.0):
    # Box-Muller normal from (u1, u2), exponentiated and rescaled to the mean
    _positive(mean, "mean")
    u1, u2 = _unit(u1, "u1"), _unit(u2, "u2")
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
    scale = mean / math.exp(sigma * sigma / 2.0)
    return _out(scale * np.exp(sigma * z))


def sample_exp_mixture(p, mean, u_sel, u1, u2):
    """Two-phase hyperexponential.

    With probability ``p`` (``u_sel <= p``) the variate is exponential with
    mean ``(mean/2)/p`` drawn from ``u1``, otherwise exponential with mean
    ``(mean/2)/(1-p)`` drawn from ``u2``.
    """
    if not 0.0 < p < 1.0:
        raise SamplingDomainError(f"mixture probability must lie in (0, 1), got {p}")
    _positive(mean, "mean")
    u_sel = _unit(u_sel, "u_sel")
    u1, u2 = _unit(u1, "u1"), _unit(u2, "u2")
    first = -(mean / 2.0) / p * np.log(u1)
    second = -(mean / 2.0) / (1.0 - p) * np.log(u2)
    return _out(np.where(u_sel <= p, first, second))


def erlang_mixture_component(u_sel):
    """Index of the mixture component picked by selector ``u_sel`` (0, 1 or 2)."""
    u_sel = np.asarray(u_sel, dtype=np.float64)
    comp = np.where(u_sel < 0.40, 0, np.where(u_sel < 0.75, 1, 2))
    return int(comp) if comp.ndim == 0 else comp


def sample_erlang_mixture(mean, uniforms):
    """Erlang mixture: weights 0.40/0.35/0.25 over 4, 2 and 3 stages.

    ``uniforms`` is a sequence of six uniforms (r, s, t, u, v, w), or an
    array of shape (6, n). ``r`` selects the component; the 4-stage branch
    uses (u, s, t, w), the 2-stage branch (v, w), the 3-stage branch
    (v, w, s). Component means keep their relative proportions and are
    scaled together so the mixture mean equals ``mean``.
    """
    _positive(mean, "mean")
    us = np.asarray(uniforms, dtype=np.float64)
    if us.shape[0] != 6:
        raise SamplingDomainError("erlang mixture needs six uniforms per variate")
    r, s, t, u, v, w = (_unit(x, "uniforms") for x in us)
    calib = mean / _ERLANG_MIXTURE_RAW_MEAN
    lg = {name: np.log(x) for name, x in zip("stuvw", (s, t, u, v, w))}
    (_, k0, m0), (_, k1, m1), (_, k2, m2) = ERLANG_MIXTURE
    branch0 = -(calib * m0 / k0) * (lg["u"] + lg["s"] + lg["t"] + lg["w"])
    branch1 = -(calib * m1 / k1) * (lg["v"] + lg["w"])
    branch2 = -(calib * m2 / k2) * (lg["v"] + lg["w"] + lg["s"])
    comp = np.asarray(erlang_mixture_component(r))
    return _out(np.choose(comp, [branch0, branch1, branch2]))


def erlang_mixture_moments(mean: float) -> tuple[float, float]:
    """Analytic (mean, variance) of the calibrated Erlang mixture."""
    calib = mean / _ERLANG_MIXTURE_RAW_MEAN
    m1 = m2 = 0.0
    for weight, stages, m in ERLANG_MIXTURE:
        cm = calib * m
        m1 += weight * cm
        # E[X^2] of Erlang(k) with mean cm is cm^2 (1 + 1/k)
        m2 += weight * cm * cm * (1.0 + 1.0 / stages)
    return m1, m2 - m1 * m1


class ArrivalKind(str, Enum):
    EXPONENTIAL = "exponential"
    ERLANG2 = "erlang2"


class ServiceKind(str, Enum):
    PARETO = "pareto"
    EXPONENTIAL = "exponential"
    ERLANG2 = "erlang2"
    LOGNORMAL = "lognormal"
    EXP_MIXTURE = "exp_mixture"
    ERLANG_MIXTURE = "erlang_mixture"


_SERVICE_UNIFORMS = {
    ServiceKind.PARETO: 1,
    ServiceKind.EXPONENTIAL: 1,
    ServiceKind.ERLANG2: 2,
    ServiceKind.LOGNORMAL: 2,
    ServiceKind.EXP_MIXTURE: 3,
    ServiceKind.ERLANG_MIXTURE: 6,
}

_KENDALL = {
    ArrivalKind.EXPONENTIAL: "M",
    ArrivalKind.ERLANG2: "E2",
    ServiceKind.EXPONENTIAL: "M",
    ServiceKind.ERLANG2: "E2",
    ServiceKind.PARETO: "Par",
    ServiceKind.LOGNORMAL: "LN",
    ServiceKind.EXP_MIXTURE: "H2",
    ServiceKind.ERLANG_MIXTURE: "EM",
}


@dataclass(frozen=True)
class ArrivalLaw:
    kind: ArrivalKind
    mean_interarrival: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ArrivalKind(self.kind))
        if not self.mean_interarrival > 0 or not math.isfinite(self.mean_interarrival):
            raise ConfigError(f"mean inter-arrival time must be positive, got {self.mean_interarrival}")

    @property
    def uniforms_per_variate(self) -> int:
        return 2 if self.kind is ArrivalKind.ERLANG2 else 1

    @property
    def symbol(self) -> str:
        return _KENDALL[self.kind]

    def sample(self, uniforms: np.ndarray):
        if self.kind is ArrivalKind.EXPONENTIAL:
            return sample_exponential(self.mean_interarrival, uniforms[0])
        return sample_erlang2(self.mean_interarrival, uniforms[0], uniforms[1])

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "mean_interarrival": self.mean_interarrival}


@dataclass(frozen=True)
class ServiceLaw:
    kind: ServiceKind
    mean_service: float
    pareto_gamma: Optional[float] = None
    mixture_p: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ServiceKind(self.kind))
        if not self.mean_service > 0 or not math.isfinite(self.mean_service):
            raise ConfigError(f"mean service time must be positive, got {self.mean_service}")
        if self.kind is ServiceKind.PARETO:
            if self.pareto_gamma is None or not self.pareto_gamma > 1:
                raise ConfigError("pareto service needs pareto_gamma > 1")
        if self.kind is ServiceKind.EXP_MIXTURE:
            if self.mixture_p is None or not 0 < self.mixture_p < 1:
                raise ConfigError("exp_mixture service needs 0 < mixture_p < 1")

    @property
    def uniforms_per_variate(self) -> int:
        return _SERVICE_UNIFORMS[self.kind]

    @property
    def symbol(self) -> str:
        return _KENDALL[self.kind]

    def sample(self, uniforms: np.ndarray):
        m = self.mean_service
        k = self.kind
        if k is ServiceKind.EXPONENTIAL:
            return sample_exponential(m, uniforms[0])
        if k is ServiceKind.ERLANG2:
            return sample_erlang2(m, uniforms[0], uniforms[1])
        if k is ServiceKind.PARETO:
            return sample_pareto(self.pareto_gamma, m, uniforms[0])
        if k is ServiceKind.LOGNORMAL:
            return sample_lognormal(m, uniforms[0], uniforms[1])
        if k is ServiceKind.EXP_MIXTURE:
            return sample_exp_mixture(self.mixture_p, m, uniforms[0], uniforms[1], uniforms[2])
        return sample_erlang_mixture(m, uniforms)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "mean_service": self.mean_service,
            "pareto_gamma": self.pareto_gamma,
            "mixture_p": self.mixture_p,
        }


def _uniform_matrix(plan: SeedPlan, first: Role, second: Role, k: int, n: int, replication: int):
    # column 0 comes from the role's primary stream, column 1 from its partner;
    # any further columns get their own salted streams on the primary seed
    rows = []
    for col in range(k):
        if col == 0:
            stream = plan.stream(first, replication)
        elif col == 1:
            stream = plan.stream(second, replication)
        else:
            stream = plan.stream(first, replication, column=4 * int(first) + 8 + col)
        rows.append(stream.uniforms(n))
    return np.vstack(rows)


def generate_interarrivals(law: ArrivalLaw, n: int, streams: SeedPlan, replication: int = 0) -> np.ndarray:
    """``n`` inter-arrival gaps from stream E (and F for Erlang-2 arrivals)."""
    if n < 1:
        raise ConfigError(f"need at least one arrival, got {n}")
    u = _uniform_matrix(streams, Role.E, Role.F, law.uniforms_per_variate, n, replication)
    return np.atleast_1d(law.sample(u))


def generate_services(law: ServiceLaw, n: int, streams: SeedPlan, replication: int = 0) -> np.ndarray:
    """``n`` service times from stream G (and H, plus extra columns, when needed)."""
    if n < 1:
        raise ConfigError(f"need at least one service time, got {n}")
    u = _uniform_matrix(streams, Role.G, Role.H, law.uniforms_per_variate, n, replication)
    return np.atleast_1d(law.sample(u))
