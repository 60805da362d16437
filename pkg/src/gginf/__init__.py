"""Discrete-event simulation of infinite-server (GI/G/inf) queues."""
from .errors import ConfigError, SamplingDomainError, TrajectoryError
from .experiments import PRESETS, ExperimentReport, SimulationConfig, compare_systems, get_preset, run_experiment
from .metrics import BusyPeriodRecord, IdleStats, OccupancyStats, histogram, mean_busy_period, occupancy, segment_busy_periods
from .rng import SeedPlan, UniformStream, create_stream, next_uniform
from .sampling import ArrivalLaw, ServiceLaw
from .theory import RegressionResult, compare_distributions, fit_regression, poisson_pmf, theoretical_mean_sojourn
from .trajectory import EventStream, Trajectory, build_departures, build_trajectory, merge_events

__version__ = "0.1.0"
