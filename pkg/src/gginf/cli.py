"""Command line entry point: ``gginf run``, ``gginf compare``, ``gginf presets``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .errors import ConfigError
from .experiments import PRESETS, SimulationConfig, compare_systems, run_experiment, simulate_replication
from .report import emit_report, to_json, write_comparison
from .rng import SeedPlan
from .sampling import ArrivalLaw, ServiceLaw
from .trajectory import write_trace

log = logging.getLogger("gginf")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

_LAW_NAMES = {
    "m": "exponential",
    "exponential": "exponential",
    "e2": "erlang2",
    "erlang2": "erlang2",
    "par": "pareto",
    "pareto": "pareto",
    "ln": "lognormal",
    "lognormal": "lognormal",
    "h2": "exp_mixture",
    "exp_mixture": "exp_mixture",
    "em": "erlang_mixture",
    "erlang_mixture": "erlang_mixture",
}

_INT_KEYS = {"arrivals", "seed_e", "seed_f", "seed_g", "seed_h", "master_salt", "replications"}
_FLOAT_KEYS = {"mean_interarrival", "mean_service", "pareto_gamma", "mixture_p", "bin_width"}
_STR_KEYS = {"preset", "system", "arrival", "service", "name"}


def _law(token: str) -> str:
    try:
        return _LAW_NAMES[token.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown distribution {token!r}") from None


def parse_system(text: str) -> tuple[str, str]:
    """``"M/E2"`` or ``"M/E2/inf"`` -> (arrival kind, service kind)."""
    parts = [p for p in text.split("/") if p]
    if len(parts) == 3 and parts[2].lower() in ("inf", "∞", "infinity"):
        parts = parts[:2]
    if len(parts) != 2:
        raise ConfigError(f"system must look like 'M/E2', got {text!r}")
    return _law(parts[0]), _law(parts[1])


def _coerce(key: str, value: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    if key in _STR_KEYS:
        return value
    raise ConfigError(f"unknown config key {key!r}")


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, value)
    return out


def build_config(settings: dict) -> SimulationConfig:
    """Resolve a flat settings mapping (preset first, explicit keys on top)."""
    base = {}
    if settings.get("preset"):
        name = settings["preset"]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        p = PRESETS[name]
        base = {
            "name": p.name,
            "arrival": p.arrival_law.kind.value,
            "service": p.service_law.kind.value,
            "mean_interarrival": p.arrival_law.mean_interarrival,
            "mean_service": p.service_law.mean_service,
            "arrivals": p.n_arrivals,
            "replications": p.replications,
            "bin_width": p.length_bin_width,
            "seed_e": p.seeds.e_seed,
            "seed_f": p.seeds.f_seed,
            "seed_g": p.seeds.g_seed,
            "seed_h": p.seeds.h_seed,
            "master_salt": p.seeds.master_salt,
        }
    s = {**base, **{k: v for k, v in settings.items() if v is not None}}
    if "system" in s:
        s["arrival"], s["service"] = parse_system(s["system"])
    if settings.get("preset") and any(k in settings and settings[k] is not None for k in
                                       ("system", "arrival", "service", "mean_service", "mean_interarrival")):
        s["name"] = settings.get("name") or ""
    try:
        return SimulationConfig(
            arrival_law=ArrivalLaw(_law(s.get("arrival", "exponential")), s.get("mean_interarrival", 0.996)),
            service_law=ServiceLaw(
                _law(s.get("service", "exponential")),
                s.get("mean_service", 4.0),
                pareto_gamma=s.get("pareto_gamma"),
                mixture_p=s.get("mixture_p"),
            ),
            seeds=SeedPlan(
                e_seed=s.get("seed_e", 7528),
                g_seed=s.get("seed_g", 7548),
                f_seed=s.get("seed_f"),
                h_seed=s.get("seed_h"),
                master_salt=s.get("master_salt", 0),
            ),
            n_arrivals=s.get("arrivals", 25_000),
            replications=s.get("replications", 10),
            name=s.get("name", ""),
            length_bin_width=s.get("bin_width", 10.0),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--system", help="arrival/service, e.g. M/M, M/E2, E2/E2")
    p.add_argument("--mean-service", type=float)
    p.add_argument("--mean-interarrival", type=float)
    p.add_argument("--arrivals", type=int)
    for role in "efgh":
        p.add_argument(f"--seed-{role}", type=int)
    p.add_argument("--master-salt", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--pareto-gamma", type=float)
    p.add_argument("--mixture-p", type=float)
    p.add_argument("--bin-width", type=float)
    p.add_argument("--name")


def _settings(args) -> dict:
    settings = read_config_file(args.config) if args.config else {}
    for key in ("preset", "system", "mean_service", "mean_interarrival", "arrivals", "seed_e", "seed_f",
                "seed_g", "seed_h", "master_salt", "replications", "pareto_gamma", "mixture_p",
                "bin_width", "name"):
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    return settings


def cmd_run(args) -> int:
    config = build_config(_settings(args))
    log.info("running %s (%s, rho=%.3f, %d x %d arrivals)", config.label, config.system, config.rho,
             config.replications, config.n_arrivals)
    report = run_experiment(config, workers=args.workers)
    if args.out_dir:
        for path in emit_report(report, args.out_dir, args.format):
            print(path)
    else:
        sys.stdout.write(to_json(report) + "\n")
    if args.trace:
        write_trace(simulate_replication(config, 0, keep_trajectory=True).trajectory, args.trace)
    return EXIT_OK


def cmd_compare(args) -> int:
    names = args.presets or list(PRESETS)
    reports = []
    for name in names:
        settings = {"preset": name}
        if args.replications is not None:
            settings["replications"] = args.replications
        reports.append(run_experiment(build_config(settings), workers=args.workers))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = compare_systems(reports)
    for w in caught:
        log.warning("%s", w.message)
    if args.out:
        print(write_comparison(rows, args.out))
    else:
        print(json.dumps(rows, indent=1))
    return EXIT_OK


def cmd_presets(args) -> int:
    for name, cfg in PRESETS.items():
        print(f"{name:10s} {cfg.system:10s} rho={cfg.rho:.3f} seeds={cfg.seeds.to_dict()}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gginf", description="Infinite-server queue simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="simulate one system and write its report")
    _add_overrides(run)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--out-dir", help="directory for report files (default: JSON to stdout)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--trace", help="also dump replication 0's event trace to this CSV")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="run presets and tabulate them side by side")
    cmp_.add_argument("presets", nargs="*", help="preset names (default: all six)")
    cmp_.add_argument("--replications", type=int)
    cmp_.add_argument("--workers", type=int, default=1)
    cmp_.add_argument("--out", help="CSV path for the table (default: JSON to stdout)")
    cmp_.set_defaults(func=cmd_compare)

    pre = sub.add_parser("presets", help="list the built-in experiments")
    pre.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure past validation is a runtime error
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
