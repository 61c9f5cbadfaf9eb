"""Python bindings for the fppc simulator."""

from ._fppc import (
    ConfigError,
    brw_speed,
    chernoff_bounds,
    closed_site_marginal,
    experiments,
    read_csv,
    run_experiment,
    run_trial,
    sweep,
    type2_seed_marginal,
    wilson_interval,
)

__all__ = [
    "ConfigError",
    "brw_speed",
    "chernoff_bounds",
    "closed_site_marginal",
    "experiments",
    "read_csv",
    "run_experiment",
    "run_trial",
    "sweep",
    "type2_seed_marginal",
    "wilson_interval",
]
