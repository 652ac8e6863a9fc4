"""Simulator and verification helpers for the granuloma chemotaxis model."""

from ._core import (
    ConfigError,
    GranulomaError,
    ModelParams,
    RunConfig,
    config_keys,
    constants,
    find_b0,
    fit_rate,
    gamma_sup,
    heat_apply,
    kappa,
    neumann_lambda,
    ode_oracle,
    parse_config,
    regime,
    reproduction_number,
    s_integral,
    simulate,
    xi_interval,
)

__all__ = [
    "ConfigError",
    "GranulomaError",
    "ModelParams",
    "RunConfig",
    "config_keys",
    "constants",
    "find_b0",
    "fit_rate",
    "gamma_sup",
    "heat_apply",
    "kappa",
    "neumann_lambda",
    "ode_oracle",
    "parse_config",
    "regime",
    "reproduction_number",
    "s_integral",
    "simulate",
    "xi_interval",
]
