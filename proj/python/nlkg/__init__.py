"""Windowed nonlinear Klein-Gordon scattering and Taylor-coefficient reconstruction."""

import json

from ._core import (
    ConfigError,
    NlkgError,
    Nonlinearity,
    ProbeRejected,
    SolverError,
    energy_norm,
    expand,
    gaussian_probe,
    k_functional,
)
from . import _core

__all__ = [
    "ConfigError",
    "NlkgError",
    "Nonlinearity",
    "ProbeRejected",
    "SolverError",
    "energy_norm",
    "expand",
    "gaussian_probe",
    "k_functional",
    "resolve_config",
    "simulate",
    "reconstruct",
    "gateaux",
]


def resolve_config(text: str) -> dict:
    """Parse a YAML or JSON config and return it with every default filled in."""
    return json.loads(_core.resolve_config(text))


def simulate(text: str) -> dict:
    return json.loads(_core.simulate_json(text))


def reconstruct(text: str) -> dict:
    """Reconstruction report; ``exit_code`` is nonzero when the cascade stopped early."""
    return json.loads(_core.reconstruct_json(text))


def gateaux(text: str) -> dict:
    return json.loads(_core.gateaux_json(text))
