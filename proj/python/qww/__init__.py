"""Discrete-time quantum walk, lattice Wigner transport and continuum checks."""

import json as _json

from ._core import (
    AuditError,
    PreconditionError,
    coin,
    convergence_order,
    eom_audit,
    evolve,
    gaussian_packet,
    group_velocity,
    identity_suite,
    omega,
    omega_derivative_audit,
    plane_wave,
    random_state,
    step,
    transport_audit,
    wigner,
)
from ._core import run as _run


def run(command, **config):
    """Run a CLI command in-process; returns (exit_code, log, errors)."""
    return _run(command, _json.dumps(config))


__all__ = [
    "AuditError",
    "PreconditionError",
    "coin",
    "convergence_order",
    "eom_audit",
    "evolve",
    "gaussian_packet",
    "group_velocity",
    "identity_suite",
    "omega",
    "omega_derivative_audit",
    "plane_wave",
    "random_state",
    "run",
    "step",
    "transport_audit",
    "wigner",
]
