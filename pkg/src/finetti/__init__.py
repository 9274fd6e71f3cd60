"""Finitely iterated de Finetti lottery: exact chain, closed form and large-N limit."""

import logging

from .limits import (lambert_w0, lambert_w0_log, limit_coefficient, finite_coefficient, mu_ratio, mu_scaled,
                     mu_series, sufficient_condition, sufficient_condition_scaled, tree_series,
                     w_derivative, w_ratio)
from .markov import (McEstimate, NumericMode, StateVector, evolve_exact, expected_density,
                     m_exact, monte_carlo_m, simulate_set_lottery, simulate_trajectory,
                     transition_step)
from .params import (DomainError, InstanceParams, RatioParams, ScaledParams, instantiate,
                     to_ratio, to_scaled)
from .spectral import (SignedLogValue, closed_form_m, eigenvalue, eigenvector_entry,
                       inverse_entry, nu_v_entry, verify_eigen_residual,
                       verify_inverse_identity)

__all__ = [
    "DomainError",
    "InstanceParams",
    "McEstimate",
    "NumericMode",
    "RatioParams",
    "ScaledParams",
    "SignedLogValue",
    "StateVector",
    "closed_form_m",
    "eigenvalue",
    "eigenvector_entry",
    "evolve_exact",
    "expected_density",
    "finite_coefficient",
    "instantiate",
    "inverse_entry",
    "lambert_w0",
    "lambert_w0_log",
    "limit_coefficient",
    "m_exact",
    "monte_carlo_m",
    "mu_ratio",
    "mu_scaled",
    "mu_series",
    "nu_v_entry",
    "simulate_set_lottery",
    "simulate_trajectory",
    "sufficient_condition",
    "sufficient_condition_scaled",
    "to_ratio",
    "to_scaled",
    "transition_step",
    "tree_series",
    "verify_eigen_residual",
    "verify_inverse_identity",
    "w_derivative",
    "w_ratio",
]

__version__ = "0.1.0"

# diagnostics reach stderr only once an application configures logging
logging.getLogger("finetti").addHandler(logging.NullHandler())
