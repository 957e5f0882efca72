"""Coherence dynamics of qubits under incoherent channels and coherence-based
non-Markovianity."""

from .channels import (
    ADChannel,
    ADState,
    ConstantRate,
    DephasingLorentzian,
    PDChannel,
    PDState,
    RUChannel,
    RUState,
    Tabulated,
    TimeGrid,
    f_from_gamma,
    kraus_validate,
)
from .coherence import CoherenceMeasure, c_l1, c_relent, c_skew, c_tsallis, c_tsallis_mod
from .errors import ConfigError, NumericalDomainError
from .linalg import DensityMatrix, eig_hermitian, mat_func, trace_distance
from .nonmarkov import (
    InitialStateSearch,
    blp_witness,
    equivalence_report,
    nonmarkov_measure,
    trajectory,
    witness_intervals,
)
from .volterra import ExponentialKernel, TabulatedKernel, solve_h_volterra

__version__ = "0.1.0"

__all__ = [
    "ADChannel",
    "ADState",
    "CoherenceMeasure",
    "ConfigError",
    "ConstantRate",
    "DensityMatrix",
    "DephasingLorentzian",
    "ExponentialKernel",
    "InitialStateSearch",
    "NumericalDomainError",
    "PDChannel",
    "PDState",
    "RUChannel",
    "RUState",
    "Tabulated",
    "TabulatedKernel",
    "TimeGrid",
    "blp_witness",
    "c_l1",
    "c_relent",
    "c_skew",
    "c_tsallis",
    "c_tsallis_mod",
    "eig_hermitian",
    "equivalence_report",
    "f_from_gamma",
    "kraus_validate",
    "mat_func",
    "nonmarkov_measure",
    "solve_h_volterra",
    "trace_distance",
    "trajectory",
    "witness_intervals",
]
