"""Relaxation-neuron dynamics under interference envelopes.

Library + CLI for a planar FitzHugh-Nagumo neuron driven by the low-frequency
envelope of two fast carriers: frozen-nullcline analysis (folds, equilibria,
stability regions), slow-limit arc transport with fold-escape detection, full
time-domain simulation with spike counting, and the two sweep experiments that
compare predictions against observed tonic spiking.
"""
from ._version import __version__
from .errors import (BandEdgeError, ConfigError, DivergenceError, DomainError,
                     EmptyTrajectoryError, FoldUndefinedError, InvalidStartError,
                     NearFoldError, RegionPreconditionError, UndefinedCoordinateError,
                     UnsupportedDriveError)
from .model import (AveragedCosine, CustomSampled, Drive, FrozenConstant, Params,
                    RawInterference, SignCosine, State, drive_from_dict,
                    effective_amplitude_conventions, effective_amplitudes, envelope,
                    params_from_dict, rhs_averaged, rhs_full)
from .frozen import (EquilibriumInfo, FoldPoint, RegionClass, classify_region,
                     effective_gain, equilibrium, fold_point, frozen_table, is_les,
                     is_unique, no_spiking_condition, piecewise_spiking_condition)
from .singular import (CubicPoint, EnvelopeCoordinate, EscapeCycleCheck, LeftDomain,
                       ReachedEnvelopeMax, ReachedFold, ReachedHorizon, SingularArc,
                       envelope_coordinate, escape_cycle_check, escaping_at_c,
                       falling_field, integrate_singular, kappa_threshold,
                       predicts_no_tonic, rising_field)
from .sim import (AdaptiveRK45, DEFAULT_CONFIG, FixedRK4, IntegratorConfig,
                  SpikeReport, Trajectory, count_spikes, invariant_box, simulate)
from .experiments import (AtZeroWe1, ExplicitIC, GridSpec, ICGridResult, Prediction,
                          SweepResult, SweepSpec, desk_grid_specs, desk_sweep_spec,
                          evaluate_prediction, paper_grid_specs, paper_sweep_spec,
                          run_experiment1, run_experiment2, save_grid_results,
                          save_sweep_results)

__all__ = [
    "__version__",
    # errors
    "BandEdgeError", "ConfigError", "DivergenceError", "DomainError",
    "EmptyTrajectoryError", "FoldUndefinedError", "InvalidStartError",
    "NearFoldError", "RegionPreconditionError", "UndefinedCoordinateError",
    "UnsupportedDriveError",
    # model
    "AveragedCosine", "CustomSampled", "Drive", "FrozenConstant", "Params",
    "RawInterference", "SignCosine", "State", "drive_from_dict",
    "effective_amplitude_conventions", "effective_amplitudes", "envelope",
    "params_from_dict", "rhs_averaged", "rhs_full",
    # frozen
    "EquilibriumInfo", "FoldPoint", "RegionClass", "classify_region",
    "effective_gain", "equilibrium", "fold_point", "frozen_table", "is_les",
    "is_unique", "no_spiking_condition", "piecewise_spiking_condition",
    # singular
    "CubicPoint", "EnvelopeCoordinate", "EscapeCycleCheck", "LeftDomain",
    "ReachedEnvelopeMax", "ReachedFold", "ReachedHorizon", "SingularArc",
    "envelope_coordinate", "escape_cycle_check", "escaping_at_c", "falling_field",
    "integrate_singular", "kappa_threshold", "predicts_no_tonic", "rising_field",
    # sim
    "AdaptiveRK45", "DEFAULT_CONFIG", "FixedRK4", "IntegratorConfig", "SpikeReport",
    "Trajectory", "count_spikes", "invariant_box", "simulate",
    # experiments
    "AtZeroWe1", "ExplicitIC", "GridSpec", "ICGridResult", "Prediction",
    "SweepResult", "SweepSpec", "desk_grid_specs", "desk_sweep_spec",
    "evaluate_prediction", "paper_grid_specs", "paper_sweep_spec",
    "run_experiment1", "run_experiment2", "save_grid_results", "save_sweep_results",
]
