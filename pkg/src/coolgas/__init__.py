"""Particle simulation and analysis of homogeneous inelastic cooling with
energy-dependent collision rates.

The collision kernel carries a factor E(t)^(-a): the exponent a selects the
cooling regime (power law below 1/2, exponential at 1/2, finite-time energy
blow-down above it).  The package provides the physical-frame cascade, the
self-similar rescaled frame, the time-change map coupling the two, and the
fitting tools that read the laws back off the runs.
"""

from .errors import (CoolgasError, CorruptedStateError, DivergenceError,
                     InputError, KernelError, UsageError)
from .kernel import (CollisionOutcome, KernelConfig, collide, collide_pairs,
                     dissipation_lower_bound, dissipation_rate, isotropic_b1,
                     linear_b1, sample_omega, sample_omegas, sphere_area,
                     sphere_integral)
from .ensemble import (DISTRIBUTIONS, MomentSeries, ProfileHistogram,
                       VelocityEnsemble, average_histograms, init_ensemble,
                       moment, radial_histogram)
from .dsmc import (DsmcState, choose_dt, dsmc_step, ntc_substep,
                   relative_speed_majorant, run_physical)
from .rescaled import (RescaledRun, drift_step, estimate_stationary_energy,
                       l1_distance, profile_distance_series, run_rescaled,
                       stationarity_residual)
from .scaling import (ScalingMap, build_scaling_map,
                      map_ensemble_to_rescaled, verify_energy_coupling)
from .io import (config_hash, read_l1_csv, read_map_csv, read_profile_csv,
                 read_series_csv, read_snapshot_csv, read_summary_json,
                 version_stamp, write_l1_csv, write_map_csv,
                 write_profile_csv, write_series_csv, write_snapshot_csv,
                 write_summary_json)
from .analysis import (ConvergenceFit, CoolingFit, DecayCheck,
                       MomentBoundCheck, bootstrap_noise_floor,
                       check_moment_bound, derivative_decay, fit_convergence,
                       fit_cooling, linearize_energy, regime_for)
from .cli import RunConfig, main, parse_config

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "CoolgasError", "InputError", "KernelError", "DivergenceError",
    "CorruptedStateError", "UsageError",
    # kernel
    "KernelConfig", "CollisionOutcome", "collide", "collide_pairs",
    "sample_omega", "sample_omegas", "dissipation_rate",
    "dissipation_lower_bound", "isotropic_b1", "linear_b1", "sphere_area",
    "sphere_integral",
    # ensemble
    "VelocityEnsemble", "MomentSeries", "ProfileHistogram", "DISTRIBUTIONS",
    "init_ensemble", "moment", "radial_histogram", "average_histograms",
    # dsmc
    "DsmcState", "run_physical", "dsmc_step", "ntc_substep", "choose_dt",
    "relative_speed_majorant",
    # rescaled
    "RescaledRun", "run_rescaled", "drift_step", "stationarity_residual",
    "estimate_stationary_energy", "l1_distance", "profile_distance_series",
    # scaling
    "ScalingMap", "build_scaling_map", "verify_energy_coupling",
    "map_ensemble_to_rescaled",
    # io
    "config_hash", "version_stamp",
    "write_series_csv", "read_series_csv",
    "write_profile_csv", "read_profile_csv",
    "write_map_csv", "read_map_csv",
    "write_l1_csv", "read_l1_csv",
    "write_snapshot_csv", "read_snapshot_csv",
    "write_summary_json", "read_summary_json",
    # analysis
    "CoolingFit", "MomentBoundCheck", "ConvergenceFit", "DecayCheck",
    "linearize_energy", "fit_cooling", "check_moment_bound",
    "derivative_decay", "fit_convergence", "bootstrap_noise_floor",
    "regime_for",
    # cli
    "RunConfig", "parse_config", "main",
]
