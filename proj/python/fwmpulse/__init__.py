"""Relative-intensity squeezing simulator for pulsed four-wave mixing.

Thin Python surface over the C++ core: medium transfer functions, Gaussian
covariance propagation, detection-chain Monte Carlo, and parameter sweeps.
All frequencies are angular (rad/s) unless a name says otherwise.
"""

from ._core import (  # noqa: F401
    CalibrationFit,
    ConfigError,
    ConvergenceError,
    CurveResult,
    DetectionChain,
    FockStatistics,
    GaussianState,
    InputField,
    MediumConfig,
    PhysicalityError,
    PulseRecord,
    PulseShape,
    Scenario,
    SqueezingReport,
    SweepSpec,
    TransferPoint,
    band_average_gain,
    calibrate_coupling,
    coherent_input,
    config_hash,
    conjugate_probe_ratio,
    cw_gain,
    db,
    default_omega_grid,
    default_raman_ratio,
    find_optimum_delta,
    fock_tms_statistics,
    gain_from_slope,
    ideal_twin_beam_noise,
    intensity_difference_variance,
    is_physical,
    light_shift,
    loss_correct,
    min_symplectic_eigenvalue,
    noise_spectrum,
    photons_per_pulse,
    pulse_spectrum,
    rabi_frequency,
    record_variance,
    run_sweep,
    shot_noise_calibration,
    simulate_records,
    simulate_split_records,
    squeezing_report,
    time_resolved_variance,
    transfer_point,
    two_arm_coherent,
    undb,
    vapor_density,
    apply_loss,
    apply_transfer,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
