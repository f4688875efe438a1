"""Smoke tests for the Python bindings; the heavy validation lives in the
C++ unit and acceptance suites."""

import math

import pytest

import fwmpulse as fwm

TWO_PI = 2.0 * math.pi


def test_ideal_twin_beam_limit():
    assert fwm.ideal_twin_beam_noise(4.2) == pytest.approx(1.0 / (2 * 4.2 - 1), abs=1e-12)
    assert fwm.ideal_twin_beam_noise(1.0) == 1.0


def test_db_roundtrip_and_loss_correction():
    assert fwm.db(fwm.undb(-0.96)) == pytest.approx(-0.96, abs=1e-12)
    corrected = fwm.loss_correct(fwm.undb(-0.96), 0.7468)
    assert fwm.db(corrected) == pytest.approx(-1.34, abs=0.005)


def test_vapor_density_and_light_shift():
    assert fwm.vapor_density(140.0) == pytest.approx(6.0699e19, rel=1e-3)
    config = fwm.MediumConfig()
    assert fwm.light_shift(config) / TWO_PI == pytest.approx(21.67e6, rel=1e-3)


def test_transfer_physicality_and_gaussian_pipeline():
    config = fwm.MediumConfig()
    config.coupling_C = 4.9e9
    config.raman_A = 0.3 * config.coupling_C
    tp = fwm.transfer_point(config, 0.0)
    assert fwm.is_physical(tp)
    assert fwm.cw_gain(config) > 1.0

    state = fwm.coherent_input(4e6, 0.0)
    state = fwm.apply_transfer(state, tp)
    state = fwm.apply_loss(state, 0.7468, 0.7468)
    state.validate()
    assert fwm.min_symplectic_eigenvalue(state.cov) >= 1.0 - 1e-9
    assert fwm.intensity_difference_variance(state) > 0.0


def test_calibrate_and_band_gain():
    calibrated = fwm.calibrate_coupling(4.2, fwm.PulseShape(), fwm.MediumConfig())
    gain = fwm.band_average_gain(calibrated, fwm.PulseShape())
    assert gain == pytest.approx(4.2, abs=0.05)
    assert calibrated.raman_A / calibrated.coupling_C == pytest.approx(
        fwm.default_raman_ratio
    )


def test_sweep_and_records():
    spec = fwm.SweepSpec()
    spec.target = "cw_gain"
    spec.parameter = "medium.coupling_C"
    spec.grid = [0.0, 2e9, 4e9]
    curve = fwm.run_sweep(spec, 2)
    assert curve.value[0] == 1.0
    assert curve.value[-1] > curve.value[0]
    assert curve.observable_name == "cw_gain"

    chain = fwm.DetectionChain()
    chain.n_samples = 1000
    chain.rng_seed = 3
    record = fwm.simulate_split_records(1e5, chain)
    assert len(record.charges) == 1000
    variance = fwm.record_variance(record, chain.rolling_window)
    # Poissonian split beam: detected variance ~ mean total detected photons
    assert variance == pytest.approx(record.mean_total_charge, rel=0.1)


def test_errors_are_mapped():
    with pytest.raises(Exception):
        fwm.db(0.0)
    bad = fwm.MediumConfig()
    bad.gamma = -1.0
    with pytest.raises(Exception):
        bad.validate()
