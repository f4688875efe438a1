#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fwmpulse/constants.hpp"

namespace fwm::medium {

// Atomic/optical parameters of the pumped double-lambda cell.
// All frequencies are angular (rad/s), lengths in m, powers in W.
struct MediumConfig {
    double delta1 = constants::two_pi * 1.8e9;   // one-photon detuning
    double delta = constants::two_pi * 20e6;     // two-photon detuning
    double omega_hf = constants::two_pi * 6.834e9; // ground hyperfine splitting
    double Gamma = constants::two_pi * 5.75e6;   // excited-state decay rate
    double gamma = constants::two_pi * 1.4e6;    // ground-coherence decay rate
    double pump_power = 0.75;                    // W
    double pump_waist = 650e-6;                  // 1/e^2 radius, m
    double probe_waist = 300e-6;                 // m
    double cell_length = 5e-3;                   // m
    double temperature = 140.0;                  // deg C
    double coupling_C = 0.0;   // FWM coupling strength per meter (calibrated)
    double raman_A = 0.0;      // Raman absorption strength per meter

    // Throws std::domain_error on invalid parameters.
    void validate() const;
};

// Frequency-dependent coupled-mode coefficients, all per meter.
struct CoupledModeCoefficients {
    std::complex<double> kappa_s; // probe self-coefficient (absorption + phase)
    std::complex<double> kappa_i; // conjugate self-coefficient
    std::complex<double> chi;     // parametric cross-coupling
};

// Input-output map at one sideband frequency for the operator pair
// (a_probe, a_conjugate^dag). noise_sym holds the symmetrized Langevin
// correlations, noise_comm their commutator; both are Hermitian 2x2.
// Physicality: T J T^dag + noise_comm = J with J = diag(+1, -1).
struct TransferPoint {
    Eigen::Matrix2cd T = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd noise_sym = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd noise_comm = Eigen::Matrix2cd::Zero();
};

struct TransferFunction {
    std::vector<double> omega_grid;
    std::vector<TransferPoint> points;
};

// Rubidium number density (m^-3) from the Steck vapor-pressure correlation,
// with the solid/liquid branch switched at the melting point.
// Valid for -20 <= temperature_c <= 250; throws std::domain_error outside.
double vapor_density(double temperature_c);

// Pump Rabi frequency (rad/s) from power and 1/e^2 waist, using the
// effective D1 dipole moment of constants.hpp.
double rabi_frequency(double power_w, double waist_m);

// AC Stark shift of the two-photon resonance: |Omega|^2 / (4 delta1).
double light_shift(const MediumConfig& config);

// Dimensionless rescaling of coupling_C / raman_A with density, pump Rabi
// frequency and one-photon detuning, relative to the default conditions.
double coupling_scale(const MediumConfig& config);

CoupledModeCoefficients coefficients(const MediumConfig& config, double omega);

// Slab-composed propagator through the cell at one sideband frequency,
// with vacuum-coupled Langevin noise attached for every absorptive or
// amplifying part. Doubles the slab count until converged below 1e-6.
TransferPoint transfer_point(const MediumConfig& config, double omega);

TransferFunction transfer_function(const MediumConfig& config,
                                   const std::vector<double>& omega_grid);

// |T11(0)|^2: probe intensity gain at the pulse-center frequency.
double cw_gain(const MediumConfig& config);

// Checks T J T^dag + noise_comm = J entrywise.
bool is_physical(const TransferPoint& tp, double tol = 1e-9);

} // namespace fwm::medium
