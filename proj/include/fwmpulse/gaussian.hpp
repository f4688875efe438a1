#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fwmpulse/medium.hpp"

namespace fwm::gaussian {

// Two detected modes in quadrature order (x_s, p_s, x_i, p_i).
// Vacuum convention: cov = identity, x = a + a^dag.
struct GaussianState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();

    // Throws PhysicalityError if cov is asymmetric beyond 1e-12 or the
    // minimum symplectic eigenvalue drops below 1 - 1e-9.
    void validate() const;
};

// Probe seed parameters: mean photon number per pulse and flat excess
// amplitude noise in dB above shot noise.
struct InputField {
    double flux = 4e6;
    double excess_noise_db = 0.0;
};

struct NoiseSpectrumResult {
    std::vector<double> omega_grid;
    std::vector<double> S; // relative-intensity noise, 1.0 = shot-noise limit
};

// Bright probe seed with optional excess amplitude noise; conjugate mode
// enters as vacuum.
GaussianState coherent_input(double mean_photon_flux_s, double excess_noise_db);
GaussianState coherent_input(const InputField& in);

// Two independent coherent beams (for 50/50-split shot-noise references).
GaussianState two_arm_coherent(double flux_s, double flux_i);

// Real 4x4 quadrature representation of the complex Bogoliubov map on
// (a_s, a_i^dag).
Eigen::Matrix4d embed_symplectic(const Eigen::Matrix2cd& T);

// Quadrature covariance contribution of Langevin noise with symmetrized
// correlation matrix noise_sym (Hermitian, (a_s, a_i^dag) representation).
Eigen::Matrix4d embed_noise(const Eigen::Matrix2cd& noise_sym);

// cov -> S cov S^T + N, mean -> S mean. Throws PhysicalityError if the
// transfer point violates the commutator identity.
GaussianState apply_transfer(const GaussianState& state,
                             const medium::TransferPoint& tp);

// Independent loss channels: cov -> eta cov + (1 - eta) I per mode.
GaussianState apply_loss(const GaussianState& state, double eta_s, double eta_i);

// Var(N_s - N_i) / (<N_s> + <N_i>) in the bright-beam linearization
// dN_j = (m_x dx + m_p dp)/2. Requires |mean|^2 >= 100 x largest
// covariance eigenvalue; throws std::domain_error otherwise (use the
// Fock oracle for dim beams).
double intensity_difference_variance(const GaussianState& state);

// 1 / (2G - 1), the ideal seeded twin-beam limit. Requires G >= 1.
double ideal_twin_beam_noise(double G);

// Per-frequency transfer + intensity-difference variance over the grid.
// Grid must stay within |omega| <= 2 pi 50 MHz.
NoiseSpectrumResult noise_spectrum(const medium::MediumConfig& config,
                                   const GaussianState& input,
                                   const std::vector<double>& omega_grid);

// (v - (1 - eta)) / eta. Requires 0 < eta <= 1 and v > 1 - eta.
double loss_correct(double v_measured, double eta);

double db(double v);
double undb(double d);

double min_symplectic_eigenvalue(const Eigen::Matrix4d& cov);

// Exact Fock-space statistics of exp(r (a^dag b^dag - a b)) D_s(alpha)|0,0>.
struct FockStatistics {
    double mean_s = 0.0;
    double mean_i = 0.0;
    double var_diff = 0.0;
    double norm = 0.0;
};

// Brute-force oracle for the covariance pipeline; truncates each mode at
// `cutoff` photons and throws ConvergenceError if the retained norm falls
// below 1 - 1e-8.
FockStatistics fock_tms_statistics(double squeeze_r, double seed_alpha, int cutoff);

} // namespace fwm::gaussian
