#include "fwmpulse/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "fwmpulse/errors.hpp"

namespace fwm::gaussian {

namespace {

using Eigen::Matrix2cd;
using Eigen::Matrix4d;
using Eigen::Vector4d;

constexpr double kBrightThreshold = 100.0; // |mean|^2 >= 100 x variances
constexpr double kOmegaValidity = constants::two_pi * 50e6;

Matrix4d symplectic_form()
{
    Matrix4d omega = Matrix4d::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    return omega;
}

} // namespace

void GaussianState::validate() const
{
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw PhysicalityError("GaussianState: covariance not symmetric");
    if (min_symplectic_eigenvalue(cov) < 1.0 - 1e-9)
        throw PhysicalityError("GaussianState: minimum symplectic eigenvalue below 1");
}

GaussianState coherent_input(double mean_photon_flux_s, double excess_noise_db)
{
    if (mean_photon_flux_s < 0.0)
        throw std::domain_error("coherent_input: flux must be non-negative");
    if (excess_noise_db < 0.0)
        throw std::domain_error("coherent_input: excess noise must be non-negative");
    GaussianState state;
    state.mean(0) = 2.0 * std::sqrt(mean_photon_flux_s);
    state.cov(0, 0) = undb(excess_noise_db);
    return state;
}

GaussianState coherent_input(const InputField& in)
{
    return coherent_input(in.flux, in.excess_noise_db);
}

GaussianState two_arm_coherent(double flux_s, double flux_i)
{
    if (flux_s < 0.0 || flux_i < 0.0)
        throw std::domain_error("two_arm_coherent: fluxes must be non-negative");
    GaussianState state;
    state.mean(0) = 2.0 * std::sqrt(flux_s);
    state.mean(2) = 2.0 * std::sqrt(flux_i);
    return state;
}

Eigen::Matrix4d embed_symplectic(const Matrix2cd& t)
{
    // (a_s, a_i^dag) map to quadrature order (x_s, p_s, x_i, p_i).
    Matrix4d s;
    const auto re = [&](int i, int j) { return t(i, j).real(); };
    const auto im = [&](int i, int j) { return t(i, j).imag(); };
    s << re(0, 0), -im(0, 0), re(0, 1), im(0, 1),
         im(0, 0),  re(0, 0), im(0, 1), -re(0, 1),
         re(1, 0), -im(1, 0), re(1, 1), im(1, 1),
        -im(1, 0), -re(1, 0), -im(1, 1), re(1, 1);
    return s;
}

Eigen::Matrix4d embed_noise(const Matrix2cd& noise_sym)
{
    const double s1 = noise_sym(0, 0).real();
    const double s2 = noise_sym(1, 1).real();
    const double cr = noise_sym(0, 1).real();
    const double ci = noise_sym(0, 1).imag();
    Matrix4d n;
    n << 2.0 * s1, 0.0, 2.0 * cr, 2.0 * ci,
         0.0, 2.0 * s1, 2.0 * ci, -2.0 * cr,
         2.0 * cr, 2.0 * ci, 2.0 * s2, 0.0,
         2.0 * ci, -2.0 * cr, 0.0, 2.0 * s2;
    return n;
}

GaussianState apply_transfer(const GaussianState& state, const medium::TransferPoint& tp)
{
    if (!medium::is_physical(tp))
        throw PhysicalityError("apply_transfer: transfer point violates the commutator identity");
    const Matrix4d s = embed_symplectic(tp.T);
    GaussianState out;
    out.mean = s * state.mean;
    out.cov = s * state.cov * s.transpose() + embed_noise(tp.noise_sym);
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

GaussianState apply_loss(const GaussianState& state, double eta_s, double eta_i)
{
    if (eta_s < 0.0 || eta_s > 1.0 || eta_i < 0.0 || eta_i > 1.0)
        throw std::domain_error("apply_loss: efficiencies must lie in [0, 1]");
    Matrix4d x = Matrix4d::Identity();
    x(0, 0) = x(1, 1) = std::sqrt(eta_s);
    x(2, 2) = x(3, 3) = std::sqrt(eta_i);
    Matrix4d n = Matrix4d::Zero();
    n(0, 0) = n(1, 1) = 1.0 - eta_s;
    n(2, 2) = n(3, 3) = 1.0 - eta_i;
    GaussianState out;
    out.mean = x * state.mean;
    out.cov = x * state.cov * x.transpose() + n;
    return out;
}

double intensity_difference_variance(const GaussianState& state)
{
    const double mean_sq = state.mean.squaredNorm();
    const Eigen::SelfAdjointEigenSolver<Matrix4d> es(state.cov);
    const double max_var = es.eigenvalues().maxCoeff();
    if (mean_sq < kBrightThreshold * max_var)
        throw std::domain_error(
            "intensity_difference_variance: bright-beam linearization invalid "
            "(means^2 < 100 x variances); use fock_tms_statistics instead");

    // dN_j = (m_x dx + m_p dp) / 2 per mode.
    Vector4d g;
    g << state.mean(0), state.mean(1), -state.mean(2), -state.mean(3);
    g *= 0.5;
    const double var = g.transpose() * state.cov * g;
    const double n_total = mean_sq / 4.0;
    return var / n_total;
}

double ideal_twin_beam_noise(double G)
{
    if (G < 1.0)
        throw std::domain_error("ideal_twin_beam_noise: requires G >= 1");
    return 1.0 / (2.0 * G - 1.0);
}

NoiseSpectrumResult noise_spectrum(const medium::MediumConfig& config,
                                   const GaussianState& input,
                                   const std::vector<double>& omega_grid)
{
    NoiseSpectrumResult out;
    out.omega_grid = omega_grid;
    out.S.reserve(omega_grid.size());
    for (double omega : omega_grid) {
        if (std::abs(omega) > kOmegaValidity)
            throw std::domain_error("noise_spectrum: |omega| beyond the 2 pi 50 MHz validity band");
        const GaussianState propagated =
            apply_transfer(input, medium::transfer_point(config, omega));
        out.S.push_back(intensity_difference_variance(propagated));
    }
    return out;
}

double loss_correct(double v_measured, double eta)
{
    if (!(eta > 0.0) || eta > 1.0)
        throw std::domain_error("loss_correct: eta must lie in (0, 1]");
    if (!(v_measured > 1.0 - eta))
        throw std::domain_error("loss_correct: infeasible correction, v <= 1 - eta");
    return (v_measured - (1.0 - eta)) / eta;
}

double db(double v)
{
    if (!(v > 0.0))
        throw std::domain_error("db: argument must be positive");
    return 10.0 * std::log10(v);
}

double undb(double d)
{
    return std::pow(10.0, d / 10.0);
}

double min_symplectic_eigenvalue(const Matrix4d& cov)
{
    const Eigen::Matrix4cd m =
        std::complex<double>(0.0, 1.0) * (symplectic_form() * cov).cast<std::complex<double>>();
    const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m);
    double nu_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k)
        nu_min = std::min(nu_min, std::abs(es.eigenvalues()(k)));
    return nu_min;
}

FockStatistics fock_tms_statistics(double squeeze_r, double seed_alpha, int cutoff)
{
    if (cutoff < 1)
        throw std::domain_error("fock_tms_statistics: cutoff must be >= 1");
    const int dim = cutoff + 1;
    std::vector<double> psi(static_cast<std::size_t>(dim) * dim, 0.0);
    auto at = [dim](std::vector<double>& v, int n, int m) -> double& {
        return v[static_cast<std::size_t>(n) * dim + m];
    };

    // Seeded coherent state in the probe mode.
    double amp = std::exp(-0.5 * seed_alpha * seed_alpha);
    for (int n = 0; n < dim; ++n) {
        at(psi, n, 0) = amp;
        amp *= seed_alpha / std::sqrt(static_cast<double>(n + 1));
    }

    // d psi / dr = (a^dag b^dag - a b) psi, propagated by applying the
    // exponential of each small step as a Taylor series. The generator's
    // spectral radius grows with the cutoff, so fixed-step integrators lose
    // norm; the series is summed until the terms fall below round-off.
    std::vector<double> term(psi.size()), next(psi.size());
    auto rhs = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int n = 0; n < dim; ++n) {
            for (int m = 0; m < dim; ++m) {
                double v = 0.0;
                if (n > 0 && m > 0)
                    v += std::sqrt(static_cast<double>(n) * m) *
                         in[static_cast<std::size_t>(n - 1) * dim + (m - 1)];
                if (n + 1 < dim && m + 1 < dim)
                    v -= std::sqrt(static_cast<double>(n + 1) * (m + 1)) *
                         in[static_cast<std::size_t>(n + 1) * dim + (m + 1)];
                out[static_cast<std::size_t>(n) * dim + m] = v;
            }
        }
    };

    // Keep |A| dr small enough that the intermediate Taylor terms never
    // amplify round-off appreciably (spectral radius <= cutoff).
    const int n_steps = std::max(
        1, static_cast<int>(std::ceil(std::abs(squeeze_r) * cutoff / 4.0)));
    const double dr = squeeze_r / n_steps;
    for (int step = 0; step < n_steps; ++step) {
        term = psi;
        for (int k = 1; k <= 200; ++k) {
            rhs(term, next);
            const double scale = dr / k;
            double term_sq = 0.0, psi_sq = 0.0;
            for (std::size_t i = 0; i < psi.size(); ++i) {
                term[i] = scale * next[i];
                psi[i] += term[i];
                term_sq += term[i] * term[i];
                psi_sq += psi[i] * psi[i];
            }
            if (term_sq <= 1e-32 * psi_sq)
                break;
        }
    }

    FockStatistics stats;
    double mean_diff = 0.0, mean_diff_sq = 0.0;
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            const double p = psi[static_cast<std::size_t>(n) * dim + m] *
                             psi[static_cast<std::size_t>(n) * dim + m];
            stats.norm += p;
            stats.mean_s += p * n;
            stats.mean_i += p * m;
            mean_diff += p * (n - m);
            mean_diff_sq += p * (n - m) * (n - m);
        }
    }
    if (stats.norm < 1.0 - 1e-8)
        throw ConvergenceError("fock_tms_statistics: truncated norm below 1 - 1e-8, raise cutoff");
    stats.mean_s /= stats.norm;
    stats.mean_i /= stats.norm;
    mean_diff /= stats.norm;
    mean_diff_sq /= stats.norm;
    stats.var_diff = mean_diff_sq - mean_diff * mean_diff;
    return stats;
}

} // namespace fwm::gaussian
