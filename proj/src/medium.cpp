#include "fwmpulse/medium.hpp"

#include <cmath>
#include <stdexcept>

#include "fwmpulse/errors.hpp"

namespace fwm::medium {

namespace {

using cd = std::complex<double>;
using Eigen::Matrix2cd;

constexpr double kRbMeltingPointC = 39.30;
constexpr int kInitialSlabs = 64;
constexpr int kMaxSlabs = 4096;
constexpr double kSlabTol = 1e-6;

// exp(M) for 2x2 via the traceless decomposition M = mu I + B, B^2 = -det(B) I.
Matrix2cd expm2(const Matrix2cd& m)
{
    const cd mu = 0.5 * (m(0, 0) + m(1, 1));
    Matrix2cd b = m;
    b(0, 0) -= mu;
    b(1, 1) -= mu;
    const cd s2 = b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0);
    const cd s = std::sqrt(s2);
    cd ch, shs; // cosh(s), sinh(s)/s
    if (std::abs(s) < 1e-4) {
        ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0;
        shs = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
    } else {
        ch = std::cosh(s);
        shs = std::sinh(s) / s;
    }
    return std::exp(mu) * (ch * Matrix2cd::Identity() + shs * b);
}

// Coupled-mode generator on (a_s, a_i^dag).
Matrix2cd generator(const CoupledModeCoefficients& c)
{
    Matrix2cd m;
    m(0, 0) = c.kappa_s;
    m(0, 1) = c.chi;
    m(1, 0) = std::conj(c.chi);
    m(1, 1) = -std::conj(c.kappa_i);
    return m;
}

struct SlabResult {
    Matrix2cd T;
    Matrix2cd noise_sym;
    Matrix2cd noise_comm;
};

SlabResult propagate(const Matrix2cd& m, double length, int n_slabs)
{
    const double dz = length / n_slabs;

    // Each slab couples a fresh vacuum reservoir for both the absorptive
    // (probe, Re kappa_s < 0) and phase-insensitive Raman gain (conjugate)
    // parts. The commutator deficit of a slab is J - U J U^dag exactly, and
    // because every reservoir is vacuum the symmetrized correlations are
    // half the deficit, so no quadrature over the slab is needed.
    Matrix2cd j = Matrix2cd::Zero();
    j(0, 0) = 1.0;
    j(1, 1) = -1.0;
    const Matrix2cd u = expm2(m * dz);
    const Matrix2cd slab_comm = j - u * j * u.adjoint();
    const Matrix2cd slab_sym = 0.5 * slab_comm;
    SlabResult out;
    out.T = Matrix2cd::Identity();
    out.noise_sym = Matrix2cd::Zero();
    out.noise_comm = Matrix2cd::Zero();
    for (int k = 0; k < n_slabs; ++k) {
        out.T = u * out.T;
        out.noise_sym = u * out.noise_sym * u.adjoint() + slab_sym;
        out.noise_comm = u * out.noise_comm * u.adjoint() + slab_comm;
    }
    return out;
}

double max_abs_diff(const SlabResult& a, const SlabResult& b)
{
    double d = (a.T - b.T).cwiseAbs().maxCoeff();
    d = std::max(d, (a.noise_sym - b.noise_sym).cwiseAbs().maxCoeff());
    d = std::max(d, (a.noise_comm - b.noise_comm).cwiseAbs().maxCoeff());
    return d;
}

} // namespace

void MediumConfig::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::domain_error(std::string("MediumConfig: ") + name +
                                    " must be strictly positive");
    };
    positive(delta1, "delta1");
    positive(omega_hf, "omega_hf");
    positive(Gamma, "Gamma");
    positive(pump_power, "pump_power");
    positive(pump_waist, "pump_waist");
    positive(probe_waist, "probe_waist");
    positive(cell_length, "cell_length");
    if (gamma < 0.0)
        throw std::domain_error("MediumConfig: gamma must be non-negative");
    if (coupling_C < 0.0 || raman_A < 0.0)
        throw std::domain_error("MediumConfig: coupling_C and raman_A must be non-negative");
    if (temperature < -20.0 || temperature > 250.0)
        throw std::domain_error("MediumConfig: temperature outside [-20, 250] C");
    if (delta1 < 20.0 * Gamma)
        throw std::domain_error("MediumConfig: off-resonant regime requires delta1 >> Gamma");
    if (std::abs(delta) > 0.1 * delta1)
        throw std::domain_error("MediumConfig: requires |delta| << delta1");
}

double vapor_density(double temperature_c)
{
    if (temperature_c < -20.0 || temperature_c > 250.0)
        throw std::domain_error("vapor_density: temperature outside [-20, 250] C");
    const double t_kelvin = temperature_c + 273.15;
    // Steck vapor-pressure correlation for rubidium, torr.
    const double log10_p = (temperature_c < kRbMeltingPointC)
                               ? 2.881 + 4.857 - 4215.0 / t_kelvin
                               : 2.881 + 4.312 - 4040.0 / t_kelvin;
    const double p_pa = std::pow(10.0, log10_p) * constants::torr_to_pa;
    return p_pa / (constants::k_boltzmann * t_kelvin);
}

double rabi_frequency(double power_w, double waist_m)
{
    if (!(power_w > 0.0) || !(waist_m > 0.0))
        throw std::domain_error("rabi_frequency: power and waist must be positive");
    // Peak field of a gaussian beam with 1/e^2 radius w: E^2 = 4 P / (pi w^2 eps0 c).
    const double e_peak = std::sqrt(4.0 * power_w /
                                    (constants::pi * waist_m * waist_m *
                                     constants::epsilon0 * constants::speed_of_light));
    const double dipole = constants::rb_d1_reduced_dipole * constants::dipole_angular_factor;
    return dipole * e_peak / constants::hbar;
}

double light_shift(const MediumConfig& config)
{
    const double omega = rabi_frequency(config.pump_power, config.pump_waist);
    return omega * omega / (4.0 * config.delta1);
}

double coupling_scale(const MediumConfig& config)
{
    static const double density_ref = vapor_density(140.0);
    static const double rabi_ref = rabi_frequency(0.75, 650e-6);
    static const double delta1_ref = constants::two_pi * 1.8e9;
    const double omega = rabi_frequency(config.pump_power, config.pump_waist);
    const double r = omega / rabi_ref;
    const double d = delta1_ref / config.delta1;
    return (vapor_density(config.temperature) / density_ref) * r * r * d * d;
}

CoupledModeCoefficients coefficients(const MediumConfig& config, double omega)
{
    config.validate();
    const double shift = light_shift(config);
    const double scale = coupling_scale(config);
    const double c_eff = config.coupling_C * scale;
    const double a_eff = config.raman_A * scale;

    const cd d_plus(config.gamma, -(config.delta - shift + omega));
    const cd d_minus(config.gamma, -(config.delta - shift - omega));
    if (std::abs(d_plus) == 0.0 || std::abs(d_minus) == 0.0)
        throw std::domain_error("coefficients: singular Raman denominator (gamma = 0 at resonance)");

    CoupledModeCoefficients out;
    out.chi = c_eff / d_plus;
    out.kappa_s = -a_eff / d_plus;
    out.kappa_i = std::conj(-a_eff / d_minus);
    return out;
}

TransferPoint transfer_point(const MediumConfig& config, double omega)
{
    const Matrix2cd m = generator(coefficients(config, omega));
    int n = kInitialSlabs;
    SlabResult prev = propagate(m, config.cell_length, n);
    while (n <= kMaxSlabs) {
        SlabResult next = propagate(m, config.cell_length, 2 * n);
        if (max_abs_diff(prev, next) < kSlabTol) {
            TransferPoint tp;
            tp.T = next.T;
            tp.noise_sym = next.noise_sym;
            tp.noise_comm = next.noise_comm;
            return tp;
        }
        prev = next;
        n *= 2;
    }
    throw ConvergenceError("transfer_point: slab refinement did not converge by " +
                           std::to_string(kMaxSlabs) + " slabs");
}

TransferFunction transfer_function(const MediumConfig& config,
                                   const std::vector<double>& omega_grid)
{
    TransferFunction tf;
    tf.omega_grid = omega_grid;
    tf.points.reserve(omega_grid.size());
    for (double omega : omega_grid)
        tf.points.push_back(transfer_point(config, omega));
    return tf;
}

double cw_gain(const MediumConfig& config)
{
    const TransferPoint tp = transfer_point(config, 0.0);
    return std::norm(tp.T(0, 0));
}

bool is_physical(const TransferPoint& tp, double tol)
{
    Matrix2cd j = Matrix2cd::Zero();
    j(0, 0) = 1.0;
    j(1, 1) = -1.0;
    const Matrix2cd residual = tp.T * j * tp.T.adjoint() + tp.noise_comm - j;
    return residual.cwiseAbs().maxCoeff() <= tol;
}

} // namespace fwm::medium
