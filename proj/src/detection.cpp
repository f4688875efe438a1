#include "fwmpulse/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "fwmpulse/errors.hpp"

namespace fwm::detection {

namespace {

using Eigen::Matrix2d;
using Eigen::Vector2d;

constexpr double kOmegaValidity = constants::two_pi * 50e6;
constexpr double kFineSpacing = constants::two_pi * 0.25e6;
constexpr double kCoarseSpacing = constants::two_pi * 2e6;

double sinc(double x)
{
    if (std::abs(x) < 1e-8)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// Fourier amplitude of the unit-height envelope.
double envelope_transform(const PulseShape& shape, double omega)
{
    if (shape.kind == PulseShape::Kind::Square) {
        // Trapezoid: flat top `width`, linear edges `rise_time`.
        const double a = shape.width + shape.rise_time;
        return a * sinc(0.5 * omega * a) * sinc(0.5 * omega * shape.rise_time);
    }
    const double sigma = shape.width / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return sigma * std::sqrt(2.0 * constants::pi) * std::exp(-0.5 * omega * omega * sigma * sigma);
}

// Parseval total of |envelope_transform|^2 / (2 pi) = int |f(t)|^2 dt.
double envelope_energy(const PulseShape& shape)
{
    if (shape.kind == PulseShape::Kind::Square)
        return shape.width + 2.0 * shape.rise_time / 3.0;
    const double sigma = shape.width / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return sigma * std::sqrt(constants::pi);
}

std::vector<double> trapezoid_bins(const std::vector<double>& grid)
{
    const std::size_t n = grid.size();
    std::vector<double> d(n, 0.0);
    if (n == 1) {
        d[0] = 1.0;
        return d;
    }
    d[0] = 0.5 * (grid[1] - grid[0]);
    d[n - 1] = 0.5 * (grid[n - 1] - grid[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    return d;
}

double filter_power(const DetectionChain& chain, double omega)
{
    const double x = omega / (constants::two_pi * chain.bandwidth);
    return 1.0 / (1.0 + x * x);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Band-averaged photon statistics of the two detected modes at unit
// detection efficiency. Per-frequency covariances are normalized to the
// local total photon number before averaging, so the difference variance
// divided by the band-averaged photon number reproduces the spectral
// integration of time_resolved_variance exactly.
struct BandStatistics {
    Vector2d mean = Vector2d::Zero();    // <N_s>, <N_i>
    Matrix2d cov = Matrix2d::Zero();     // photon-number covariance
};

BandStatistics band_statistics(const medium::MediumConfig& config,
                               const gaussian::GaussianState& input,
                               const PulseShape& shape,
                               const DetectionChain& chain)
{
    const std::vector<double> grid = default_omega_grid(shape);
    std::vector<double> w = pulse_spectrum(shape, grid);
    double norm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w[i] *= filter_power(chain, grid[i]);
        norm += w[i];
    }

    gaussian::GaussianState far_state; // transparent-medium limit
    bool have_far = false;

    BandStatistics stats;
    Matrix2d cov_norm = Matrix2d::Zero();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double weight = w[i] / norm;
        gaussian::GaussianState state;
        if (std::abs(grid[i]) <= kOmegaValidity) {
            state = gaussian::apply_transfer(input, medium::transfer_point(config, grid[i]));
        } else {
            if (!have_far) {
                far_state = input;
                have_far = true;
            }
            state = far_state;
        }
        Vector2d m;
        m << (state.mean(0) * state.mean(0) + state.mean(1) * state.mean(1)) / 4.0,
             (state.mean(2) * state.mean(2) + state.mean(3) * state.mean(3)) / 4.0;
        const double n_total = m.sum();
        Eigen::Vector4d gs, gi;
        gs << state.mean(0), state.mean(1), 0.0, 0.0;
        gi << 0.0, 0.0, state.mean(2), state.mean(3);
        gs *= 0.5;
        gi *= 0.5;
        Matrix2d c;
        c(0, 0) = gs.transpose() * state.cov * gs;
        c(1, 1) = gi.transpose() * state.cov * gi;
        c(0, 1) = c(1, 0) = gs.transpose() * state.cov * gi;
        stats.mean += weight * m;
        cov_norm += weight * (c / n_total);
    }
    stats.cov = cov_norm * stats.mean.sum();
    return stats;
}

PulseRecord sample_record(const Vector2d& mean, const Matrix2d& cov,
                          const DetectionChain& chain)
{
    chain.validate();
    // Cholesky of the 2x2 photon covariance.
    const double l11 = std::sqrt(std::max(cov(0, 0), 0.0));
    const double l21 = l11 > 0.0 ? cov(1, 0) / l11 : 0.0;
    const double l22 = std::sqrt(std::max(cov(1, 1) - l21 * l21, 0.0));

    const double eta = chain.eta;
    std::mt19937_64 rng(chain.rng_seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    PulseRecord record;
    record.charges.resize(chain.n_samples);
    record.meta.seed = chain.rng_seed;
    record.meta.mean_total_charge = eta * mean.sum();
    for (int k = 0; k < chain.n_samples; ++k) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        double n_s = mean(0) + l11 * z1;
        double n_i = mean(1) + l21 * z1 + l22 * z2;
        // Binomial thinning, normal approximation.
        if (eta < 1.0) {
            n_s = eta * n_s + std::sqrt(eta * (1.0 - eta) * std::max(n_s, 0.0)) * normal(rng);
            n_i = eta * n_i + std::sqrt(eta * (1.0 - eta) * std::max(n_i, 0.0)) * normal(rng);
        }
        double charge = n_s - n_i;
        if (chain.electronic_noise_var > 0.0)
            charge += std::sqrt(chain.electronic_noise_var) * normal(rng);
        record.charges[k] = charge;
    }
    return record;
}

} // namespace

void PulseShape::validate() const
{
    if (!(width > 0.0) || !(width < repetition_period))
        throw std::domain_error("PulseShape: requires 0 < width < repetition_period");
    if (kind == Kind::Square && !(rise_time < width / 2.0))
        throw std::domain_error("PulseShape: requires rise_time < width/2");
    if (kind == Kind::Square && rise_time < 0.0)
        throw std::domain_error("PulseShape: rise_time must be non-negative");
}

void DetectionChain::validate() const
{
    if (!(eta > 0.0) || eta > 1.0)
        throw std::domain_error("DetectionChain: eta must lie in (0, 1]");
    if (!(bandwidth > 0.0))
        throw std::domain_error("DetectionChain: bandwidth must be positive");
    if (electronic_noise_var < 0.0)
        throw std::domain_error("DetectionChain: electronic_noise_var must be non-negative");
    if (rolling_window < 2)
        throw std::domain_error("DetectionChain: rolling_window must be >= 2");
    if (n_samples < 2 * rolling_window)
        throw std::domain_error("DetectionChain: requires n_samples >= 2 x rolling_window");
}

std::vector<double> default_omega_grid(const PulseShape& shape)
{
    shape.validate();
    const double span = constants::two_pi * 10.0 / shape.width;
    const double fine_edge = std::min(span, kOmegaValidity);
    // The spacing must resolve the main spectral lobe even for very long
    // pulses, where the lobe is much narrower than the default 0.25 MHz.
    const double spacing =
        std::min(kFineSpacing, constants::two_pi / (8.0 * shape.width));
    std::vector<double> half;
    for (double w = 0.0; w <= fine_edge; w += spacing)
        half.push_back(w);
    for (double w = half.back() + kCoarseSpacing; w <= span; w += kCoarseSpacing)
        half.push_back(w);
    if (half.back() < span)
        half.push_back(span);
    std::vector<double> grid;
    grid.reserve(2 * half.size() - 1);
    for (auto it = half.rbegin(); it != half.rend(); ++it)
        grid.push_back(-*it);
    for (std::size_t i = 1; i < half.size(); ++i)
        grid.push_back(half[i]);
    return grid;
}

std::vector<double> pulse_spectrum(const PulseShape& shape,
                                   const std::vector<double>& omega_grid)
{
    shape.validate();
    if (omega_grid.empty())
        throw std::domain_error("pulse_spectrum: empty grid");
    const double span_needed = constants::two_pi * 10.0 / shape.width;
    if (omega_grid.front() > -0.999 * span_needed || omega_grid.back() < 0.999 * span_needed)
        throw std::domain_error("pulse_spectrum: grid narrower than +-2 pi (10/width)");

    const std::vector<double> bins = trapezoid_bins(omega_grid);
    std::vector<double> weights(omega_grid.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        const double f = envelope_transform(shape, omega_grid[i]);
        weights[i] = f * f * bins[i];
        mass += weights[i];
    }
    const double analytic = constants::two_pi * envelope_energy(shape);
    if (mass < 0.95 * analytic)
        throw std::domain_error("pulse_spectrum: more than 5% of the spectral mass lies outside the grid");
    for (double& wi : weights)
        wi /= mass;
    return weights;
}

double band_average_gain(const medium::MediumConfig& config, const PulseShape& shape)
{
    const std::vector<double> grid = default_omega_grid(shape);
    const std::vector<double> weights = pulse_spectrum(shape, grid);
    double gain = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double g = 1.0;
        if (std::abs(grid[i]) <= kOmegaValidity)
            g = std::norm(medium::transfer_point(config, grid[i]).T(0, 0));
        gain += weights[i] * g;
    }
    return gain;
}

double time_resolved_variance(const medium::MediumConfig& config,
                              const gaussian::GaussianState& input,
                              const PulseShape& shape,
                              const DetectionChain& chain)
{
    chain.validate();
    const std::vector<double> grid = default_omega_grid(shape);
    std::vector<double> w = pulse_spectrum(shape, grid);
    double norm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w[i] *= filter_power(chain, grid[i]);
        norm += w[i];
    }

    // Beyond the model validity band the medium is transparent; the
    // spectrum there reduces to the attenuated input.
    const double s_far = gaussian::intensity_difference_variance(
        gaussian::apply_loss(input, chain.eta, chain.eta));

    double v = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = s_far;
        if (std::abs(grid[i]) <= kOmegaValidity) {
            const gaussian::GaussianState state = gaussian::apply_loss(
                gaussian::apply_transfer(input, medium::transfer_point(config, grid[i])),
                chain.eta, chain.eta);
            s = gaussian::intensity_difference_variance(state);
        }
        v += (w[i] / norm) * s;
    }
    return v;
}

PulseRecord simulate_records(const medium::MediumConfig& config,
                             const gaussian::GaussianState& input,
                             const PulseShape& shape,
                             const DetectionChain& chain)
{
    const BandStatistics stats = band_statistics(config, input, shape, chain);
    return sample_record(stats.mean, stats.cov, chain);
}

PulseRecord simulate_split_records(double photons_per_pulse, const DetectionChain& chain)
{
    if (!(photons_per_pulse > 0.0))
        throw std::domain_error("simulate_split_records: photon number must be positive");
    Vector2d mean;
    mean << photons_per_pulse / 2.0, photons_per_pulse / 2.0;
    Matrix2d cov = Matrix2d::Zero();
    cov(0, 0) = cov(1, 1) = photons_per_pulse / 2.0; // Poissonian arms
    return sample_record(mean, cov, chain);
}

PulseRecord rolling_average_subtract(const PulseRecord& record, int window)
{
    if (window < 2)
        throw std::domain_error("rolling_average_subtract: window must be >= 2");
    const std::size_t n = record.charges.size();
    if (n < 2 * static_cast<std::size_t>(window))
        throw std::domain_error("rolling_average_subtract: record shorter than 2 x window");

    PulseRecord out;
    out.meta = record.meta;
    out.charges.resize(n - window);
    double rolling_sum = 0.0;
    for (int k = 0; k < window; ++k)
        rolling_sum += record.charges[k];
    for (std::size_t k = window; k < n; ++k) {
        out.charges[k - window] = record.charges[k] - rolling_sum / window;
        rolling_sum += record.charges[k] - record.charges[k - window];
    }
    return out;
}

double sample_mean(const std::vector<double>& xs)
{
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs)
{
    if (xs.size() < 2)
        throw std::domain_error("sample_variance: need at least 2 samples");
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs)
        s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double record_variance(const PulseRecord& record, int window)
{
    const PulseRecord cleaned = rolling_average_subtract(record, window);
    return sample_variance(cleaned.charges) / (1.0 + 1.0 / window);
}

double photons_per_pulse(double power_w, double repetition_period)
{
    const double photon_energy = constants::two_pi * constants::hbar *
                                 constants::speed_of_light / constants::rb_d1_wavelength;
    return power_w * repetition_period / photon_energy;
}

CalibrationFit shot_noise_calibration(const std::vector<double>& powers_w,
                                      const DetectionChain& chain)
{
    std::vector<double> distinct = powers_w;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4)
        throw std::invalid_argument("shot_noise_calibration: need >= 4 distinct powers");
    for (double p : powers_w)
        if (!(p > 0.0))
            throw std::invalid_argument("shot_noise_calibration: powers must be positive");

    std::vector<double> variances(powers_w.size());
    for (std::size_t i = 0; i < powers_w.size(); ++i) {
        DetectionChain point_chain = chain;
        point_chain.rng_seed = splitmix64(chain.rng_seed ^ (i + 1));
        const double n = photons_per_pulse(powers_w[i], 1e-6);
        variances[i] = record_variance(simulate_split_records(n, point_chain),
                                       chain.rolling_window);
    }

    const double n_pts = static_cast<double>(powers_w.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < powers_w.size(); ++i) {
        sx += powers_w[i];
        sy += variances[i];
        sxx += powers_w[i] * powers_w[i];
        sxy += powers_w[i] * variances[i];
    }
    const double denom = n_pts * sxx - sx * sx;
    if (std::abs(denom) < 1e-300)
        throw std::invalid_argument("shot_noise_calibration: degenerate powers");

    CalibrationFit fit;
    fit.slope = (n_pts * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n_pts;
    double ss_res = 0.0, ss_tot = 0.0;
    fit.residuals.resize(powers_w.size());
    const double y_mean = sy / n_pts;
    for (std::size_t i = 0; i < powers_w.size(); ++i) {
        const double pred = fit.slope * powers_w[i] + fit.intercept;
        fit.residuals[i] = variances[i] - pred;
        ss_res += fit.residuals[i] * fit.residuals[i];
        ss_tot += (variances[i] - y_mean) * (variances[i] - y_mean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

SqueezingReport squeezing_report(const PulseRecord& record_snl,
                                 const PulseRecord& record_fwm,
                                 int window, double eta)
{
    const double q_snl = record_snl.meta.mean_total_charge;
    const double q_fwm = record_fwm.meta.mean_total_charge;
    const double q_max = std::max(std::abs(q_snl), std::abs(q_fwm));
    if (q_max <= 0.0 || std::abs(q_snl - q_fwm) > 0.02 * q_max)
        throw std::invalid_argument("squeezing_report: records not at matched mean total charge (2%)");

    const double v_snl = record_variance(record_snl, window);
    const double v_fwm = record_variance(record_fwm, window);

    SqueezingReport report;
    report.ratio = v_fwm / v_snl;
    report.measured_db = gaussian::db(report.ratio);
    const double corrected = gaussian::loss_correct(report.ratio, eta);
    report.corrected_db = gaussian::db(corrected);

    // Variance-of-variance propagation: SE(V)/V = sqrt(2/n) per record.
    const double n1 = static_cast<double>(record_snl.charges.size() - window);
    const double n2 = static_cast<double>(record_fwm.charges.size() - window);
    const double rel = std::sqrt(2.0 / n1 + 2.0 / n2);
    report.se_measured_db = 10.0 / std::log(10.0) * rel;
    report.se_corrected_db = 10.0 / std::log(10.0) * (report.ratio * rel / eta) / corrected;
    return report;
}

void write_record_csv(const PulseRecord& record, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("write_record_csv: cannot open " + path);
    char buf[64];
    out << "# seed=" << record.meta.seed << " config_hash=" << record.meta.config_hash << "\n";
    out << "index,charge\n";
    for (std::size_t i = 0; i < record.charges.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", record.charges[i]);
        out << i << "," << buf << "\n";
    }
}

namespace {
constexpr char kRecordMagic[8] = {'F', 'W', 'M', 'P', 'R', 'E', 'C', '1'};
}

void write_record_binary(const PulseRecord& record, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("write_record_binary: cannot open " + path);
    out.write(kRecordMagic, sizeof kRecordMagic);
    const std::uint64_t count = record.charges.size();
    out.write(reinterpret_cast<const char*>(&record.meta.seed), 8);
    out.write(reinterpret_cast<const char*>(&record.meta.config_hash), 8);
    out.write(reinterpret_cast<const char*>(&record.meta.mean_total_charge), 8);
    out.write(reinterpret_cast<const char*>(&count), 8);
    out.write(reinterpret_cast<const char*>(record.charges.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
}

PulseRecord read_record_binary(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("read_record_binary: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kRecordMagic, sizeof magic) != 0)
        throw ConfigError("read_record_binary: bad magic in " + path);
    PulseRecord record;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&record.meta.seed), 8);
    in.read(reinterpret_cast<char*>(&record.meta.config_hash), 8);
    in.read(reinterpret_cast<char*>(&record.meta.mean_total_charge), 8);
    in.read(reinterpret_cast<char*>(&count), 8);
    record.charges.resize(count);
    in.read(reinterpret_cast<char*>(record.charges.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in)
        throw ConfigError("read_record_binary: truncated file " + path);
    return record;
}

} // namespace fwm::detection
