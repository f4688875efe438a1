#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwmpulse/gaussian.hpp"
#include "fwmpulse/medium.hpp"

namespace fwm::detection {

struct PulseShape {
    enum class Kind { Square, Gaussian };

    Kind kind = Kind::Square;
    double width = 50e-9;             // s; flat-top (square) or FWHM (gaussian)
    double rise_time = 5e-9;          // s; square only
    double repetition_period = 1e-6;  // s

    void validate() const;
};

struct DetectionChain {
    double eta = 0.7468;              // lumped efficiency per arm
    double bandwidth = 8e6;           // Hz, single-pole low-pass
    double amp_response = 150e-9;     // s, charge-amplifier response
    double electronic_noise_var = 0.0; // charge^2 per pulse
    int n_samples = 10000;
    int rolling_window = 100;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct PulseRecord {
    struct Meta {
        std::uint64_t seed = 0;
        std::uint64_t config_hash = 0;
        double mean_total_charge = 0.0;
    };

    std::vector<double> charges; // per-pulse integrated difference charge
    Meta meta;
};

// Sideband grid matched to the pulse: fine within the model validity band,
// coarse out to +-2 pi 10/width.
std::vector<double> default_omega_grid(const PulseShape& shape);

// Normalized spectral weights |f(omega)|^2 * d_omega over the grid
// (unit sum). Throws ConvergenceError if more than 5% of the analytic
// spectral mass falls outside the grid.
std::vector<double> pulse_spectrum(const PulseShape& shape,
                                   const std::vector<double>& omega_grid);

// Pulse gain: spectrum-weighted average of |T11(omega)|^2.
double band_average_gain(const medium::MediumConfig& config,
                         const PulseShape& shape);

// V = sum W(omega) S(omega) with W ~ |f(omega)|^2 |H(omega)|^2 normalized
// to unit sum; per-arm loss chain.eta is folded in before integration.
double time_resolved_variance(const medium::MediumConfig& config,
                              const gaussian::GaussianState& input,
                              const PulseShape& shape,
                              const DetectionChain& chain);

// Monte Carlo balanced-detection record: per pulse a bivariate normal
// photon-number pair from the band-averaged Gaussian pipeline, binomial
// thinning (normal approximation) at chain.eta per arm, electronic noise,
// charge integrated over the repetition slot. Deterministic per seed.
PulseRecord simulate_records(const medium::MediumConfig& config,
                             const gaussian::GaussianState& input,
                             const PulseShape& shape,
                             const DetectionChain& chain);

// Shot-noise reference: coherent pulse of `photons_per_pulse` split 50/50
// onto the two arms of the balanced detector.
PulseRecord simulate_split_records(double photons_per_pulse,
                                   const DetectionChain& chain);

// Each sample minus the trailing mean of the previous `window` samples;
// output is shorter by `window`. Divide the variance of the result by
// (1 + 1/window) to unbias.
PulseRecord rolling_average_subtract(const PulseRecord& record, int window);

double sample_mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

// Drift-removed, unbiased record variance.
double record_variance(const PulseRecord& record, int window);

// Mean photon number per pulse for an average optical power at the D1
// wavelength and the given repetition period.
double photons_per_pulse(double power_w, double repetition_period);

struct CalibrationFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;
};

// Simulates 50/50-split records at each power and fits variance vs power.
CalibrationFit shot_noise_calibration(const std::vector<double>& powers_w,
                                      const DetectionChain& chain);

struct SqueezingReport {
    double ratio = 1.0;
    double measured_db = 0.0;
    double corrected_db = 0.0;
    double se_measured_db = 0.0;
    double se_corrected_db = 0.0;
};

// Variance ratio of drift-removed records at matched mean total charge
// (within 2%), with the loss-corrected value at efficiency eta.
SqueezingReport squeezing_report(const PulseRecord& record_snl,
                                 const PulseRecord& record_fwm,
                                 int window, double eta);

// CSV: "index,charge" rows; binary: magic + seed + config hash + doubles,
// bit-exact round-trip.
void write_record_csv(const PulseRecord& record, const std::string& path);
void write_record_binary(const PulseRecord& record, const std::string& path);
PulseRecord read_record_binary(const std::string& path);

} // namespace fwm::detection
