#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fwmpulse/detection.hpp"
#include "fwmpulse/gaussian.hpp"
#include "fwmpulse/medium.hpp"

namespace fwm::sweep {

// Full model state a sweep varies one parameter of.
struct Scenario {
    medium::MediumConfig medium;
    detection::PulseShape pulse;
    detection::DetectionChain chain;
    gaussian::InputField input;
};

enum class Target {
    CwGain,
    BandAverageGain,
    TimeResolvedVariance,
    NoiseSpectrum,
    ConjugateProbeRatio,
};

Target target_from_name(const std::string& name);
std::string target_name(Target target);

struct SweepSpec {
    Target target = Target::TimeResolvedVariance;
    std::string parameter;      // e.g. "medium.delta", "pulse.width", "omega"
    std::vector<double> grid;   // strictly monotone, non-empty
    Scenario fixed;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CurveResult {
    std::string parameter_name;
    std::string observable_name;
    std::vector<double> parameter;
    std::vector<double> value;        // NaN where a point failed
    std::vector<double> uncertainty;
    std::vector<std::string> point_errors; // empty string where ok
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string config_snapshot; // JSON text of the fixed scenario
};

// Evaluates the target per grid point; points run independently (optionally
// on `threads` workers) and failures are recorded per point. Throws only if
// every point fails.
CurveResult run_sweep(const SweepSpec& spec, int threads = 1);

// Band-averaged conjugate-vs-probe output power slope, fitted through the
// origin over the seed powers. Lossless ideal: (G - 1)/G.
double conjugate_probe_ratio(const medium::MediumConfig& config,
                             const detection::PulseShape& shape,
                             const std::vector<double>& seed_powers);

// G inferred from a conjugate/probe slope: 1 / (1 - slope).
double gain_from_slope(double slope);

// Coarse grid then golden-section refinement of time_resolved_variance
// over the two-photon detuning; tolerance 2 pi 0.5 MHz on delta.
// Throws if the range does not bracket an interior minimum.
std::pair<double, double> find_optimum_delta(const Scenario& scenario,
                                             double delta_min, double delta_max);

// Root-finds coupling_C (raman_A held at a fixed ratio to it) so the pulse
// gain meets target_gain within 0.01.
medium::MediumConfig calibrate_coupling(double target_gain,
                                        const detection::PulseShape& shape,
                                        const medium::MediumConfig& base);

inline constexpr double default_raman_ratio = 0.3;

void write_curve_csv(const CurveResult& curve, const std::string& path);
void write_curve_json(const CurveResult& curve, const std::string& path);

} // namespace fwm::sweep
