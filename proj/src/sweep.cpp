#include "fwmpulse/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "fwmpulse/config_io.hpp"
#include "fwmpulse/errors.hpp"

namespace fwm::sweep {

namespace {

using json = nlohmann::ordered_json;

using Setter = std::function<void(Scenario&, double)>;

Setter resolve_parameter(const std::string& path)
{
    if (path == "medium.delta") return [](Scenario& s, double v) { s.medium.delta = v; };
    if (path == "medium.delta1") return [](Scenario& s, double v) { s.medium.delta1 = v; };
    if (path == "medium.gamma") return [](Scenario& s, double v) { s.medium.gamma = v; };
    if (path == "medium.Gamma") return [](Scenario& s, double v) { s.medium.Gamma = v; };
    if (path == "medium.coupling_C") return [](Scenario& s, double v) { s.medium.coupling_C = v; };
    if (path == "medium.raman_A") return [](Scenario& s, double v) { s.medium.raman_A = v; };
    if (path == "medium.pump_power") return [](Scenario& s, double v) { s.medium.pump_power = v; };
    if (path == "medium.pump_waist") return [](Scenario& s, double v) { s.medium.pump_waist = v; };
    if (path == "medium.temperature") return [](Scenario& s, double v) { s.medium.temperature = v; };
    if (path == "medium.cell_length") return [](Scenario& s, double v) { s.medium.cell_length = v; };
    if (path == "pulse.width") return [](Scenario& s, double v) { s.pulse.width = v; };
    if (path == "pulse.rise_time") return [](Scenario& s, double v) { s.pulse.rise_time = v; };
    if (path == "chain.eta") return [](Scenario& s, double v) { s.chain.eta = v; };
    if (path == "chain.bandwidth") return [](Scenario& s, double v) { s.chain.bandwidth = v; };
    if (path == "input.flux") return [](Scenario& s, double v) { s.input.flux = v; };
    if (path == "input.excess_noise_db")
        return [](Scenario& s, double v) { s.input.excess_noise_db = v; };
    throw ConfigError("sweep: unknown parameter path '" + path + "'");
}

double evaluate_target(const SweepSpec& spec, double grid_value)
{
    Scenario sc = spec.fixed;
    if (spec.parameter != "omega")
        resolve_parameter(spec.parameter)(sc, grid_value);

    switch (spec.target) {
    case Target::CwGain:
        return medium::cw_gain(sc.medium);
    case Target::BandAverageGain:
        return detection::band_average_gain(sc.medium, sc.pulse);
    case Target::TimeResolvedVariance:
        return detection::time_resolved_variance(
            sc.medium, gaussian::coherent_input(sc.input), sc.pulse, sc.chain);
    case Target::NoiseSpectrum: {
        if (spec.parameter != "omega")
            throw ConfigError("sweep: noise_spectrum sweeps the sideband frequency; "
                              "set parameter to 'omega'");
        const auto result = gaussian::noise_spectrum(
            sc.medium, gaussian::coherent_input(sc.input), {grid_value});
        return result.S.front();
    }
    case Target::ConjugateProbeRatio: {
        const double flux = sc.input.flux;
        return conjugate_probe_ratio(sc.medium, sc.pulse,
                                     {0.2 * flux, 0.4 * flux, 0.6 * flux, 0.8 * flux, flux});
    }
    }
    throw std::logic_error("sweep: unhandled target");
}

} // namespace

Target target_from_name(const std::string& name)
{
    if (name == "cw_gain") return Target::CwGain;
    if (name == "band_average_gain") return Target::BandAverageGain;
    if (name == "time_resolved_variance") return Target::TimeResolvedVariance;
    if (name == "noise_spectrum") return Target::NoiseSpectrum;
    if (name == "conjugate_probe_ratio") return Target::ConjugateProbeRatio;
    throw ConfigError("sweep: unknown target '" + name + "'");
}

std::string target_name(Target target)
{
    switch (target) {
    case Target::CwGain: return "cw_gain";
    case Target::BandAverageGain: return "band_average_gain";
    case Target::TimeResolvedVariance: return "time_resolved_variance";
    case Target::NoiseSpectrum: return "noise_spectrum";
    case Target::ConjugateProbeRatio: return "conjugate_probe_ratio";
    }
    return "unknown";
}

void SweepSpec::validate() const
{
    if (grid.empty())
        throw ConfigError("sweep.grid: must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1]) && !(grid[i] < grid[i - 1]))
            throw ConfigError("sweep.grid: must be strictly monotone");
        if (i > 1 && (grid[i] > grid[i - 1]) != (grid[1] > grid[0]))
            throw ConfigError("sweep.grid: must be strictly monotone");
    }
    if (parameter != "omega")
        resolve_parameter(parameter); // throws on unknown path
    else if (target != Target::NoiseSpectrum)
        throw ConfigError("sweep.parameter: 'omega' is only valid for noise_spectrum");
}

CurveResult run_sweep(const SweepSpec& spec, int threads)
{
    spec.validate();
    const std::size_t n = spec.grid.size();

    CurveResult curve;
    curve.parameter_name = spec.parameter;
    curve.observable_name = target_name(spec.target);
    curve.parameter = spec.grid;
    curve.value.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.uncertainty.assign(n, 0.0);
    curve.point_errors.assign(n, std::string());
    curve.config_hash = config_hash(spec.fixed);
    curve.seed = spec.seed;
    curve.config_snapshot = scenario_to_json(spec.fixed).dump();

    auto work = [&](std::size_t i) {
        try {
            curve.value[i] = evaluate_target(spec, spec.grid[i]);
        } catch (const std::exception& e) {
            curve.point_errors[i] = e.what();
        }
    };

    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (n_workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool)
            th.join();
    }

    bool any_ok = false;
    for (std::size_t i = 0; i < n; ++i)
        any_ok = any_ok || curve.point_errors[i].empty();
    if (!any_ok)
        throw std::runtime_error("run_sweep: every grid point failed; first error: " +
                                 curve.point_errors.front());
    return curve;
}

double conjugate_probe_ratio(const medium::MediumConfig& config,
                             const detection::PulseShape& shape,
                             const std::vector<double>& seed_powers)
{
    if (seed_powers.size() < 3)
        throw std::invalid_argument("conjugate_probe_ratio: need >= 3 seed powers");

    const std::vector<double> grid = detection::default_omega_grid(shape);
    const std::vector<double> weights = detection::pulse_spectrum(shape, grid);
    double gain_probe = 0.0, gain_conj = 0.0;
    const double validity = constants::two_pi * 50e6;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t11 = 1.0, t21 = 0.0;
        if (std::abs(grid[i]) <= validity) {
            const auto tp = medium::transfer_point(config, grid[i]);
            t11 = std::norm(tp.T(0, 0));
            t21 = std::norm(tp.T(1, 0));
        }
        gain_probe += weights[i] * t11;
        gain_conj += weights[i] * t21;
    }

    double sxy = 0.0, sxx = 0.0;
    for (double p : seed_powers) {
        if (!(p > 0.0))
            throw std::invalid_argument("conjugate_probe_ratio: powers must be positive");
        const double probe_out = gain_probe * p;
        const double conj_out = gain_conj * p;
        sxy += probe_out * conj_out;
        sxx += probe_out * probe_out;
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("conjugate_probe_ratio: degenerate fit");
    return sxy / sxx;
}

double gain_from_slope(double slope)
{
    if (!(slope < 1.0))
        throw std::domain_error("gain_from_slope: slope must be < 1");
    return 1.0 / (1.0 - slope);
}

std::pair<double, double> find_optimum_delta(const Scenario& scenario,
                                             double delta_min, double delta_max)
{
    if (!(delta_max > delta_min))
        throw std::domain_error("find_optimum_delta: empty range");

    const auto objective = [&](double delta) {
        Scenario sc = scenario;
        sc.medium.delta = delta;
        return detection::time_resolved_variance(
            sc.medium, gaussian::coherent_input(sc.input), sc.pulse, sc.chain);
    };

    constexpr int kCoarse = 21;
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    std::vector<double> xs(kCoarse), fs(kCoarse);
    for (int i = 0; i < kCoarse; ++i) {
        xs[i] = delta_min + (delta_max - delta_min) * i / (kCoarse - 1);
        fs[i] = objective(xs[i]);
        if (fs[i] < best) {
            best = fs[i];
            best_idx = i;
        }
    }
    if (best_idx <= 0 || best_idx >= kCoarse - 1)
        throw std::domain_error("find_optimum_delta: range does not bracket an interior minimum");

    // Golden-section refinement to 2 pi 0.5 MHz.
    const double tol = constants::two_pi * 0.5e6;
    const double inv_phi = 0.6180339887498949;
    double a = xs[best_idx - 1], b = xs[best_idx + 1];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double delta_star = 0.5 * (a + b);
    return {delta_star, objective(delta_star)};
}

medium::MediumConfig calibrate_coupling(double target_gain,
                                        const detection::PulseShape& shape,
                                        const medium::MediumConfig& base)
{
    if (!(target_gain >= 1.0))
        throw std::domain_error("calibrate_coupling: target gain must be >= 1");
    const double ratio = base.coupling_C > 0.0 ? base.raman_A / base.coupling_C
                                               : default_raman_ratio;
    medium::MediumConfig config = base;
    auto gain_at = [&](double c) {
        config.coupling_C = c;
        config.raman_A = ratio * c;
        return detection::band_average_gain(config, shape);
    };

    if (target_gain == 1.0) {
        gain_at(0.0);
        return config;
    }

    double lo = 0.0, hi = 1e9;
    while (gain_at(hi) < target_gain) {
        hi *= 2.0;
        if (hi > 1e14)
            throw ConvergenceError("calibrate_coupling: target gain unreachable within coupling bounds");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double g = gain_at(mid);
        if (std::abs(g - target_gain) <= 0.005) {
            gain_at(mid);
            return config;
        }
        if (g < target_gain)
            lo = mid;
        else
            hi = mid;
    }
    throw ConvergenceError("calibrate_coupling: bisection did not converge");
}

namespace {

int interior_minimum_index(const CurveResult& curve)
{
    int best = -1;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.value.size(); ++i) {
        if (curve.point_errors[i].empty() && curve.value[i] < best_v) {
            best_v = curve.value[i];
            best = static_cast<int>(i);
        }
    }
    if (best <= 0 || best >= static_cast<int>(curve.value.size()) - 1)
        return -1;
    return best;
}

} // namespace

void write_curve_csv(const CurveResult& curve, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("write_curve_csv: cannot open " + path);
    const int min_idx = interior_minimum_index(curve);
    char buf[64];
    out << "# config_hash=" << curve.config_hash << " seed=" << curve.seed << "\n";
    out << curve.parameter_name << "," << curve.observable_name << ",uncertainty,interior_minimum\n";
    for (std::size_t i = 0; i < curve.parameter.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", curve.parameter[i]);
        out << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", curve.value[i]);
        out << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", curve.uncertainty[i]);
        out << buf << "," << (static_cast<int>(i) == min_idx ? 1 : 0) << "\n";
    }
}

void write_curve_json(const CurveResult& curve, const std::string& path)
{
    json j;
    j["parameter_name"] = curve.parameter_name;
    j["observable_name"] = curve.observable_name;
    j["config_hash"] = curve.config_hash;
    j["seed"] = curve.seed;
    j["parameter"] = curve.parameter;
    j["value"] = curve.value;
    j["uncertainty"] = curve.uncertainty;
    j["point_errors"] = curve.point_errors;
    if (!curve.config_snapshot.empty())
        j["config"] = json::parse(curve.config_snapshot);
    const int min_idx = interior_minimum_index(curve);
    if (min_idx >= 0)
        j["interior_minimum_index"] = min_idx;

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("write_curve_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

} // namespace fwm::sweep
