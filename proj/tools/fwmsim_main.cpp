#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fwmpulse/config_io.hpp"
#include "fwmpulse/detection.hpp"
#include "fwmpulse/errors.hpp"
#include "fwmpulse/gaussian.hpp"
#include "fwmpulse/medium.hpp"
#include "fwmpulse/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;
constexpr int kExitConvergence = 4;

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

fwm::RunConfig load(const Options& opt)
{
    fwm::RunConfig config = fwm::load_config(opt.config_path);
    if (opt.seed) {
        config.scenario.chain.rng_seed = *opt.seed;
        config.has_seed = true;
    }
    return config;
}

void write_json_file(const json& j, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw fwm::ConfigError("cannot open output file " + path.string());
    out << j.dump(2) << "\n";
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int cmd_simulate(const Options& opt)
{
    const fwm::RunConfig config = load(opt);
    const auto& sc = config.scenario;
    const std::uint64_t hash = fwm::config_hash(sc);

    const double gain_cw = fwm::medium::cw_gain(sc.medium);
    const double gain_pulse = fwm::detection::band_average_gain(sc.medium, sc.pulse);

    const auto input = fwm::gaussian::coherent_input(sc.input);
    const double v = fwm::detection::time_resolved_variance(sc.medium, input, sc.pulse, sc.chain);
    const double v_corrected = fwm::gaussian::loss_correct(v, sc.chain.eta);

    // Headline squeezing figure: the loss-free variance at the optimum
    // two-photon detuning below the light-shifted resonance.
    fwm::sweep::Scenario lossless = sc;
    lossless.chain.eta = 1.0;
    double delta_star = sc.medium.delta;
    double v_star = fwm::gaussian::loss_correct(v, sc.chain.eta);
    if (sc.medium.coupling_C > 0.0) {
        const double delta_hi = fwm::medium::light_shift(sc.medium);
        std::tie(delta_star, v_star) = fwm::sweep::find_optimum_delta(
            lossless, fwm::constants::two_pi * 10e6, delta_hi);
    }

    // Frequency-resolved spectrum at unit efficiency over the validity band.
    std::vector<double> grid;
    for (double f = -50e6; f <= 50e6 + 1.0; f += 0.25e6)
        grid.push_back(fwm::constants::two_pi * f);
    const auto spectrum = fwm::gaussian::noise_spectrum(sc.medium, input, grid);

    fs::create_directories(opt.out_dir);
    {
        std::ofstream out(fs::path(opt.out_dir) / "spectrum.csv", std::ios::binary);
        if (!out)
            throw fwm::ConfigError("cannot open spectrum.csv");
        out << "# config_hash=" << hash << " seed=" << sc.chain.rng_seed << "\n";
        out << "frequency_hz,relative_intensity_noise\n";
        char buf[64];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", grid[i] / fwm::constants::two_pi);
            out << buf << ",";
            std::snprintf(buf, sizeof buf, "%.17g", spectrum.S[i]);
            out << buf << "\n";
        }
    }

    json summary;
    summary["config_hash"] = hash;
    summary["seed"] = sc.chain.rng_seed;
    summary["cw_gain"] = gain_cw;
    summary["pulse_gain"] = gain_pulse;
    summary["V"] = v;
    summary["V_corrected"] = v_corrected;
    summary["V_db"] = fwm::gaussian::db(v);
    summary["V_corrected_db"] = fwm::gaussian::db(v_corrected);
    summary["delta_star_hz"] = delta_star / fwm::constants::two_pi;
    summary["V_star"] = v_star;
    summary["V_star_db"] = fwm::gaussian::db(v_star);
    write_json_file(summary, fs::path(opt.out_dir) / "summary.json");
    std::cout << "simulate: pulse gain " << gain_pulse << ", V " << fwm::gaussian::db(v)
              << " dB (" << fwm::gaussian::db(v_corrected) << " dB corrected)\n";
    return 0;
}

int cmd_sweep(const Options& opt)
{
    const fwm::RunConfig config = load(opt);
    const auto spec = fwm::make_sweep_spec(config);
    const auto curve = fwm::sweep::run_sweep(spec, opt.threads);
    fs::create_directories(opt.out_dir);
    fwm::sweep::write_curve_csv(curve, (fs::path(opt.out_dir) / "sweep.csv").string());
    fwm::sweep::write_curve_json(curve, (fs::path(opt.out_dir) / "sweep.json").string());
    std::cout << "sweep: " << curve.parameter.size() << " points of "
              << curve.observable_name << " vs " << curve.parameter_name << "\n";
    return 0;
}

int cmd_detect(const Options& opt)
{
    const fwm::RunConfig config = load(opt);
    if (!config.has_seed)
        throw fwm::ConfigError("detect requires a seed (chain.rng_seed or --seed)");
    const auto& sc = config.scenario;
    const std::uint64_t hash = fwm::config_hash(sc);

    const auto input = fwm::gaussian::coherent_input(sc.input);
    auto record_fwm = fwm::detection::simulate_records(sc.medium, input, sc.pulse, sc.chain);
    record_fwm.meta.config_hash = hash;

    // Shot-noise reference at matched mean total charge.
    auto snl_chain = sc.chain;
    snl_chain.rng_seed = splitmix64(sc.chain.rng_seed ^ 0x534e4cULL);
    auto record_snl = fwm::detection::simulate_split_records(
        record_fwm.meta.mean_total_charge / sc.chain.eta, snl_chain);
    record_snl.meta.config_hash = hash;

    const auto report = fwm::detection::squeezing_report(record_snl, record_fwm,
                                                         sc.chain.rolling_window, sc.chain.eta);

    fs::create_directories(opt.out_dir);
    const fs::path out_dir(opt.out_dir);
    fwm::detection::write_record_csv(record_fwm, (out_dir / "record_fwm.csv").string());
    fwm::detection::write_record_binary(record_fwm, (out_dir / "record_fwm.bin").string());
    fwm::detection::write_record_csv(record_snl, (out_dir / "record_snl.csv").string());
    fwm::detection::write_record_binary(record_snl, (out_dir / "record_snl.bin").string());

    json j;
    j["config_hash"] = hash;
    j["seed"] = sc.chain.rng_seed;
    j["variance_ratio"] = report.ratio;
    j["measured_db"] = report.measured_db;
    j["corrected_db"] = report.corrected_db;
    j["se_measured_db"] = report.se_measured_db;
    j["se_corrected_db"] = report.se_corrected_db;
    write_json_file(j, out_dir / "squeezing.json");
    std::cout << "detect: " << report.measured_db << " dB measured, "
              << report.corrected_db << " dB corrected\n";
    return 0;
}

int cmd_calibrate(const Options& opt)
{
    fwm::RunConfig config = load(opt);
    const auto calibrated = fwm::sweep::calibrate_coupling(
        config.calibrate_target, config.scenario.pulse, config.scenario.medium);
    config.scenario.medium = calibrated;
    const double achieved =
        fwm::detection::band_average_gain(calibrated, config.scenario.pulse);

    fs::create_directories(opt.out_dir);
    const fs::path out_dir(opt.out_dir);
    fwm::save_config(config, (out_dir / "calibrated_config.json").string());

    json j;
    j["config_hash"] = fwm::config_hash(config.scenario);
    j["seed"] = config.scenario.chain.rng_seed;
    j["target_gain"] = config.calibrate_target;
    j["achieved_gain"] = achieved;
    j["coupling_c_per_m"] = calibrated.coupling_C;
    j["raman_a_per_m"] = calibrated.raman_A;
    write_json_file(j, out_dir / "calibrate_summary.json");
    std::cout << "calibrate: coupling_C " << calibrated.coupling_C
              << " /m for pulse gain " << achieved << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pulsed four-wave-mixing squeezing simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    std::uint64_t seed_value = 0;
    bool seed_given = false;
    app.add_option("--config", opt.config_path, "JSON run configuration")->required();
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--seed", seed_value, "RNG seed override")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--threads", opt.threads, "sweep worker count");

    auto* simulate = app.add_subcommand("simulate", "noise spectrum and pulse variance summary");
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep to CSV/JSON");
    auto* detect = app.add_subcommand("detect", "Monte Carlo balanced-detection records");
    auto* calibrate = app.add_subcommand("calibrate", "fit coupling_C to the target pulse gain");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (seed_given)
        opt.seed = seed_value;

    try {
        if (simulate->parsed())
            return cmd_simulate(opt);
        if (sweep_cmd->parsed())
            return cmd_sweep(opt);
        if (detect->parsed())
            return cmd_detect(opt);
        if (calibrate->parsed())
            return cmd_calibrate(opt);
        std::cerr << "error: no subcommand\n";
        return kExitConfig;
    } catch (const fwm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fwm::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const fwm::PhysicalityError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    }
}
