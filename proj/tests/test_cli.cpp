// End-to-end tests of the fwmsim binary; the ctest harness passes its path
// via the FWMSIM_BIN environment variable.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string binary()
{
    const char* env = std::getenv("FWMSIM_BIN");
    REQUIRE_MESSAGE(env != nullptr,
                    "FWMSIM_BIN must point at the fwmsim binary (set by ctest)");
    return env;
}

int run_cli(const std::string& args)
{
    const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir()
{
    const fs::path dir = fs::temp_directory_path() / "fwm_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const char* name, const json& j)
{
    const fs::path path = scratch_dir() / name;
    std::ofstream(path) << j.dump(2);
    return path;
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    REQUIRE(in.good());
    return json::parse(in);
}

} // namespace

TEST_CASE("simulate on an empty medium reports shot-noise figures")
{
    const auto config = write_config("empty.json", json{{"medium", json::object()}});
    const auto out = scratch_dir() / "empty_out";
    REQUIRE(run_cli("simulate --config " + config.string() + " --out " + out.string()) == 0);
    const json summary = read_json(out / "summary.json");
    CHECK(summary["cw_gain"].get<double>() == doctest::Approx(1.0));
    CHECK(summary["pulse_gain"].get<double>() == doctest::Approx(1.0));
    CHECK(summary["V"].get<double>() == doctest::Approx(1.0));
    CHECK(summary["V_db"].get<double>() == doctest::Approx(0.0));
    CHECK(fs::exists(out / "spectrum.csv"));
}

TEST_CASE("config errors exit with code 2 and name the field")
{
    const auto missing = write_config("missing.json", json{{"pulse", json::object()}});
    CHECK(run_cli("simulate --config " + missing.string()) == 2);

    const std::string cmd = binary() + " simulate --config " +
                            missing.string() + " 2>" +
                            (scratch_dir() / "stderr.txt").string();
    std::system(cmd.c_str());
    std::ifstream err(scratch_dir() / "stderr.txt");
    std::string text((std::istreambuf_iterator<char>(err)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("medium") != std::string::npos);

    const auto unknown =
        write_config("unknown.json", json{{"medium", {{"detuning_hz", 1.0}}}});
    CHECK(run_cli("simulate --config " + unknown.string()) == 2);
    CHECK(run_cli("simulate --config /nonexistent.json") == 2);
}

TEST_CASE("calibrate writes a new config whose rerun gain hits the target")
{
    const auto config = write_config(
        "to_calibrate.json",
        json{{"medium", json::object()}, {"calibrate", {{"target_gain", 4.2}}}});
    const auto out = scratch_dir() / "cal_out";
    REQUIRE(run_cli("calibrate --config " + config.string() + " --out " + out.string()) == 0);

    const json cal_summary = read_json(out / "calibrate_summary.json");
    CHECK(cal_summary["achieved_gain"].get<double>() == doctest::Approx(4.2).epsilon(0.025));
    CHECK(fs::exists(out / "calibrated_config.json"));
    // the input file is untouched
    CHECK(read_json(config)["medium"].empty());

    const auto sim_out = scratch_dir() / "cal_sim_out";
    REQUIRE(run_cli("simulate --config " + (out / "calibrated_config.json").string() +
                    " --out " + sim_out.string()) == 0);
    const json summary = read_json(sim_out / "summary.json");
    CHECK(summary["pulse_gain"].get<double>() == doctest::Approx(4.2).epsilon(0.025));
    // headline optimum-detuning squeezing figure
    CHECK(summary["V_star_db"].get<double>() < -1.0);
    CHECK(summary["V_star_db"].get<double>() > -2.2);
    CHECK(summary["delta_star_hz"].get<double>() / 1e6 > 10.0);
    CHECK(summary["delta_star_hz"].get<double>() / 1e6 < 30.0);
}

TEST_CASE("detect requires a seed and produces matched records")
{
    json cfg{{"medium", {{"coupling_c_per_m", 4.9e9}, {"raman_a_per_m", 1.47e9}}},
             {"chain", {{"n_samples", 2000}}}};
    const auto config = write_config("detect.json", cfg);
    CHECK(run_cli("detect --config " + config.string()) == 2);

    const auto out = scratch_dir() / "detect_out";
    REQUIRE(run_cli("detect --config " + config.string() + " --seed 12345 --out " +
                    out.string()) == 0);
    for (const char* name :
         {"record_fwm.csv", "record_fwm.bin", "record_snl.csv", "record_snl.bin"})
        CHECK(fs::exists(out / name));
    const json report = read_json(out / "squeezing.json");
    CHECK(report["seed"].get<std::uint64_t>() == 12345);
    CHECK(report["variance_ratio"].get<double>() > 0.0);
}

TEST_CASE("sweep subcommand writes CSV and JSON curves")
{
    json cfg{{"medium", {{"coupling_c_per_m", 4.9e9}, {"raman_a_per_m", 1.47e9}}},
             {"sweep", {{"target", "cw_gain"},
                        {"parameter", "medium.delta_hz"},
                        {"grid", {{"min", 10e6}, {"max", 30e6}, {"n", 5}}}}}};
    const auto config = write_config("sweep.json", cfg);
    const auto out = scratch_dir() / "sweep_out";
    REQUIRE(run_cli("sweep --config " + config.string() + " --out " + out.string() +
                    " --threads 4") == 0);
    CHECK(fs::exists(out / "sweep.csv"));
    const json curve = read_json(out / "sweep.json");
    CHECK(curve["parameter"].size() == 5);
    CHECK(curve["observable_name"] == "cw_gain");
}

TEST_CASE("usage errors exit with the config code")
{
    CHECK(run_cli("simulate") == 2);          // missing --config
    CHECK(run_cli("--config x.json") == 2);   // missing subcommand
}
