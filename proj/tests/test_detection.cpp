#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "fwmpulse/constants.hpp"
#include "fwmpulse/detection.hpp"
#include "fwmpulse/errors.hpp"
#include "fwmpulse/gaussian.hpp"

using namespace fwm;
using fwm::constants::two_pi;

namespace {

double sinc(double x) { return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x; }

std::filesystem::path temp_file(const char* name)
{
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("pulse spectrum of an ideal square pulse follows sinc^2")
{
    detection::PulseShape shape;
    shape.rise_time = 0.0;
    const auto grid = detection::default_omega_grid(shape);
    const auto weights = detection::pulse_spectrum(shape, grid);
    REQUIRE(weights.size() == grid.size());

    double total = 0.0;
    std::size_t center = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        total += weights[i];
        if (grid[i] == 0.0)
            center = i;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // shape ratio against the analytic transform at a few fine-grid points
    for (double f_mhz : {2.0, 5.0, 11.0}) {
        const double omega = two_pi * f_mhz * 1e6;
        std::size_t i = 0;
        while (std::abs(grid[i] - omega) > 1.0)
            ++i;
        const double s = sinc(0.5 * omega * shape.width);
        CHECK(weights[i] / weights[center] == doctest::Approx(s * s).epsilon(1e-6));
    }

    // first null at 2 pi / width = 20 MHz for the 50 ns pulse
    std::size_t inull = 0;
    while (std::abs(grid[inull] - two_pi * 20e6) > 1.0)
        ++inull;
    CHECK(weights[inull] < 1e-9 * weights[center]);
}

TEST_CASE("gaussian pulse weights are symmetric and unimodal")
{
    detection::PulseShape shape;
    shape.kind = detection::PulseShape::Kind::Gaussian;
    shape.width = 40e-9;
    const auto grid = detection::default_omega_grid(shape);
    const auto w = detection::pulse_spectrum(shape, grid);
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i)
        CHECK(w[i] == doctest::Approx(w[n - 1 - i]).epsilon(1e-9));
    // non-decreasing up to the center on the uniform fine grid
    const std::size_t center = n / 2;
    bool unimodal = true;
    for (std::size_t i = 1; i <= center; ++i)
        if (grid[i] >= -two_pi * 45e6 && w[i] < w[i - 1])
            unimodal = false;
    CHECK(unimodal);
}

TEST_CASE("wide pulses concentrate their spectrum at zero")
{
    detection::PulseShape shape;
    shape.kind = detection::PulseShape::Kind::Gaussian;
    shape.width = 800e-9;
    shape.repetition_period = 10e-6;
    const auto grid = detection::default_omega_grid(shape);
    const auto w = detection::pulse_spectrum(shape, grid);
    double mass_near_zero = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i]) <= two_pi * 2e6)
            mass_near_zero += w[i];
    CHECK(mass_near_zero > 0.999);
}

TEST_CASE("pulse spectrum rejects truncated grids")
{
    detection::PulseShape shape;
    std::vector<double> narrow;
    for (double w = -two_pi * 20e6; w <= two_pi * 20e6; w += two_pi * 0.5e6)
        narrow.push_back(w);
    CHECK_THROWS_AS(detection::pulse_spectrum(shape, narrow), std::domain_error);
}

TEST_CASE("pulse shape validation")
{
    detection::PulseShape shape;
    shape.width = 2e-6; // exceeds the repetition period
    CHECK_THROWS_AS(shape.validate(), std::domain_error);
    shape = detection::PulseShape{};
    shape.rise_time = 40e-9; // not < width / 2
    CHECK_THROWS_AS(shape.validate(), std::domain_error);
}

TEST_CASE("band average gain limits")
{
    medium::MediumConfig empty;
    detection::PulseShape shape;
    for (double width : {20e-9, 50e-9, 200e-9}) {
        shape.width = width;
        shape.rise_time = 2e-9;
        CHECK(detection::band_average_gain(empty, shape) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }

    // a broad-linewidth medium probed on its light-shifted resonance, so the
    // gain spectrum is flat over the long pulse's spectral lobe
    medium::MediumConfig coupled;
    coupled.coupling_C = 4.9e9;
    coupled.raman_A = 0.3 * coupled.coupling_C;
    coupled.gamma = two_pi * 10e6;
    coupled.delta = medium::light_shift(coupled);
    const double cw = medium::cw_gain(coupled);
    shape.width = 2e-6;
    shape.rise_time = 5e-9;
    shape.repetition_period = 10e-6;
    CHECK(detection::band_average_gain(coupled, shape) == doctest::Approx(cw).epsilon(0.01));
}

TEST_CASE("time resolved variance is normalized to shot noise")
{
    medium::MediumConfig empty;
    detection::PulseShape shape;
    detection::DetectionChain chain;
    const auto input = gaussian::coherent_input(4e6, 0.0);
    chain.eta = 1.0;
    CHECK(detection::time_resolved_variance(empty, input, shape, chain) ==
          doctest::Approx(1.0).epsilon(1e-10));
    chain.eta = 0.8;
    CHECK(detection::time_resolved_variance(empty, input, shape, chain) ==
          doctest::Approx(1.0).epsilon(1e-10));

    // flat excess input noise passes straight through an empty medium
    const auto noisy = gaussian::coherent_input(4e6, 2.0);
    chain.eta = 1.0;
    const double ex = gaussian::undb(2.0);
    CHECK(detection::time_resolved_variance(empty, noisy, shape, chain) ==
          doctest::Approx(ex).epsilon(1e-10));
    chain.eta = 0.7468;
    CHECK(detection::time_resolved_variance(empty, noisy, shape, chain) ==
          doctest::Approx(chain.eta * ex + 1.0 - chain.eta).epsilon(1e-10));
}

TEST_CASE("rolling average subtraction removes constants and drifts")
{
    detection::PulseRecord record;
    record.charges.assign(500, 3.7);
    const auto flat = detection::rolling_average_subtract(record, 100);
    REQUIRE(flat.charges.size() == 400);
    for (double c : flat.charges)
        CHECK(c == doctest::Approx(0.0));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 2.0);
    const int n = 1000000, window = 50;
    detection::PulseRecord white;
    white.charges.resize(n);
    for (auto& c : white.charges)
        c = normal(rng);
    const auto cleaned = detection::rolling_average_subtract(white, window);
    const double raw = detection::sample_variance(cleaned.charges);
    CHECK(raw == doctest::Approx(4.0 * (1.0 + 1.0 / window)).epsilon(0.01));
    CHECK(detection::record_variance(white, window) == doctest::Approx(4.0).epsilon(0.01));

    // slow drift: per-window slope much smaller than sigma
    detection::PulseRecord drifting = white;
    for (int k = 0; k < n; ++k)
        drifting.charges[k] += 1e-4 * k; // 5e-3 per window vs sigma = 2
    CHECK(detection::record_variance(drifting, window) ==
          doctest::Approx(detection::record_variance(white, window)).epsilon(0.01));

    CHECK_THROWS_AS(detection::rolling_average_subtract(flat, 399), std::domain_error);
}

TEST_CASE("split records are Poissonian and deterministic")
{
    detection::DetectionChain chain;
    chain.n_samples = 20000;
    chain.rng_seed = 42;
    const double photons = 1e6;
    const auto rec = detection::simulate_split_records(photons, chain);
    REQUIRE(rec.charges.size() == 20000);
    CHECK(rec.meta.mean_total_charge == doctest::Approx(chain.eta * photons));

    const double v = detection::record_variance(rec, chain.rolling_window);
    const double expected = chain.eta * photons; // thinned Poisson difference
    const double se = expected * std::sqrt(2.0 / chain.n_samples);
    CHECK(std::abs(v - expected) < 3.0 * se);

    const auto rerun = detection::simulate_split_records(photons, chain);
    CHECK(rerun.charges == rec.charges);
    chain.rng_seed = 43;
    const auto other = detection::simulate_split_records(photons, chain);
    CHECK(other.charges != rec.charges);
}

TEST_CASE("record files round-trip")
{
    detection::DetectionChain chain;
    chain.n_samples = 400;
    chain.rng_seed = 9;
    auto rec = detection::simulate_split_records(5e5, chain);
    rec.meta.config_hash = 0x1234abcdULL;

    const auto bin = temp_file("fwm_rec_test.bin");
    detection::write_record_binary(rec, bin.string());
    const auto back = detection::read_record_binary(bin.string());
    CHECK(back.meta.seed == rec.meta.seed);
    CHECK(back.meta.config_hash == rec.meta.config_hash);
    CHECK(back.meta.mean_total_charge == rec.meta.mean_total_charge);
    CHECK(back.charges == rec.charges);

    const auto csv = temp_file("fwm_rec_test.csv");
    detection::write_record_csv(rec, csv.string());
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.find("seed=9") != std::string::npos);
    std::getline(in, line);
    CHECK(line == "index,charge");
    std::filesystem::remove(bin);
    std::filesystem::remove(csv);
}

TEST_CASE("shot noise calibration is linear through the electronic floor")
{
    detection::DetectionChain chain;
    chain.n_samples = 20000;
    chain.rng_seed = 5;
    const std::vector<double> powers = {10e-12, 40e-12,  70e-12,  100e-12,
                                        130e-12, 160e-12, 190e-12, 220e-12};
    const auto fit = detection::shot_noise_calibration(powers, chain);
    CHECK(fit.r_squared > 0.999);
    CHECK(fit.slope > 0.0);

    // doubling every power leaves the fitted line's slope unchanged
    std::vector<double> doubled;
    for (double p : powers)
        doubled.push_back(2.0 * p);
    const auto fit2 = detection::shot_noise_calibration(doubled, chain);
    CHECK(fit2.slope == doctest::Approx(fit.slope).epsilon(0.05));

    CHECK_THROWS_AS(detection::shot_noise_calibration({1e-12, 1e-12, 1e-12, 1e-12}, chain),
                    std::invalid_argument);
}

TEST_CASE("squeezing report reproduces the reference ratio")
{
    // synthetic white-noise records with an exact variance ratio
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = 10000;
    detection::PulseRecord snl, fwm_rec;
    snl.charges.resize(n);
    fwm_rec.charges.resize(n);
    const double ratio = gaussian::undb(-0.96);
    for (int k = 0; k < n; ++k) {
        const double z = normal(rng);
        snl.charges[k] = z;
        fwm_rec.charges[k] = std::sqrt(ratio) * z;
    }
    snl.meta.mean_total_charge = fwm_rec.meta.mean_total_charge = 1e6;

    const auto report = detection::squeezing_report(snl, fwm_rec, 100, 0.7468);
    CHECK(report.ratio == doctest::Approx(ratio).epsilon(1e-9));
    CHECK(report.measured_db == doctest::Approx(-0.96).epsilon(1e-6));
    CHECK(report.corrected_db == doctest::Approx(-1.34).epsilon(0.005));
    CHECK(report.se_measured_db > 0.0);

    // identical records: exactly 0 dB
    const auto null_report = detection::squeezing_report(snl, snl, 100, 0.7468);
    CHECK(null_report.measured_db == doctest::Approx(0.0));

    // excess noise: positive dB, correction moves further from 0
    detection::PulseRecord hot = snl;
    for (auto& c : hot.charges)
        c *= 1.2;
    const auto hot_report = detection::squeezing_report(snl, hot, 100, 0.7468);
    CHECK(hot_report.measured_db > 0.0);
    CHECK(hot_report.corrected_db > hot_report.measured_db);

    detection::PulseRecord mismatched = fwm_rec;
    mismatched.meta.mean_total_charge = 2e6;
    CHECK_THROWS_AS(detection::squeezing_report(snl, mismatched, 100, 0.7468),
                    std::invalid_argument);
}

TEST_CASE("photons per pulse at the D1 wavelength")
{
    // 1 uW for 1 us at 795 nm: E_photon = h c / lambda = 2.4987e-19 J
    CHECK(detection::photons_per_pulse(1e-6, 1e-6) ==
          doctest::Approx(1e-12 / 2.49878e-19).epsilon(1e-4));
}

TEST_CASE("detection chain validation")
{
    detection::DetectionChain chain;
    chain.eta = 0.0;
    CHECK_THROWS_AS(chain.validate(), std::domain_error);
    chain = detection::DetectionChain{};
    chain.n_samples = 100;
    chain.rolling_window = 100;
    CHECK_THROWS_AS(chain.validate(), std::domain_error);
}
