#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fwmpulse/config_io.hpp"
#include "fwmpulse/detection.hpp"
#include "fwmpulse/errors.hpp"
#include "fwmpulse/gaussian.hpp"
#include "fwmpulse/medium.hpp"
#include "fwmpulse/sweep.hpp"

namespace py = pybind11;
using namespace fwm;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Relative-intensity squeezing simulator for pulsed four-wave "
              "mixing in a double-lambda vapor";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<PhysicalityError>(m, "PhysicalityError");
    py::register_exception<ConvergenceError>(m, "ConvergenceError");

    // ---- medium ----
    py::class_<medium::MediumConfig>(m, "MediumConfig")
        .def(py::init<>())
        .def_readwrite("delta1", &medium::MediumConfig::delta1)
        .def_readwrite("delta", &medium::MediumConfig::delta)
        .def_readwrite("omega_hf", &medium::MediumConfig::omega_hf)
        .def_readwrite("Gamma", &medium::MediumConfig::Gamma)
        .def_readwrite("gamma", &medium::MediumConfig::gamma)
        .def_readwrite("pump_power", &medium::MediumConfig::pump_power)
        .def_readwrite("pump_waist", &medium::MediumConfig::pump_waist)
        .def_readwrite("probe_waist", &medium::MediumConfig::probe_waist)
        .def_readwrite("cell_length", &medium::MediumConfig::cell_length)
        .def_readwrite("temperature", &medium::MediumConfig::temperature)
        .def_readwrite("coupling_C", &medium::MediumConfig::coupling_C)
        .def_readwrite("raman_A", &medium::MediumConfig::raman_A)
        .def("validate", &medium::MediumConfig::validate);

    py::class_<medium::TransferPoint>(m, "TransferPoint")
        .def_readonly("T", &medium::TransferPoint::T)
        .def_readonly("noise_sym", &medium::TransferPoint::noise_sym)
        .def_readonly("noise_comm", &medium::TransferPoint::noise_comm);

    m.def("vapor_density", &medium::vapor_density, py::arg("temperature_c"));
    m.def("rabi_frequency", &medium::rabi_frequency, py::arg("power_w"),
          py::arg("waist_m"));
    m.def("light_shift", &medium::light_shift, py::arg("config"));
    m.def("transfer_point", &medium::transfer_point, py::arg("config"),
          py::arg("omega"));
    m.def("cw_gain", &medium::cw_gain, py::arg("config"));
    m.def("is_physical", &medium::is_physical, py::arg("transfer_point"),
          py::arg("tol") = 1e-9);

    // ---- gaussian ----
    py::class_<gaussian::GaussianState>(m, "GaussianState")
        .def(py::init<>())
        .def_readwrite("mean", &gaussian::GaussianState::mean)
        .def_readwrite("cov", &gaussian::GaussianState::cov)
        .def("validate", &gaussian::GaussianState::validate);

    py::class_<gaussian::InputField>(m, "InputField")
        .def(py::init<>())
        .def_readwrite("flux", &gaussian::InputField::flux)
        .def_readwrite("excess_noise_db", &gaussian::InputField::excess_noise_db);

    py::class_<gaussian::FockStatistics>(m, "FockStatistics")
        .def_readonly("mean_s", &gaussian::FockStatistics::mean_s)
        .def_readonly("mean_i", &gaussian::FockStatistics::mean_i)
        .def_readonly("var_diff", &gaussian::FockStatistics::var_diff)
        .def_readonly("norm", &gaussian::FockStatistics::norm);

    m.def("coherent_input",
          py::overload_cast<double, double>(&gaussian::coherent_input),
          py::arg("flux"), py::arg("excess_noise_db") = 0.0);
    m.def("two_arm_coherent", &gaussian::two_arm_coherent, py::arg("flux_s"),
          py::arg("flux_i"));
    m.def("apply_transfer", &gaussian::apply_transfer, py::arg("state"),
          py::arg("transfer_point"));
    m.def("apply_loss", &gaussian::apply_loss, py::arg("state"),
          py::arg("eta_s"), py::arg("eta_i"));
    m.def("intensity_difference_variance",
          &gaussian::intensity_difference_variance, py::arg("state"));
    m.def("ideal_twin_beam_noise", &gaussian::ideal_twin_beam_noise,
          py::arg("gain"));
    m.def("loss_correct", &gaussian::loss_correct, py::arg("v_measured"),
          py::arg("eta"));
    m.def("db", &gaussian::db, py::arg("v"));
    m.def("undb", &gaussian::undb, py::arg("d"));
    m.def("min_symplectic_eigenvalue", &gaussian::min_symplectic_eigenvalue,
          py::arg("cov"));
    m.def("fock_tms_statistics", &gaussian::fock_tms_statistics,
          py::arg("squeeze_r"), py::arg("seed_alpha"), py::arg("cutoff"));
    m.def(
        "noise_spectrum",
        [](const medium::MediumConfig& config, const gaussian::GaussianState& input,
           const std::vector<double>& grid) {
            const auto result = gaussian::noise_spectrum(config, input, grid);
            return py::make_tuple(result.omega_grid, result.S);
        },
        py::arg("config"), py::arg("input"), py::arg("omega_grid"),
        "Returns (omega_grid, S) with S = 1 at the shot-noise limit");

    // ---- detection ----
    py::class_<detection::PulseShape> pulse(m, "PulseShape");
    py::enum_<detection::PulseShape::Kind>(pulse, "Kind")
        .value("Square", detection::PulseShape::Kind::Square)
        .value("Gaussian", detection::PulseShape::Kind::Gaussian);
    pulse.def(py::init<>())
        .def_readwrite("kind", &detection::PulseShape::kind)
        .def_readwrite("width", &detection::PulseShape::width)
        .def_readwrite("rise_time", &detection::PulseShape::rise_time)
        .def_readwrite("repetition_period", &detection::PulseShape::repetition_period)
        .def("validate", &detection::PulseShape::validate);

    py::class_<detection::DetectionChain>(m, "DetectionChain")
        .def(py::init<>())
        .def_readwrite("eta", &detection::DetectionChain::eta)
        .def_readwrite("bandwidth", &detection::DetectionChain::bandwidth)
        .def_readwrite("amp_response", &detection::DetectionChain::amp_response)
        .def_readwrite("electronic_noise_var",
                       &detection::DetectionChain::electronic_noise_var)
        .def_readwrite("n_samples", &detection::DetectionChain::n_samples)
        .def_readwrite("rolling_window", &detection::DetectionChain::rolling_window)
        .def_readwrite("rng_seed", &detection::DetectionChain::rng_seed)
        .def("validate", &detection::DetectionChain::validate);

    py::class_<detection::PulseRecord>(m, "PulseRecord")
        .def_readonly("charges", &detection::PulseRecord::charges)
        .def_property_readonly(
            "seed", [](const detection::PulseRecord& r) { return r.meta.seed; })
        .def_property_readonly("mean_total_charge",
                               [](const detection::PulseRecord& r) {
                                   return r.meta.mean_total_charge;
                               });

    py::class_<detection::CalibrationFit>(m, "CalibrationFit")
        .def_readonly("slope", &detection::CalibrationFit::slope)
        .def_readonly("intercept", &detection::CalibrationFit::intercept)
        .def_readonly("r_squared", &detection::CalibrationFit::r_squared)
        .def_readonly("residuals", &detection::CalibrationFit::residuals);

    py::class_<detection::SqueezingReport>(m, "SqueezingReport")
        .def_readonly("ratio", &detection::SqueezingReport::ratio)
        .def_readonly("measured_db", &detection::SqueezingReport::measured_db)
        .def_readonly("corrected_db", &detection::SqueezingReport::corrected_db)
        .def_readonly("se_measured_db", &detection::SqueezingReport::se_measured_db)
        .def_readonly("se_corrected_db", &detection::SqueezingReport::se_corrected_db);

    m.def("default_omega_grid", &detection::default_omega_grid, py::arg("shape"));
    m.def("pulse_spectrum", &detection::pulse_spectrum, py::arg("shape"),
          py::arg("omega_grid"));
    m.def("band_average_gain", &detection::band_average_gain, py::arg("config"),
          py::arg("shape"));
    m.def("time_resolved_variance", &detection::time_resolved_variance,
          py::arg("config"), py::arg("input"), py::arg("shape"), py::arg("chain"));
    m.def("simulate_records", &detection::simulate_records, py::arg("config"),
          py::arg("input"), py::arg("shape"), py::arg("chain"));
    m.def("simulate_split_records", &detection::simulate_split_records,
          py::arg("photons_per_pulse"), py::arg("chain"));
    m.def("record_variance", &detection::record_variance, py::arg("record"),
          py::arg("window"));
    m.def("photons_per_pulse", &detection::photons_per_pulse, py::arg("power_w"),
          py::arg("repetition_period"));
    m.def("shot_noise_calibration", &detection::shot_noise_calibration,
          py::arg("powers_w"), py::arg("chain"));
    m.def("squeezing_report", &detection::squeezing_report, py::arg("record_snl"),
          py::arg("record_fwm"), py::arg("window"), py::arg("eta"));

    // ---- sweep ----
    py::class_<sweep::Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("medium", &sweep::Scenario::medium)
        .def_readwrite("pulse", &sweep::Scenario::pulse)
        .def_readwrite("chain", &sweep::Scenario::chain)
        .def_readwrite("input", &sweep::Scenario::input);

    py::class_<sweep::SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def_property(
            "target",
            [](const sweep::SweepSpec& s) { return sweep::target_name(s.target); },
            [](sweep::SweepSpec& s, const std::string& name) {
                s.target = sweep::target_from_name(name);
            })
        .def_readwrite("parameter", &sweep::SweepSpec::parameter)
        .def_readwrite("grid", &sweep::SweepSpec::grid)
        .def_readwrite("fixed", &sweep::SweepSpec::fixed)
        .def_readwrite("seed", &sweep::SweepSpec::seed)
        .def("validate", &sweep::SweepSpec::validate);

    py::class_<sweep::CurveResult>(m, "CurveResult")
        .def_readonly("parameter_name", &sweep::CurveResult::parameter_name)
        .def_readonly("observable_name", &sweep::CurveResult::observable_name)
        .def_readonly("parameter", &sweep::CurveResult::parameter)
        .def_readonly("value", &sweep::CurveResult::value)
        .def_readonly("uncertainty", &sweep::CurveResult::uncertainty)
        .def_readonly("point_errors", &sweep::CurveResult::point_errors)
        .def_readonly("config_hash", &sweep::CurveResult::config_hash)
        .def_readonly("seed", &sweep::CurveResult::seed);

    m.def("run_sweep", &sweep::run_sweep, py::arg("spec"), py::arg("threads") = 1);
    m.def("conjugate_probe_ratio", &sweep::conjugate_probe_ratio,
          py::arg("config"), py::arg("shape"), py::arg("seed_powers"));
    m.def("gain_from_slope", &sweep::gain_from_slope, py::arg("slope"));
    m.def("find_optimum_delta", &sweep::find_optimum_delta, py::arg("scenario"),
          py::arg("delta_min"), py::arg("delta_max"));
    m.def("calibrate_coupling", &sweep::calibrate_coupling, py::arg("target_gain"),
          py::arg("shape"), py::arg("base"));
    m.attr("default_raman_ratio") = sweep::default_raman_ratio;

    m.def("config_hash", &config_hash, py::arg("scenario"));
}
