#include "fwmpulse/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "fwmpulse/constants.hpp"
#include "fwmpulse/errors.hpp"

namespace fwm {

namespace {

using json = nlohmann::ordered_json;

// Strict section reader: every key must be consumed, every value type-checked.
class Section {
public:
    Section(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix))
    {
        if (!j_.is_object())
            throw ConfigError("config: " + prefix_ + ": expected an object");
    }

    double number(const std::string& key, double fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_number())
            throw ConfigError("config: " + path(key) + ": expected a number");
        return j_[key].get<double>();
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_number_unsigned())
            throw ConfigError("config: " + path(key) + ": expected a non-negative integer");
        return j_[key].get<std::uint64_t>();
    }

    int integer(const std::string& key, int fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_number_integer())
            throw ConfigError("config: " + path(key) + ": expected an integer");
        return j_[key].get<int>();
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_string())
            throw ConfigError("config: " + path(key) + ": expected a string");
        return j_[key].get<std::string>();
    }

    std::string required_text(const std::string& key)
    {
        if (!j_.contains(key))
            throw ConfigError("config: " + path(key) + ": missing required field");
        return text(key, "");
    }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        static const json null_value;
        return j_.contains(key) ? j_[key] : null_value;
    }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (seen_.find(item.key()) == seen_.end())
                throw ConfigError("config: unknown key '" + path(item.key()) + "'");
    }

private:
    std::string path(const std::string& key) const
    {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    const json& j_;
    std::string prefix_;
    std::set<std::string> seen_;
};

// Config keys carry plain-frequency units (Hz); internals use rad/s.
constexpr double kTwoPi = constants::two_pi;

// Sweep parameter paths as written in config files, with the conversion to
// the internal (angular frequency) paths.
struct ParameterAlias {
    const char* config_name;
    const char* internal_name;
    double scale;
};

constexpr ParameterAlias kParameterAliases[] = {
    {"medium.delta_hz", "medium.delta", kTwoPi},
    {"medium.delta1_hz", "medium.delta1", kTwoPi},
    {"medium.gamma_hz", "medium.gamma", kTwoPi},
    {"medium.Gamma_hz", "medium.Gamma", kTwoPi},
    {"medium.coupling_c_per_m", "medium.coupling_C", 1.0},
    {"medium.raman_a_per_m", "medium.raman_A", 1.0},
    {"medium.pump_power_w", "medium.pump_power", 1.0},
    {"medium.pump_waist_m", "medium.pump_waist", 1.0},
    {"medium.temperature_c", "medium.temperature", 1.0},
    {"medium.cell_length_m", "medium.cell_length", 1.0},
    {"pulse.width_s", "pulse.width", 1.0},
    {"pulse.rise_time_s", "pulse.rise_time", 1.0},
    {"chain.eta", "chain.eta", 1.0},
    {"chain.bandwidth_hz", "chain.bandwidth", 1.0},
    {"input.flux", "input.flux", 1.0},
    {"input.excess_noise_db", "input.excess_noise_db", 1.0},
    {"omega_hz", "omega", kTwoPi},
};

const ParameterAlias& find_alias(const std::string& config_name)
{
    for (const auto& alias : kParameterAliases)
        if (config_name == alias.config_name)
            return alias;
    throw ConfigError("config: sweep.parameter: unknown parameter '" + config_name + "'");
}

std::vector<double> parse_grid(const json& grid, const std::string& path, double scale)
{
    std::vector<double> out;
    if (grid.is_array()) {
        for (const auto& v : grid) {
            if (!v.is_number())
                throw ConfigError("config: " + path + ": expected numbers");
            out.push_back(v.get<double>() * scale);
        }
        return out;
    }
    if (grid.is_object()) {
        Section s(grid, path);
        const double lo = s.number("min", std::numeric_limits<double>::quiet_NaN());
        const double hi = s.number("max", std::numeric_limits<double>::quiet_NaN());
        const int n = s.integer("n", 0);
        s.finish();
        if (std::isnan(lo) || std::isnan(hi) || n < 2)
            throw ConfigError("config: " + path + ": needs min, max and n >= 2");
        for (int i = 0; i < n; ++i)
            out.push_back((lo + (hi - lo) * i / (n - 1)) * scale);
        return out;
    }
    throw ConfigError("config: " + path + ": expected an array or {min, max, n}");
}

} // namespace

RunConfig parse_config(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");
    Section root(j, "");

    RunConfig config;
    auto& sc = config.scenario;

    if (!root.has("medium"))
        throw ConfigError("config: medium: missing required section");
    {
        Section s(root.raw("medium"), "medium");
        auto& m = sc.medium;
        m.delta1 = kTwoPi * s.number("delta1_hz", m.delta1 / kTwoPi);
        m.delta = kTwoPi * s.number("delta_hz", m.delta / kTwoPi);
        m.omega_hf = kTwoPi * s.number("omega_hf_hz", m.omega_hf / kTwoPi);
        m.Gamma = kTwoPi * s.number("Gamma_hz", m.Gamma / kTwoPi);
        m.gamma = kTwoPi * s.number("gamma_hz", m.gamma / kTwoPi);
        m.pump_power = s.number("pump_power_w", m.pump_power);
        m.pump_waist = s.number("pump_waist_m", m.pump_waist);
        m.probe_waist = s.number("probe_waist_m", m.probe_waist);
        m.cell_length = s.number("cell_length_m", m.cell_length);
        m.temperature = s.number("temperature_c", m.temperature);
        m.coupling_C = s.number("coupling_c_per_m", m.coupling_C);
        m.raman_A = s.number("raman_a_per_m", m.raman_A);
        s.finish();
    }

    if (root.has("pulse")) {
        Section s(root.raw("pulse"), "pulse");
        auto& p = sc.pulse;
        const std::string kind = s.text("kind", "square");
        if (kind == "square")
            p.kind = detection::PulseShape::Kind::Square;
        else if (kind == "gaussian")
            p.kind = detection::PulseShape::Kind::Gaussian;
        else
            throw ConfigError("config: pulse.kind: expected 'square' or 'gaussian'");
        p.width = s.number("width_s", p.width);
        p.rise_time = s.number("rise_time_s", p.rise_time);
        p.repetition_period = s.number("repetition_period_s", p.repetition_period);
        s.finish();
    } else {
        root.raw("pulse");
    }

    if (root.has("chain")) {
        Section s(root.raw("chain"), "chain");
        auto& c = sc.chain;
        c.eta = s.number("eta", c.eta);
        c.bandwidth = s.number("bandwidth_hz", c.bandwidth);
        c.amp_response = s.number("amp_response_s", c.amp_response);
        c.electronic_noise_var = s.number("electronic_noise_var", c.electronic_noise_var);
        c.n_samples = s.integer("n_samples", c.n_samples);
        c.rolling_window = s.integer("rolling_window", c.rolling_window);
        config.has_seed = s.has("rng_seed");
        c.rng_seed = s.unsigned_integer("rng_seed", c.rng_seed);
        s.finish();
    } else {
        root.raw("chain");
    }

    if (root.has("input")) {
        Section s(root.raw("input"), "input");
        sc.input.flux = s.number("flux", sc.input.flux);
        sc.input.excess_noise_db = s.number("excess_noise_db", sc.input.excess_noise_db);
        s.finish();
    } else {
        root.raw("input");
    }

    if (root.has("sweep")) {
        Section s(root.raw("sweep"), "sweep");
        config.has_sweep = true;
        config.sweep_target = sweep::target_from_name(s.required_text("target"));
        const ParameterAlias& alias = find_alias(s.required_text("parameter"));
        config.sweep_parameter = alias.internal_name;
        if (!s.has("grid"))
            throw ConfigError("config: sweep.grid: missing required field");
        config.sweep_grid = parse_grid(s.raw("grid"), "sweep.grid", alias.scale);
        s.finish();
    } else {
        root.raw("sweep");
    }

    if (root.has("calibrate")) {
        Section s(root.raw("calibrate"), "calibrate");
        config.calibrate_target = s.number("target_gain", config.calibrate_target);
        s.finish();
    } else {
        root.raw("calibrate");
    }

    root.finish();
    return config;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json scenario_to_json(const sweep::Scenario& sc)
{
    json j;
    j["medium"] = {
        {"delta1_hz", sc.medium.delta1 / kTwoPi},
        {"delta_hz", sc.medium.delta / kTwoPi},
        {"omega_hf_hz", sc.medium.omega_hf / kTwoPi},
        {"Gamma_hz", sc.medium.Gamma / kTwoPi},
        {"gamma_hz", sc.medium.gamma / kTwoPi},
        {"pump_power_w", sc.medium.pump_power},
        {"pump_waist_m", sc.medium.pump_waist},
        {"probe_waist_m", sc.medium.probe_waist},
        {"cell_length_m", sc.medium.cell_length},
        {"temperature_c", sc.medium.temperature},
        {"coupling_c_per_m", sc.medium.coupling_C},
        {"raman_a_per_m", sc.medium.raman_A},
    };
    j["pulse"] = {
        {"kind", sc.pulse.kind == detection::PulseShape::Kind::Square ? "square" : "gaussian"},
        {"width_s", sc.pulse.width},
        {"rise_time_s", sc.pulse.rise_time},
        {"repetition_period_s", sc.pulse.repetition_period},
    };
    j["chain"] = {
        {"eta", sc.chain.eta},
        {"bandwidth_hz", sc.chain.bandwidth},
        {"amp_response_s", sc.chain.amp_response},
        {"electronic_noise_var", sc.chain.electronic_noise_var},
        {"n_samples", sc.chain.n_samples},
        {"rolling_window", sc.chain.rolling_window},
        {"rng_seed", sc.chain.rng_seed},
    };
    j["input"] = {
        {"flux", sc.input.flux},
        {"excess_noise_db", sc.input.excess_noise_db},
    };
    return j;
}

nlohmann::ordered_json run_config_to_json(const RunConfig& config)
{
    json j = scenario_to_json(config.scenario);
    if (config.has_sweep) {
        // Emit the config-file spelling of the parameter path.
        std::string config_name;
        double scale = 1.0;
        for (const auto& alias : kParameterAliases) {
            if (config.sweep_parameter == alias.internal_name) {
                config_name = alias.config_name;
                scale = alias.scale;
                break;
            }
        }
        json grid = json::array();
        for (double v : config.sweep_grid)
            grid.push_back(v / scale);
        j["sweep"] = {
            {"target", sweep::target_name(config.sweep_target)},
            {"parameter", config_name},
            {"grid", grid},
        };
    }
    j["calibrate"] = {{"target_gain", config.calibrate_target}};
    return j;
}

void save_config(const RunConfig& config, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("save_config: cannot open '" + path + "'");
    out << run_config_to_json(config).dump(2) << "\n";
}

sweep::SweepSpec make_sweep_spec(const RunConfig& config)
{
    if (!config.has_sweep)
        throw ConfigError("config: sweep: missing required section");
    sweep::SweepSpec spec;
    spec.target = config.sweep_target;
    spec.parameter = config.sweep_parameter;
    spec.grid = config.sweep_grid;
    spec.fixed = config.scenario;
    spec.seed = config.scenario.chain.rng_seed;
    return spec;
}

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t config_hash(const sweep::Scenario& scenario)
{
    return fnv1a64(scenario_to_json(scenario).dump());
}

} // namespace fwm
