#pragma once

// Flat key/value configuration files with unit-suffixed keys. Every key has a
// default encoding the reference device, so an empty file is a valid
// configuration. Unknown keys, malformed values and invariant violations are
// rejected with the offending key named. Environment variables with the
// SMPD_ prefix override file values (SMPD_T1_US=80 overrides t1_us).

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smpd/simulator.hpp"

namespace smpd {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parsed key/value file, still in user-facing units.
struct ParameterFile {
    std::map<std::string, double> values;
    std::map<std::string, std::string> strings;  // enumerated keys (signal_kind)

    void set(const std::string& key, const std::string& raw);
    [[nodiscard]] SimulationConfig build() const;
};

namespace detail {

enum class KeyConstraint { any, positive, non_negative, unit_interval };

struct KeyInfo {
    const char* key;
    bool is_string;
    KeyConstraint constraint;
};

/// The full key set. Numeric defaults are the reference-device values baked
/// into the corresponding struct defaults.
inline const std::vector<KeyInfo>& known_keys() {
    using KC = KeyConstraint;
    static const std::vector<KeyInfo> keys = {
        {"omega_b_ghz", false, KC::positive},
        {"omega_w_ghz", false, KC::positive},
        {"omega_q_ghz", false, KC::positive},
        {"omega_pb_ghz", false, KC::positive},
        {"omega_pw_ghz", false, KC::positive},
        {"kappa_b_c_khz", false, KC::positive},
        {"kappa_b_i_khz", false, KC::non_negative},
        {"kappa_w_mhz", false, KC::positive},
        {"kappa_pb_mhz", false, KC::positive},
        {"kappa_pw_mhz", false, KC::positive},
        {"chi_b_mhz", false, KC::positive},
        {"chi_w_mhz", false, KC::positive},
        {"t1_us", false, KC::positive},
        {"t2_star_us", false, KC::positive},
        {"f_ro", false, KC::unit_interval},
        {"p_th_q", false, KC::non_negative},
        {"phi_b_phi0", false, KC::any},
        {"phi_pb_phi0", false, KC::any},
        {"cooperativity", false, KC::non_negative},
        {"xi0", false, KC::non_negative},
        {"delta_p_khz", false, KC::any},
        {"t_d_us", false, KC::positive},
        {"t_ro_us", false, KC::non_negative},
        {"t_reset_us", false, KC::non_negative},
        {"mean_resets_per_cycle", false, KC::non_negative},
        {"field_temperature_mk", false, KC::non_negative},
        {"qubit_temperature_mk", false, KC::non_negative},
        {"cryostat_temperature_mk", false, KC::non_negative},
        {"alpha_p_per_s", false, KC::non_negative},
        {"kappa_d_khz", false, KC::non_negative},
        {"conversion_calibration", false, KC::non_negative},
        {"readout_false_positive", false, KC::positive},
        {"pi_fidelity", false, KC::unit_interval},
        {"max_reset_rounds", false, KC::positive},
        {"signal_kind", true, KC::any},
        {"signal_flux_per_s", false, KC::non_negative},
        {"signal_detuning_khz", false, KC::any},
        {"spin_gamma_r_per_s", false, KC::positive},
        {"spin_eta_reso", false, KC::unit_interval},
        {"spin_eta_loss", false, KC::unit_interval},
        {"spin_pulse_period_ms", false, KC::positive},
        {"fluorescence_background_per_s", false, KC::any},
        {"source_linewidth_khz", false, KC::non_negative},
        {"duration_s", false, KC::non_negative},
        {"rng_seed", false, KC::non_negative},
    };
    return keys;
}

[[nodiscard]] inline const KeyInfo* find_key(const std::string& key) {
    for (const KeyInfo& k : known_keys())
        if (key == k.key) return &k;
    return nullptr;
}

[[nodiscard]] inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

inline void ParameterFile::set(const std::string& key, const std::string& raw) {
    const detail::KeyInfo* info = detail::find_key(key);
    if (info == nullptr) throw ConfigError("unknown configuration key: " + key);
    const std::string value = detail::trim(raw);
    if (info->is_string) {
        if (key == "signal_kind" && value != "none" && value != "coherent" && value != "spin")
            throw ConfigError("invalid value for signal_kind: " + value +
                              " (expected none, coherent or spin)");
        strings[key] = value;
        return;
    }
    std::size_t consumed = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw ConfigError("value for " + key + " is not a number: " + value);
    }
    if (consumed != value.size())
        throw ConfigError("trailing characters in value for " + key + ": " + value);
    switch (info->constraint) {
        case detail::KeyConstraint::positive:
            if (!(parsed > 0)) throw ConfigError(key + " must be positive, got " + value);
            break;
        case detail::KeyConstraint::non_negative:
            if (!(parsed >= 0)) throw ConfigError(key + " must be non-negative, got " + value);
            break;
        case detail::KeyConstraint::unit_interval:
            if (!(parsed >= 0 && parsed <= 1))
                throw ConfigError(key + " must lie in [0,1], got " + value);
            break;
        case detail::KeyConstraint::any:
            break;
    }
    values[key] = parsed;
}

[[nodiscard]] inline ParameterFile parse_parameter_text(std::istream& in) {
    ParameterFile file;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_number) + ": expected key = value");
        file.set(detail::trim(stripped.substr(0, eq)), stripped.substr(eq + 1));
    }
    return file;
}

/// Apply SMPD_<UPPERCASE_KEY> environment overrides.
inline void apply_environment_overrides(ParameterFile& file) {
    for (const detail::KeyInfo& info : detail::known_keys()) {
        std::string env_name = "SMPD_";
        for (const char* p = info.key; *p; ++p)
            env_name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*p))));
        if (const char* v = std::getenv(env_name.c_str())) file.set(info.key, v);
    }
}

[[nodiscard]] inline SimulationConfig ParameterFile::build() const {
    SimulationConfig cfg;
    auto num = [&](const std::string& key, double fallback) {
        const auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    };

    DeviceParams& d = cfg.device;
    d.omega_b = from_ghz(num("omega_b_ghz", to_ghz(d.omega_b)));
    d.omega_w = from_ghz(num("omega_w_ghz", to_ghz(d.omega_w)));
    d.omega_q = from_ghz(num("omega_q_ghz", to_ghz(d.omega_q)));
    d.omega_pb = from_ghz(num("omega_pb_ghz", to_ghz(d.omega_pb)));
    d.omega_pw = from_ghz(num("omega_pw_ghz", to_ghz(d.omega_pw)));
    d.kappa_b_c = from_khz(num("kappa_b_c_khz", to_khz(d.kappa_b_c)));
    d.kappa_b_i = from_khz(num("kappa_b_i_khz", to_khz(d.kappa_b_i)));
    d.kappa_w = from_mhz(num("kappa_w_mhz", to_mhz(d.kappa_w)));
    d.kappa_pb = from_mhz(num("kappa_pb_mhz", to_mhz(d.kappa_pb)));
    d.kappa_pw = from_mhz(num("kappa_pw_mhz", to_mhz(d.kappa_pw)));
    d.chi_b = from_mhz(num("chi_b_mhz", to_mhz(d.chi_b)));
    d.chi_w = from_mhz(num("chi_w_mhz", to_mhz(d.chi_w)));
    d.t1 = 1e-6 * num("t1_us", d.t1 * 1e6);
    d.t2_star = 1e-6 * num("t2_star_us", d.t2_star * 1e6);
    d.f_ro = num("f_ro", d.f_ro);
    d.p_th_q = num("p_th_q", d.p_th_q);

    TuningState& t = cfg.tuning;
    t.phi_b = num("phi_b_phi0", t.phi_b);
    t.phi_pb = num("phi_pb_phi0", t.phi_pb);
    t.cooperativity = num("cooperativity", t.cooperativity);
    t.delta_p = from_khz(num("delta_p_khz", 0.0));
    if (values.count("xi0")) {
        t.xi0 = values.at("xi0");
        if (!values.count("cooperativity")) t.cooperativity = t.cooperativity_from_xi0(d);
    } else if (t.cooperativity > 0) {
        t.xi0 = TuningState::xi0_for_cooperativity(t.cooperativity, d);
    }

    CycleTiming& ct = cfg.timing;
    ct.t_d = 1e-6 * num("t_d_us", ct.t_d * 1e6);
    ct.t_ro = 1e-6 * num("t_ro_us", ct.t_ro * 1e6);
    ct.t_reset_unit = 1e-6 * num("t_reset_us", ct.t_reset_unit * 1e6);
    ct.mean_resets_per_cycle = num("mean_resets_per_cycle", ct.mean_resets_per_cycle);

    NoiseEnvironment& n = cfg.noise;
    n.field_temperature = 1e-3 * num("field_temperature_mk", n.field_temperature * 1e3);
    n.qubit_temperature = 1e-3 * num("qubit_temperature_mk", n.qubit_temperature * 1e3);
    n.cryostat_temperature = 1e-3 * num("cryostat_temperature_mk", n.cryostat_temperature * 1e3);
    n.alpha_p = num("alpha_p_per_s", n.alpha_p);

    cfg.kappa_d_override = from_khz(num("kappa_d_khz", to_khz(cfg.kappa_d_override)));
    cfg.conversion_calibration = num("conversion_calibration", cfg.conversion_calibration);
    cfg.readout_false_positive = num("readout_false_positive", cfg.readout_false_positive);
    cfg.pi_fidelity = num("pi_fidelity", cfg.pi_fidelity);
    cfg.max_reset_rounds = static_cast<int>(num("max_reset_rounds", cfg.max_reset_rounds));

    SignalSource& s = cfg.signal;
    if (const auto it = strings.find("signal_kind"); it != strings.end()) {
        s.kind = it->second == "coherent" ? SignalSource::Kind::coherent
                 : it->second == "spin"   ? SignalSource::Kind::spin
                                          : SignalSource::Kind::none;
    }
    s.flux = num("signal_flux_per_s", s.flux);
    s.omega = d.omega_b + from_khz(num("signal_detuning_khz", 0.0));
    s.gamma_r = num("spin_gamma_r_per_s", s.gamma_r);
    s.eta_reso = num("spin_eta_reso", s.eta_reso);
    s.eta_loss = num("spin_eta_loss", s.eta_loss);
    s.pulse_period = 1e-3 * num("spin_pulse_period_ms", s.pulse_period * 1e3);
    cfg.fluorescence_background =
        num("fluorescence_background_per_s", cfg.fluorescence_background);
    cfg.source_linewidth = from_khz(num("source_linewidth_khz", 0.0));

    cfg.duration = num("duration_s", cfg.duration);
    cfg.rng_seed = static_cast<std::uint64_t>(num("rng_seed", static_cast<double>(cfg.rng_seed)));

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        // Map internal field names back to the configuration vocabulary.
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

/// Load, apply environment overrides, convert to internal units and validate.
[[nodiscard]] inline SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file: " + path.string());
    ParameterFile file = parse_parameter_text(in);
    apply_environment_overrides(file);
    return file.build();
}

/// In-memory variant used by tests and scenario overrides.
[[nodiscard]] inline SimulationConfig load_config_text(const std::string& text,
                                                       bool with_environment = true) {
    std::istringstream in(text);
    ParameterFile file = parse_parameter_text(in);
    if (with_environment) apply_environment_overrides(file);
    return file.build();
}

}  // namespace smpd
