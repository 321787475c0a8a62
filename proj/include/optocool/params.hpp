// params.hpp: Model parameters, validation, thermal occupancy and key-value config I/O
//
// Every rate, detuning and coupling is stored in units of the mechanical
// frequency (omega_m = 1). Only the mechanical frequency itself and the bath
// temperature carry SI units; they enter through thermal_occupancy().

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "optocool/error.hpp"
#include "optocool/format.hpp"

namespace optocool {

namespace constants {
// CODATA 2018 (exact in the 2019 SI)
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K
}  // namespace constants

// Whether `delta2` holds the bare cavity-2 detuning or the optomechanically
// shifted one. In Effective mode the stored value is used verbatim.
enum class Delta2Mode { Bare, Effective };

struct CollectiveCoupling {
    double value{0.0};    // sqrt(N) g_a
    double squared{0.0};  // N g_a^2
};

struct SystemParams {
    double omega_m_hz{20.0e6};  // mechanical frequency f_m in Hz; omega_m = 2 pi f_m
    double kappa1{0.1};
    double kappa2{3.0};
    double gamma{0.1};
    double gamma_m{1.0 / 8.0e4};
    double delta1{-1.0};
    Delta2Mode delta2_mode{Delta2Mode::Effective};
    double delta2{1.0};
    double omega_atom{-1.0};
    double J{0.0};
    double g_a{0.0};
    std::int64_t N{200};
    double g{1.2e-4};
    double epsilon{6000.0};
    double temperature{0.3};  // K

    double omega_m_rad_s() const { return 2.0 * std::numbers::pi * omega_m_hz; }

    CollectiveCoupling collective() const {
        const double n = static_cast<double>(N);
        return {std::sqrt(n) * g_a, n * g_a * g_a};
    }

    bool operator==(const SystemParams&) const = default;
};

// fig2 preset with J = g_a = 0.
inline SystemParams default_params() { return SystemParams{}; }

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> notes;

    bool ok() const { return violations.empty(); }

    std::string summary() const {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "; ";
            out += v;
        }
        return out;
    }
};

inline ValidationReport validate(const SystemParams& p) {
    ValidationReport report;
    auto finite = [&](const char* name, double v) {
        if (!std::isfinite(v)) report.violations.push_back(std::string("non-finite value for ") + name);
    };
    finite("omega_m_hz", p.omega_m_hz);
    finite("kappa1", p.kappa1);
    finite("kappa2", p.kappa2);
    finite("gamma", p.gamma);
    finite("gamma_m", p.gamma_m);
    finite("delta1", p.delta1);
    finite("delta2", p.delta2);
    finite("omega_atom", p.omega_atom);
    finite("J", p.J);
    finite("g_a", p.g_a);
    finite("g", p.g);
    finite("epsilon", p.epsilon);
    finite("temperature_k", p.temperature);

    auto decay = [&](const char* name, double v) {
        if (v < 0.0) report.violations.push_back(std::string("negative decay rate: ") + name);
    };
    decay("kappa1", p.kappa1);
    decay("kappa2", p.kappa2);
    decay("gamma", p.gamma);
    decay("gamma_m", p.gamma_m);

    auto nonneg = [&](const char* name, double v) {
        if (v < 0.0) report.violations.push_back(std::string("negative value: ") + name);
    };
    nonneg("epsilon", p.epsilon);
    nonneg("g_a", p.g_a);
    nonneg("J", p.J);
    nonneg("g", p.g);
    nonneg("temperature_k", p.temperature);
    if (!(p.omega_m_hz > 0.0)) report.violations.push_back("mechanical frequency must be positive: omega_m_hz");
    if (p.N < 0) report.violations.push_back("negative atom count: N");

    if (p.N == 0 || p.g_a == 0.0) report.notes.push_back("atomic channel inactive");
    if (p.J == 0.0) report.notes.push_back("auxiliary cavity decoupled");
    if (p.g == 0.0) report.notes.push_back("radiation coupling off");
    return report;
}

// Bose-Einstein occupancy 1/(exp(hbar w / k_B T) - 1); zero at T = 0.
inline double thermal_occupancy(double omega_m_si, double temperature_k) {
    if (temperature_k <= 0.0) return 0.0;
    const double x = constants::hbar * omega_m_si / (constants::k_B * temperature_k);
    return 1.0 / std::expm1(x);
}

inline double thermal_occupancy(const SystemParams& p) {
    return thermal_occupancy(p.omega_m_rad_s(), p.temperature);
}

// ---------------------------------------------------------------------------
// Key-value configuration

struct ConfigEntry {
    std::string key;
    double value{0.0};
    int line{0};  // 0 for command-line overrides
};

inline const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys = {
        "omega_m_hz", "kappa1", "kappa2", "gamma", "gamma_m", "q_m", "delta1", "delta2",
        "delta2_effective", "omega_atom", "J", "g_a", "N", "g", "epsilon", "temperature_k"};
    return keys;
}

inline bool is_config_key(std::string_view key) {
    const auto& keys = config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::string where(int line) {
    return line > 0 ? "line " + std::to_string(line) + ": " : std::string("override: ");
}

inline double parse_number(std::string_view text, int line) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw Error(ErrorKind::Parse, where(line) + "invalid number '" + std::string(text) + "'");
    return value;
}

inline ConfigEntry parse_assignment(std::string_view body, int line) {
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
        throw Error(ErrorKind::Parse, where(line) + "expected 'key = value'");
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (!is_config_key(key))
        throw Error(ErrorKind::Parse, where(line) + "unknown key '" + std::string(key) + "'");
    return {std::string(key), parse_number(value, line), line};
}

// Keys that cannot both be present.
inline std::string_view exclusive_partner(std::string_view key) {
    if (key == "q_m") return "gamma_m";
    if (key == "gamma_m") return "q_m";
    if (key == "delta2") return "delta2_effective";
    if (key == "delta2_effective") return "delta2";
    return {};
}

}  // namespace detail

// Parses the document without applying it. Duplicate and unknown keys are
// errors reported with their line number.
inline std::vector<ConfigEntry> parse_config(std::string_view text) {
    std::vector<ConfigEntry> entries;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        auto entry = detail::parse_assignment(line, line_no);
        for (const auto& prev : entries) {
            if (prev.key == entry.key)
                throw Error(ErrorKind::Parse, detail::where(line_no) + "duplicate key '" + entry.key + "'");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

// "key=value" as given on the command line.
inline ConfigEntry parse_override(std::string_view text) {
    return detail::parse_assignment(detail::trim(text), 0);
}

// Sets one named parameter. delta2 / delta2_effective also select the mode,
// q_m sets gamma_m = 1/q_m.
inline void set_parameter(SystemParams& p, std::string_view key, double value, int line = 0) {
    if (key == "omega_m_hz") p.omega_m_hz = value;
    else if (key == "kappa1") p.kappa1 = value;
    else if (key == "kappa2") p.kappa2 = value;
    else if (key == "gamma") p.gamma = value;
    else if (key == "gamma_m") p.gamma_m = value;
    else if (key == "q_m") {
        if (!(value > 0.0)) throw Error(ErrorKind::Validation, detail::where(line) + "q_m must be positive");
        p.gamma_m = 1.0 / value;
    } else if (key == "delta1") p.delta1 = value;
    else if (key == "delta2") { p.delta2 = value; p.delta2_mode = Delta2Mode::Bare; }
    else if (key == "delta2_effective") { p.delta2 = value; p.delta2_mode = Delta2Mode::Effective; }
    else if (key == "omega_atom") p.omega_atom = value;
    else if (key == "J") p.J = value;
    else if (key == "g_a") p.g_a = value;
    else if (key == "N") {
        if (value != std::trunc(value) || std::abs(value) > 9.0e15)
            throw Error(ErrorKind::Parse, detail::where(line) + "N must be an integer");
        p.N = static_cast<std::int64_t>(value);
    } else if (key == "g") p.g = value;
    else if (key == "epsilon") p.epsilon = value;
    else if (key == "temperature_k") p.temperature = value;
    else throw Error(ErrorKind::Parse, detail::where(line) + "unknown key '" + std::string(key) + "'");
}

// Merges command-line overrides into parsed entries. An override replaces an
// entry of the same key and drops its mutually exclusive partner.
inline std::vector<ConfigEntry> merge_overrides(std::vector<ConfigEntry> entries,
                                                const std::vector<ConfigEntry>& overrides) {
    for (const auto& o : overrides) {
        const auto partner = detail::exclusive_partner(o.key);
        std::erase_if(entries, [&](const ConfigEntry& e) { return e.key == o.key || e.key == partner; });
        entries.push_back(o);
    }
    return entries;
}

// Applies entries on top of default_params(). Does not validate.
inline SystemParams params_from_entries(const std::vector<ConfigEntry>& entries) {
    const ConfigEntry* gamma_m = nullptr;
    const ConfigEntry* q_m = nullptr;
    const ConfigEntry* bare = nullptr;
    const ConfigEntry* effective = nullptr;
    for (const auto& e : entries) {
        if (e.key == "gamma_m") gamma_m = &e;
        if (e.key == "q_m") q_m = &e;
        if (e.key == "delta2") bare = &e;
        if (e.key == "delta2_effective") effective = &e;
    }
    if (bare && effective)
        throw Error(ErrorKind::Validation, detail::where(effective->line) +
                                               "delta2 and delta2_effective are mutually exclusive");
    if (gamma_m && q_m && std::abs(gamma_m->value * q_m->value - 1.0) > 1e-12)
        throw Error(ErrorKind::Validation, detail::where(std::max(gamma_m->line, q_m->line)) +
                                               "gamma_m and q_m are inconsistent (gamma_m * q_m != 1)");

    SystemParams p = default_params();
    for (const auto& e : entries) {
        // q_m and gamma_m agree here; keep the explicitly given gamma_m bit-exact.
        if (e.key == "q_m" && gamma_m) continue;
        set_parameter(p, e.key, e.value, e.line);
    }
    return p;
}

// Parses, applies overrides, validates. Missing keys keep default_params().
inline SystemParams load_config(std::string_view text, const std::vector<ConfigEntry>& overrides = {}) {
    const auto params = params_from_entries(merge_overrides(parse_config(text), overrides));
    const auto report = validate(params);
    if (!report.ok()) throw Error(ErrorKind::Validation, report.summary());
    return params;
}

// Inverse of load_config: every parameter at 17 significant digits.
inline std::string render_config(const SystemParams& p) {
    std::string out;
    auto line = [&](std::string_view key, double v) {
        out += key;
        out += " = ";
        out += fmt17(v);
        out += '\n';
    };
    line("omega_m_hz", p.omega_m_hz);
    line("kappa1", p.kappa1);
    line("kappa2", p.kappa2);
    line("gamma", p.gamma);
    line("gamma_m", p.gamma_m);
    line("delta1", p.delta1);
    line(p.delta2_mode == Delta2Mode::Bare ? "delta2" : "delta2_effective", p.delta2);
    line("omega_atom", p.omega_atom);
    line("J", p.J);
    line("g_a", p.g_a);
    out += "N = " + std::to_string(p.N) + '\n';
    line("g", p.g);
    line("epsilon", p.epsilon);
    line("temperature_k", p.temperature);
    return out;
}

}  // namespace optocool
