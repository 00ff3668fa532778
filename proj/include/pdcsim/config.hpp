#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <pdcsim/circuit.hpp>
#include <pdcsim/constants.hpp>
#include <pdcsim/drive.hpp>
#include <pdcsim/errors.hpp>

namespace pdcsim {

enum class SweepScale { linear, log };

/// One sweep axis: `count` points from start to stop, linearly or
/// geometrically spaced, over one of the documented axis names.
struct SweepSpec {
    bool present = false;
    std::string axis;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    SweepScale scale = SweepScale::linear;
};

/// Everything a subcommand run needs: circuit, drive, sweep axes, dynamics
/// controls and output routing.  Flags may override output/format.
struct RunConfiguration {
    CircuitParameters circuit;
    DriveParameters drive;
    SweepSpec sweep;
    SweepSpec sweep2;
    double time_horizon = 0.0;  ///< s; 0 means the default 8/kappa_b.
    int samples = 2000;         ///< Trace samples per horizon.
    std::optional<double> kerr_over_chi;  ///< Dynamics override of K/chi.
    int mode_count = 3;                   ///< Rows in the mode table.
    int mode_function_samples = 0;        ///< >0 adds a mode-function export.
    std::string output;
    std::string format = "csv";
    bool deterministic = true;  ///< Reserved; must stay true.
};

inline const std::set<std::string>& sweep_axis_names() {
    static const std::set<std::string> names = {
        "flux_ratio", "squid_position", "chi_ratio", "time_horizon",
        "drive_strength"};
    return names;
}

/// Materializes the grid of a sweep axis with exact endpoints.
inline std::vector<double> sweep_values(const SweepSpec& sweep) {
    if (!sweep.present) throw ConfigError("sweep axis not configured");
    if (sweep.count < 2) throw ConfigError("sweep_count must be at least 2");
    std::vector<double> values(static_cast<std::size_t>(sweep.count));
    const double n1 = static_cast<double>(sweep.count - 1);
    for (int i = 0; i < sweep.count; ++i) {
        if (i == 0) {
            values[0] = sweep.start;
        } else if (i == sweep.count - 1) {
            values[static_cast<std::size_t>(i)] = sweep.stop;
        } else if (sweep.scale == SweepScale::linear) {
            values[static_cast<std::size_t>(i)] =
                sweep.start + (sweep.stop - sweep.start) * i / n1;
        } else {
            values[static_cast<std::size_t>(i)] = std::exp(
                std::log(sweep.start) +
                (std::log(sweep.stop) - std::log(sweep.start)) * i / n1);
        }
    }
    return values;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_config_double(const std::string& key,
                                  const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError("key '" + key + "': not a number: '" + value + "'");
    return out;
}

inline int parse_config_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError("key '" + key + "': not an integer: '" + value +
                          "'");
    return out;
}

inline bool parse_config_bool(const std::string& key,
                              const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" +
                      value + "'");
}

inline void validate_sweep(const SweepSpec& sweep, const char* label) {
    if (!sweep.present) return;
    if (sweep.axis.empty())
        throw ConfigError(std::string(label) + "_axis is required");
    if (!sweep_axis_names().count(sweep.axis))
        throw ConfigError(std::string(label) + "_axis '" + sweep.axis +
                          "' is not a documented axis");
    if (sweep.count < 2)
        throw ConfigError(std::string(label) + "_count must be at least 2");
    if (!std::isfinite(sweep.start) || !std::isfinite(sweep.stop))
        throw ConfigError(std::string(label) + " bounds must be finite");
    if (sweep.scale == SweepScale::log &&
        (!(sweep.start > 0.0) || !(sweep.stop > 0.0)))
        throw ConfigError(std::string(label) +
                          ": log scale requires positive bounds");
}

}  // namespace detail

/// Parses the key = value configuration format.  '#' lines are comments.
/// SI units throughout except keys suffixed _GHz/_MHz, whose values are
/// multiplied by 2*pi*1e9 / 2*pi*1e6 into rad/s.  Unknown and duplicate keys
/// are rejected.  `allow_extreme_flux` force-enables the near-half-quantum
/// override before validation (the CLI flag of the same name).
inline RunConfiguration parse_config_text(const std::string& text,
                                          bool allow_extreme_flux = false) {
    RunConfiguration cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    const double ghz = 2.0 * constants::pi * 1.0e9;
    const double mhz = 2.0 * constants::pi * 1.0e6;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) +
                              ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError("duplicate key '" + key + "'");

        const auto num = [&] { return detail::parse_config_double(key, value); };
        const auto integer = [&] { return detail::parse_config_int(key, value); };
        const auto boolean = [&] { return detail::parse_config_bool(key, value); };

        if (key == "half_length_a") cfg.circuit.half_length_a = num();
        else if (key == "capacitance_per_length")
            cfg.circuit.capacitance_per_length = num();
        else if (key == "inductance_per_length")
            cfg.circuit.inductance_per_length = num();
        else if (key == "josephson_energy_GHz")
            cfg.circuit.josephson_energy = num() * ghz;
        else if (key == "charging_energy_GHz")
            cfg.circuit.charging_energy = num() * ghz;
        else if (key == "squid_position") cfg.circuit.squid_position = num();
        else if (key == "external_flux_ratio")
            cfg.circuit.external_flux_ratio = num();
        else if (key == "loop_length") cfg.circuit.loop_length = num();
        else if (key == "loop_width") cfg.circuit.loop_width = num();
        else if (key == "loop_offset") cfg.circuit.loop_offset = num();
        else if (key == "half_length_b") cfg.circuit.half_length_b = num();
        else if (key == "allow_extreme_flux")
            cfg.circuit.allow_extreme_flux = boolean();
        else if (key == "rabi_frequency_MHz")
            cfg.drive.rabi_frequency = num() * mhz;
        else if (key == "kappa_a_MHz") cfg.drive.kappa_a = num() * mhz;
        else if (key == "kappa_b_MHz") cfg.drive.kappa_b = num() * mhz;
        else if (key == "thermal_na") cfg.drive.thermal_na = num();
        else if (key == "thermal_nb") cfg.drive.thermal_nb = num();
        else if (key == "sweep_axis") { cfg.sweep.present = true; cfg.sweep.axis = value; }
        else if (key == "sweep_start") { cfg.sweep.present = true; cfg.sweep.start = num(); }
        else if (key == "sweep_stop") { cfg.sweep.present = true; cfg.sweep.stop = num(); }
        else if (key == "sweep_count") { cfg.sweep.present = true; cfg.sweep.count = integer(); }
        else if (key == "sweep_scale") {
            cfg.sweep.present = true;
            if (value == "linear") cfg.sweep.scale = SweepScale::linear;
            else if (value == "log") cfg.sweep.scale = SweepScale::log;
            else throw ConfigError("sweep_scale must be linear or log");
        }
        else if (key == "sweep2_axis") { cfg.sweep2.present = true; cfg.sweep2.axis = value; }
        else if (key == "sweep2_start") { cfg.sweep2.present = true; cfg.sweep2.start = num(); }
        else if (key == "sweep2_stop") { cfg.sweep2.present = true; cfg.sweep2.stop = num(); }
        else if (key == "sweep2_count") { cfg.sweep2.present = true; cfg.sweep2.count = integer(); }
        else if (key == "sweep2_scale") {
            cfg.sweep2.present = true;
            if (value == "linear") cfg.sweep2.scale = SweepScale::linear;
            else if (value == "log") cfg.sweep2.scale = SweepScale::log;
            else throw ConfigError("sweep2_scale must be linear or log");
        }
        else if (key == "time_horizon") cfg.time_horizon = num();
        else if (key == "samples") cfg.samples = integer();
        else if (key == "kerr_over_chi") cfg.kerr_over_chi = num();
        else if (key == "mode_count") cfg.mode_count = integer();
        else if (key == "mode_function_samples")
            cfg.mode_function_samples = integer();
        else if (key == "output") cfg.output = value;
        else if (key == "format") cfg.format = value;
        else if (key == "deterministic") cfg.deterministic = boolean();
        else throw ConfigError("unknown key '" + key + "'");
    }

    if (allow_extreme_flux) cfg.circuit.allow_extreme_flux = true;
    validate(cfg.circuit);
    cfg.drive.validate();
    detail::validate_sweep(cfg.sweep, "sweep");
    detail::validate_sweep(cfg.sweep2, "sweep2");
    if (cfg.time_horizon < 0.0)
        throw ConfigError("time_horizon must be non-negative");
    if (cfg.samples < 2) throw ConfigError("samples must be at least 2");
    if (cfg.kerr_over_chi && *cfg.kerr_over_chi < 0.0)
        throw ConfigError("kerr_over_chi must be non-negative");
    if (cfg.mode_count < 1) throw ConfigError("mode_count must be positive");
    if (cfg.mode_function_samples < 0)
        throw ConfigError("mode_function_samples must be non-negative");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");
    if (!cfg.deterministic)
        throw ConfigError("deterministic = false is not supported");
    return cfg;
}

/// Loads and parses a configuration file.
inline RunConfiguration load_config(const std::string& path,
                                    bool allow_extreme_flux = false) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), allow_extreme_flux);
}

}  // namespace pdcsim
