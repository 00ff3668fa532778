// Command-line front end: modes / coupling-map / dynamics / steady
// subcommands over the header-only simulation library.

#include <algorithm>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <pdcsim/pdcsim.hpp>

#include "CLI11.hpp"

namespace {

using pdcsim::io::Cell;
using pdcsim::io::int_cell;
using pdcsim::io::nil_cell;
using pdcsim::io::num_cell;
using pdcsim::io::text_cell;

constexpr double kTwoPi = 2.0 * pdcsim::constants::pi;

struct CommonArgs {
    std::string config;
    std::string out;
    std::string format;
    int jobs = 1;
    bool allow_extreme = false;
};

/// Shortest round-trip decimal form, used for trace file names.
std::string ratio_token(double r) {
    char buf[32];
    const auto res =
        std::to_chars(buf, buf + sizeof buf, r, std::chars_format::general);
    return std::string(buf, res.ptr);
}

void emit_table(std::ostream& os, const std::string& format,
                const std::vector<std::string>& columns,
                const std::vector<std::vector<Cell>>& rows) {
    if (format == "json")
        pdcsim::io::write_json(os, columns, rows);
    else
        pdcsim::io::write_csv(os, columns, rows);
}

/// Writes to the given path, or to stdout when the path is empty.
void write_table(const std::string& out_path, const std::string& format,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<Cell>>& rows) {
    if (out_path.empty()) {
        emit_table(std::cout, format, columns, rows);
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os)
        throw pdcsim::ConfigError("cannot open output file: " + out_path);
    emit_table(os, format, columns, rows);
}

/// Derives "<stem>_functions.<ext>" next to the mode-table output.
std::string functions_path(const std::string& out_path) {
    const std::filesystem::path p(out_path);
    std::filesystem::path q = p.parent_path();
    q /= p.stem().string() + "_functions" + p.extension().string();
    return q.string();
}

int cmd_modes(const pdcsim::RunConfiguration& cfg, const std::string& out,
              const std::string& format) {
    const auto spectrum =
        pdcsim::mode_spectrum(cfg.circuit, cfg.mode_count);
    const double l_a = cfg.circuit.half_length_a;
    const std::vector<std::string> columns = {"m",     "k_la", "omega_GHz",
                                              "B",     "A",    "Delta"};
    std::vector<std::vector<Cell>> rows;
    for (const auto& mode : spectrum)
        rows.push_back({int_cell(mode.index), num_cell(mode.wavevector * l_a),
                        num_cell(mode.frequency / (kTwoPi * 1.0e9)),
                        num_cell(mode.relative_amplitude),
                        num_cell(mode.normalization),
                        num_cell(mode.gap_amplitude)});
    write_table(out, format, columns, rows);

    if (cfg.mode_function_samples > 0) {
        if (out.empty())
            throw pdcsim::ConfigError(
                "mode-function export requires an output path");
        if (cfg.mode_function_samples < 2)
            throw pdcsim::ConfigError(
                "mode_function_samples must be at least 2");
        const int n = cfg.mode_function_samples;
        std::vector<std::string> fcols = {"x_over_la"};
        for (const auto& mode : spectrum)
            fcols.push_back("mu_" + std::to_string(mode.index));
        std::vector<std::vector<Cell>> frows;
        for (int i = 0; i < n; ++i) {
            const double x =
                i == n - 1 ? l_a : -l_a + 2.0 * l_a * i / (n - 1);
            std::vector<Cell> row{num_cell(x / l_a)};
            for (const auto& mode : spectrum)
                row.push_back(num_cell(pdcsim::mode_function(
                    mode, cfg.circuit.squid_position, l_a, x)));
            frows.push_back(std::move(row));
        }
        write_table(functions_path(out), format, fcols, frows);
    }
    return 0;
}

int cmd_coupling_map(const pdcsim::RunConfiguration& cfg,
                     const std::string& out, const std::string& format,
                     int jobs) {
    const pdcsim::SweepSpec* flux = nullptr;
    const pdcsim::SweepSpec* position = nullptr;
    for (const pdcsim::SweepSpec* s : {&cfg.sweep, &cfg.sweep2}) {
        if (!s->present) continue;
        if (s->axis == "flux_ratio") flux = s;
        else if (s->axis == "squid_position") position = s;
    }
    if (!flux || !position)
        throw pdcsim::ConfigError(
            "coupling-map requires flux_ratio and squid_position sweep axes");
    const auto flux_values = pdcsim::sweep_values(*flux);
    const auto position_values = pdcsim::sweep_values(*position);
    const auto cells = pdcsim::coupling_map(cfg.circuit, flux_values,
                                            position_values, jobs);

    const std::vector<std::string> columns = {
        "flux_ratio", "position_ratio", "chi_MHz",    "kerr_MHz",
        "kerr_over_chi", "omega_a_GHz", "error"};
    std::vector<std::vector<Cell>> rows;
    std::size_t failed = 0;
    for (const auto& cell : cells) {
        std::vector<Cell> row{num_cell(cell.flux_ratio),
                              num_cell(cell.position_ratio)};
        if (cell.error.empty()) {
            row.push_back(num_cell(cell.chi / (kTwoPi * 1.0e6)));
            row.push_back(num_cell(cell.kerr / (kTwoPi * 1.0e6)));
            row.push_back(num_cell(cell.kerr / cell.chi));
            row.push_back(num_cell(cell.omega_a / (kTwoPi * 1.0e9)));
            row.push_back(nil_cell());
        } else {
            ++failed;
            row.push_back(nil_cell());
            row.push_back(nil_cell());
            row.push_back(nil_cell());
            row.push_back(nil_cell());
            row.push_back(text_cell(cell.error));
        }
        rows.push_back(std::move(row));
    }
    write_table(out, format, columns, rows);
    if (!cells.empty() && failed == cells.size()) {
        std::cerr << "error: every sweep cell failed; first error: "
                  << cells.front().error << '\n';
        return 2;
    }
    return 0;
}

int cmd_dynamics(const pdcsim::RunConfiguration& cfg, const std::string& out,
                 const std::string& format, int jobs,
                 const std::string& kerr_mode,
                 const std::vector<double>& chi_ratios) {
    if (chi_ratios.empty())
        throw pdcsim::ConfigError("dynamics requires --chi-ratio values");
    for (double r : chi_ratios)
        if (!(r > 0.0))
            throw pdcsim::ConfigError("--chi-ratio values must be positive");
    if (out.empty())
        throw pdcsim::ConfigError("dynamics requires an output directory");

    const pdcsim::DriveParameters& drive = cfg.drive;
    const double chi_c = pdcsim::critical_coupling(drive);
    const double horizon =
        cfg.time_horizon > 0.0 ? cfg.time_horizon : 8.0 / drive.kappa_b;
    const double sampling = horizon / (cfg.samples - 1);

    std::vector<bool> kerr_settings;
    if (kerr_mode == "off") kerr_settings = {false};
    else if (kerr_mode == "on") kerr_settings = {true};
    else kerr_settings = {false, true};

    double kerr_ratio = 0.0;
    if (kerr_mode != "off") {
        if (cfg.kerr_over_chi) {
            kerr_ratio = *cfg.kerr_over_chi;
        } else {
            const auto cc = pdcsim::compute_coupling(cfg.circuit);
            if (!(cc.chi > 0.0))
                throw pdcsim::ConfigError(
                    "cannot resolve the Kerr-to-coupling ratio at zero "
                    "circuit coupling; set kerr_over_chi explicitly");
            kerr_ratio = cc.kerr / cc.chi;
        }
    }

    std::filesystem::create_directories(out);

    struct TaskResult {
        double min_var_ya = 0.0;
        std::optional<double> t_min;
        std::string error;
    };
    const std::size_t n_tasks = chi_ratios.size() * kerr_settings.size();
    std::vector<TaskResult> results(n_tasks);
    pdcsim::parallel_for(n_tasks, jobs, [&](std::size_t idx) {
        const double ratio = chi_ratios[idx / kerr_settings.size()];
        const bool kerr_on = kerr_settings[idx % kerr_settings.size()];
        TaskResult& res = results[idx];
        try {
            const double chi = ratio * chi_c;
            const double kerr = kerr_on ? kerr_ratio * chi : 0.0;
            const pdcsim::VarianceTrace trace =
                pdcsim::integrate(pdcsim::default_initial_state(), chi, kerr,
                                  drive, horizon, sampling);
            res.min_var_ya = trace.min_var_ya;
            res.t_min = trace.t_min;
            if (!trace.t_min && ratio < 1.0)
                res.min_var_ya =
                    pdcsim::steady_variances_a(chi, drive).second;

            std::vector<std::vector<Cell>> rows;
            rows.reserve(trace.times.size());
            for (std::size_t i = 0; i < trace.times.size(); ++i)
                rows.push_back({num_cell(trace.times[i] * 1.0e6),
                                num_cell(trace.mean_abs_alpha[i]),
                                num_cell(trace.mean_abs_beta[i]),
                                num_cell(trace.var_xa[i]),
                                num_cell(trace.var_ya[i]),
                                num_cell(trace.var_xb[i]),
                                num_cell(trace.var_yb[i])});
            const std::filesystem::path file =
                std::filesystem::path(out) /
                ("trace_r" + ratio_token(ratio) + "_" +
                 (kerr_on ? "on" : "off") + "." + format);
            write_table(file.string(), format,
                        {"t_us", "abs_alpha", "abs_beta", "var_xa", "var_ya",
                         "var_xb", "var_yb"},
                        rows);
        } catch (const std::exception& e) {
            res.error = e.what();
        }
    });

    std::vector<std::vector<Cell>> summary;
    std::size_t failed = 0;
    for (std::size_t idx = 0; idx < n_tasks; ++idx) {
        const double ratio = chi_ratios[idx / kerr_settings.size()];
        const bool kerr_on = kerr_settings[idx % kerr_settings.size()];
        const TaskResult& res = results[idx];
        std::vector<Cell> row{num_cell(ratio),
                              text_cell(kerr_on ? "on" : "off")};
        if (res.error.empty()) {
            row.push_back(num_cell(res.min_var_ya));
            row.push_back(res.t_min ? num_cell(*res.t_min * 1.0e6)
                                    : nil_cell());
            row.push_back(nil_cell());
        } else {
            ++failed;
            row.push_back(nil_cell());
            row.push_back(nil_cell());
            row.push_back(text_cell(res.error));
        }
        summary.push_back(std::move(row));
    }
    const std::filesystem::path summary_file =
        std::filesystem::path(out) / ("summary." + format);
    write_table(summary_file.string(), format,
                {"chi_ratio", "kerr", "min_var_ya", "t_min_us", "error"},
                summary);
    if (failed == n_tasks) {
        std::cerr << "error: every trace failed; first error: "
                  << results.front().error << '\n';
        return 2;
    }
    return 0;
}

int cmd_steady(const pdcsim::RunConfiguration& cfg, const std::string& out,
               const std::string& format, bool jpa, bool vary_drive) {
    if (!cfg.sweep.present || cfg.sweep.axis != "chi_ratio")
        throw pdcsim::ConfigError("steady requires a chi_ratio sweep axis");
    const auto ratios = pdcsim::sweep_values(cfg.sweep);
    for (double r : ratios)
        if (!(r > 0.0))
            throw pdcsim::ConfigError("chi_ratio values must be positive");
    const pdcsim::DriveParameters& drive = cfg.drive;
    const double chi_c0 = pdcsim::critical_coupling(drive);

    std::vector<std::string> columns = {
        "chi_ratio", "abs_alpha_s", "abs_beta_s", "var_xa_s",
        "var_ya_s",  "var_xb_s",    "var_yb_s",   "stable"};
    if (jpa) {
        columns.push_back("jpa_drive_ratio");
        columns.push_back("jpa_var_ya_s");
        columns.push_back("jpa_stable");
    }
    std::vector<std::vector<Cell>> rows;
    for (double r : ratios) {
        pdcsim::SteadyStateSolution sol;
        if (vary_drive) {
            pdcsim::DriveParameters scaled = drive;
            scaled.rabi_frequency = r * drive.rabi_frequency;
            sol = pdcsim::steady_solution(chi_c0, scaled);
        } else {
            sol = pdcsim::steady_solution(r * chi_c0, drive);
        }
        std::vector<Cell> row{num_cell(r),
                              num_cell(std::abs(sol.alpha_s)),
                              num_cell(std::abs(sol.beta_s)),
                              num_cell(sol.var_xa_s),
                              num_cell(sol.var_ya_s),
                              num_cell(sol.var_xb_s),
                              num_cell(sol.var_yb_s),
                              int_cell(sol.stable ? 1 : 0)};
        if (jpa) {
            const double drive_eq =
                pdcsim::jpa_equivalent_drive(r, drive.kappa_a);
            const auto baseline =
                pdcsim::jpa_baseline(drive_eq, drive.kappa_a);
            row.push_back(num_cell(drive_eq / drive.kappa_a));
            row.push_back(num_cell(baseline.var_ya_s));
            row.push_back(int_cell(baseline.stable ? 1 : 0));
        }
        rows.push_back(std::move(row));
    }
    write_table(out, format, columns, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-resonator parametric down-conversion simulator"};
    app.require_subcommand(1);

    CommonArgs common;
    common.jobs = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
    std::string kerr_mode = "off";
    std::vector<double> chi_ratios;
    bool jpa = false;
    bool vary_drive = false;

    auto* modes = app.add_subcommand(
        "modes", "Write the normal-mode table of the loaded resonator");
    auto* cmap = app.add_subcommand(
        "coupling-map",
        "Sweep flux bias and junction position; write the chi/K map");
    auto* dynamics = app.add_subcommand(
        "dynamics", "Integrate the moment equations per coupling ratio");
    auto* steady = app.add_subcommand(
        "steady", "Closed-form steady-state sweep over the coupling ratio");
    for (CLI::App* cmd : {modes, cmap, dynamics, steady}) {
        cmd->add_option("--config", common.config, "configuration file")
            ->required();
        cmd->add_option("--out", common.out,
                        "output file (directory for dynamics)");
        cmd->add_option("--format", common.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--jobs", common.jobs, "worker threads")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--allow-extreme-flux", common.allow_extreme,
                      "permit flux ratios in (0.49, 0.5)");
    }
    dynamics
        ->add_option("--chi-ratio", chi_ratios,
                     "comma-separated coupling ratios chi/chi_c")
        ->required()
        ->delimiter(',');
    dynamics->add_option("--kerr", kerr_mode, "off, on, or both")
        ->check(CLI::IsMember({"off", "on", "both"}));
    steady->add_flag("--jpa", jpa,
                     "append single-resonator baseline columns");
    steady->add_flag(
        "--vary-drive", vary_drive,
        "realize the ratios by scaling the pump at fixed coupling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const pdcsim::RunConfiguration cfg =
            pdcsim::load_config(common.config, common.allow_extreme);
        const std::string out =
            !common.out.empty() ? common.out : cfg.output;
        const std::string format =
            !common.format.empty() ? common.format : cfg.format;
        if (modes->parsed()) return cmd_modes(cfg, out, format);
        if (cmap->parsed())
            return cmd_coupling_map(cfg, out, format, common.jobs);
        if (dynamics->parsed())
            return cmd_dynamics(cfg, out, format, common.jobs, kerr_mode,
                                chi_ratios);
        return cmd_steady(cfg, out, format, jpa, vary_drive);
    } catch (const pdcsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const pdcsim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
