// sweep.hpp: Parameter sweeps, figure presets and plot-script emission
//
// Every sweep point is an independent work item; results are collected by
// grid index, so the emitted CSV does not depend on the worker count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "optocool/cooling.hpp"
#include "optocool/error.hpp"
#include "optocool/format.hpp"
#include "optocool/params.hpp"
#include "optocool/spectrum.hpp"
#include "optocool/steady_state.hpp"

namespace optocool {

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware).
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Scalar sweeps

enum class SweepOutput { G, SPlus, SMinus, GammaC, NC, NF };

struct SweepSpec {
    std::string axis{"J"};
    std::vector<double> values;
    SystemParams base;
    std::vector<SweepOutput> outputs{SweepOutput::G,      SweepOutput::SPlus, SweepOutput::SMinus,
                                     SweepOutput::GammaC, SweepOutput::NC,    SweepOutput::NF};
    BranchSelect branch{BranchSelect::Lowest};
};

struct SweepRow {
    double value{0.0};
    std::optional<double> G, s_plus, s_minus, gamma_c, n_c, n_f;
    std::string status;  // "ok", "heating", or the error name
};

struct SweepTable {
    std::string axis;
    std::vector<SweepOutput> outputs;
    std::vector<SweepRow> rows;
};

inline void check_sweep_spec(const SweepSpec& spec) {
    if (spec.values.empty()) throw Error(ErrorKind::EmptySweep, "sweep grid is empty");
    if (!is_config_key(spec.axis)) throw Error(ErrorKind::Validation, "unknown sweep axis '" + spec.axis + "'");
    if (spec.values.size() > 1) {
        const bool up = spec.values[1] > spec.values[0];
        for (std::size_t i = 1; i < spec.values.size(); ++i) {
            if (up ? !(spec.values[i] > spec.values[i - 1]) : !(spec.values[i] < spec.values[i - 1]))
                throw Error(ErrorKind::Validation, "sweep grid must be strictly monotone");
        }
    }
}

// steady state -> S_FF(+-omega_m) -> cooling summary for one parameter set.
inline CoolingSummary cooling_point(const SystemParams& p, BranchSelect branch = BranchSelect::Lowest) {
    const auto report = validate(p);
    if (!report.ok()) throw Error(ErrorKind::Validation, report.summary());
    const auto ss = solve_steady_state(p, branch).chosen();
    const double s_plus = force_spectrum(1.0, p, ss.delta2_eff);
    const double s_minus = force_spectrum(-1.0, p, ss.delta2_eff);
    return cooling_summary(s_plus, s_minus, effective_coupling(ss, p), p.gamma_m, thermal_occupancy(p));
}

inline SweepRow sweep_row(const SweepSpec& spec, double value) {
    SweepRow row;
    row.value = value;
    try {
        SystemParams p = spec.base;
        set_parameter(p, spec.axis, value);
        const auto c = cooling_point(p, spec.branch);
        row.G = c.G;
        row.s_plus = c.s_plus;
        row.s_minus = c.s_minus;
        row.gamma_c = c.gamma_c;
        row.n_c = c.n_c;
        row.n_f = c.n_f;
        row.status = c.heating_dominated ? "heating" : "ok";
    } catch (const Error& e) {
        row.status = to_string(e.kind());
    }
    return row;
}

inline SweepTable run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    check_sweep_spec(spec);
    SweepTable table{spec.axis, spec.outputs, std::vector<SweepRow>(spec.values.size())};
    parallel_for(spec.values.size(), threads, [&](std::size_t i) { table.rows[i] = sweep_row(spec, spec.values[i]); });
    return table;
}

// Phonon numbers versus the cavity-cavity coupling; G is recomputed per point.
inline SweepTable sweep_coupling(const SweepSpec& spec, unsigned threads = 0) {
    if (spec.axis != "J") throw Error(ErrorKind::Validation, "sweep_coupling expects axis 'J', got '" + spec.axis + "'");
    return run_sweep(spec, threads);
}

inline const char* column_name(SweepOutput o) {
    switch (o) {
        case SweepOutput::G: return "G";
        case SweepOutput::SPlus: return "s_plus";
        case SweepOutput::SMinus: return "s_minus";
        case SweepOutput::GammaC: return "gamma_c";
        case SweepOutput::NC: return "n_c";
        case SweepOutput::NF: return "n_f";
    }
    return "";
}

inline std::string render_csv(const SweepTable& t) {
    std::string out = t.axis;
    for (auto o : t.outputs) out += std::string(",") + column_name(o);
    out += ",status\n";
    for (const auto& r : t.rows) {
        out += fmt17(r.value);
        for (auto o : t.outputs) {
            out += ',';
            switch (o) {
                case SweepOutput::G: out += fmt17(r.G); break;
                case SweepOutput::SPlus: out += fmt17(r.s_plus); break;
                case SweepOutput::SMinus: out += fmt17(r.s_minus); break;
                case SweepOutput::GammaC: out += fmt17(r.gamma_c); break;
                case SweepOutput::NC: out += fmt17(r.n_c); break;
                case SweepOutput::NF: out += fmt17(r.n_f); break;
            }
        }
        out += ',' + r.status + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum overlays

struct SpectrumConfig {
    std::string label;
    std::vector<std::pair<std::string, double>> overrides;
};

struct SpectrumTable {
    std::vector<double> omega;
    std::vector<std::string> labels;
    std::vector<std::vector<std::optional<double>>> columns;  // one per configuration
    std::vector<std::string> status;                          // per configuration
};

inline SpectrumTable sweep_spectrum(const SystemParams& base, const std::vector<SpectrumConfig>& configs,
                                    const std::vector<double>& grid, unsigned threads = 0) {
    if (configs.empty()) throw Error(ErrorKind::EmptySweep, "no spectrum configurations");
    if (grid.empty()) throw Error(ErrorKind::EmptySweep, "empty frequency grid");
    SpectrumTable table;
    table.omega = grid;
    table.columns.assign(configs.size(), std::vector<std::optional<double>>(grid.size()));
    table.status.assign(configs.size(), "ok");
    for (const auto& c : configs) table.labels.push_back(c.label);

    parallel_for(configs.size(), threads, [&](std::size_t k) {
        try {
            SystemParams p = base;
            for (const auto& [key, value] : configs[k].overrides) set_parameter(p, key, value);
            const auto report = validate(p);
            if (!report.ok()) throw Error(ErrorKind::Validation, report.summary());
            const double d2 = solve_steady_state(p).chosen().delta2_eff;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                try {
                    table.columns[k][i] = force_spectrum(grid[i], p, d2);
                } catch (const Error& e) {
                    table.status[k] = to_string(e.kind());
                }
            }
        } catch (const Error& e) {
            table.status[k] = to_string(e.kind());
        }
    });
    return table;
}

inline std::string render_csv(const SpectrumTable& t) {
    std::string out = "omega_over_omega_m";
    for (const auto& l : t.labels) out += ',' + l;
    out += '\n';
    for (std::size_t i = 0; i < t.omega.size(); ++i) {
        out += fmt17(t.omega[i]);
        for (const auto& col : t.columns) out += ',' + fmt17(col[i]);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Figure presets

namespace figures {

// fig2: S_FF for the four (J, g_a) combinations of {0, 1} x {0, 0.1}.
inline SystemParams fig2_base() { return default_params(); }

inline std::vector<SpectrumConfig> fig2_configs() {
    return {{"s_ff_J0_ga0", {{"J", 0.0}, {"g_a", 0.0}}},
            {"s_ff_J1_ga0", {{"J", 1.0}, {"g_a", 0.0}}},
            {"s_ff_J0_ga0.1", {{"J", 0.0}, {"g_a", 0.1}}},
            {"s_ff_J1_ga0.1", {{"J", 1.0}, {"g_a", 0.1}}}};
}

// fig3: S_FF at the dark-state operating point for kappa1 in {0.1, 1, 3}.
inline SystemParams fig3_base() {
    SystemParams p = default_params();
    p.g_a = 0.1;
    p.N = 200;
    p.gamma = 0.1;
    p.kappa2 = 3.0;
    p.delta2_mode = Delta2Mode::Effective;
    p.delta2 = -0.1;
    p.delta1 = -1.0;
    p.omega_atom = -1.0;
    p.J = 0.45;
    return p;
}

inline std::vector<SpectrumConfig> fig3_configs() {
    return {{"s_ff_kappa1_0.1", {{"kappa1", 0.1}}},
            {"s_ff_kappa1_1", {{"kappa1", 1.0}}},
            {"s_ff_kappa1_3", {{"kappa1", 3.0}}}};
}

// fig5 operating conditions (omega_m = 2 pi x 20 MHz, Q_m = 8e4, T = 300 mK).
inline SystemParams fig5_base() {
    SystemParams p = default_params();
    p.omega_m_hz = 20.0e6;
    p.gamma_m = 1.0 / 8.0e4;
    p.g = 1.2e-4;
    p.epsilon = 6000.0;
    p.temperature = 0.3;
    p.delta1 = -1.0;
    p.omega_atom = -1.0;
    p.kappa2 = 3.0;
    p.gamma = 0.1;
    p.g_a = 0.1;
    p.delta2_mode = Delta2Mode::Effective;
    p.delta2 = -1.0;
    return p;
}

// (a) pure optomechanics with a good auxiliary cavity.
inline SystemParams fig5a_params() {
    SystemParams p = fig5_base();
    p.kappa1 = 0.1;
    p.N = 0;
    return p;
}

// (b) hybrid system with a bad auxiliary cavity.
inline SystemParams fig5b_params() {
    SystemParams p = fig5_base();
    p.kappa1 = 2.0;
    p.N = 100;
    return p;
}

inline std::vector<double> fig5_grid() { return uniform_grid(0.0, 3.0, 301); }

inline SweepSpec fig5_spec(const SystemParams& base) {
    SweepSpec spec;
    spec.axis = "J";
    spec.values = fig5_grid();
    spec.base = base;
    return spec;
}

}  // namespace figures

// Gnuplot script for a figure; CSVs are referenced by relative path
// (fig2.csv, fig3.csv, fig5a.csv, fig5b.csv).
inline std::string emit_plot_script(std::string_view figure) {
    std::string s = "# generated by optocool\nset datafile separator ','\nset key autotitle columnhead\n";
    if (figure == "fig2" || figure == "fig3") {
        const std::string csv = std::string(figure) + ".csv";
        const int series = figure == "fig2" ? 4 : 3;
        s += "set terminal pngcairo size 800,600\n";
        s += "set output '" + std::string(figure) + ".png'\n";
        s += "set xlabel 'omega / omega_m'\nset ylabel 'S_FF(omega) omega_m'\n";
        s += "set xrange [-4:4]\n";
        s += "plot \\\n";
        for (int c = 0; c < series; ++c) {
            s += "  '" + csv + "' using 1:" + std::to_string(c + 2) + " with lines lw 2";
            s += c + 1 < series ? ", \\\n" : "\n";
        }
        return s;
    }
    if (figure == "fig5") {
        s += "set terminal pngcairo size 1200,500\n";
        s += "set output 'fig5.png'\n";
        s += "set multiplot layout 1,2\n";
        s += "set xlabel 'J / omega_m'\nset ylabel 'phonon number'\nset logscale y\n";
        for (const char* panel : {"a", "b"}) {
            s += "set title '(" + std::string(panel) + ")'\n";
            s += "plot 'fig5" + std::string(panel) + ".csv' using 1:6 with lines lw 2 lc rgb 'black', \\\n";
            s += "  'fig5" + std::string(panel) + ".csv' using 1:7 with lines lw 2 lc rgb 'red'\n";
        }
        s += "unset multiplot\n";
        return s;
    }
    throw Error(ErrorKind::UnknownFigure, "unknown figure '" + std::string(figure) + "' (expected fig2, fig3, fig5)");
}

}  // namespace optocool
