// cli.hpp: Command-line front end: optocool <subcommand> [--config PATH] [--set key=value]... [--out PATH] [--threads N]
//
// Exit codes:
//   0  success
//   1  usage, parse or validation error (also unknown figure, empty sweep)
//   2  runtime error (pole on grid, truncation overflow, degenerate or unstable operating point)
//   3  internal invariant breach or failed self-check

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optocool/checks.hpp"
#include "optocool/cooling.hpp"
#include "optocool/error.hpp"
#include "optocool/format.hpp"
#include "optocool/params.hpp"
#include "optocool/spectrum.hpp"
#include "optocool/steady_state.hpp"
#include "optocool/sweep.hpp"

namespace optocool::cli {

inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse:
        case ErrorKind::Validation:
        case ErrorKind::EmptySweep:
        case ErrorKind::UnknownFigure:
            return 1;
        case ErrorKind::Degenerate:
        case ErrorKind::PoleAtGrid:
        case ErrorKind::SingularMatrix:
        case ErrorKind::InfeasibleDetuning:
        case ErrorKind::Unstable:
        case ErrorKind::TruncationOverflow:
            return 2;
        case ErrorKind::NoPhysicalRoot:
        case ErrorKind::InvariantBreach:
            return 3;
    }
    return 3;
}

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::optional<int> threads;
    std::string branch{"lowest"};
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Validation, "cannot write '" + path + "'");
    f << text;
}

inline unsigned resolve_threads(const Common& c) {
    if (c.threads) {
        if (*c.threads < 0) throw Error(ErrorKind::Validation, "--threads must be >= 0");
        return static_cast<unsigned>(*c.threads);
    }
    if (const char* env = std::getenv("OPTOCOOL_THREADS"); env && *env) {
        const double v = optocool::detail::parse_number(env, 0);
        if (v < 0.0 || v != std::trunc(v) || v > 4096.0)
            throw Error(ErrorKind::Validation, "OPTOCOOL_THREADS must be a non-negative integer");
        return static_cast<unsigned>(v);
    }
    return 0;  // machine parallelism
}

inline BranchSelect resolve_branch(const Common& c) {
    if (c.branch == "lowest") return BranchSelect::Lowest;
    if (c.branch == "highest") return BranchSelect::Highest;
    throw Error(ErrorKind::Validation, "--branch must be 'lowest' or 'highest'");
}

inline std::vector<ConfigEntry> parse_sets(const Common& c) {
    std::vector<ConfigEntry> overrides;
    for (const auto& s : c.sets) overrides.push_back(parse_override(s));
    return overrides;
}

// Run header on the error stream; overrides are echoed as parsed.
inline void header(std::ostream& err, const std::string& sub, const Common& c,
                   const std::vector<ConfigEntry>& overrides) {
    err << "# optocool " << sub << '\n';
    if (!c.config.empty()) err << "# config " << c.config << '\n';
    for (const auto& o : overrides) err << "# set " << o.key << " = " << fmt17(o.value) << '\n';
}

inline SystemParams load(const Common& c, const std::vector<ConfigEntry>& overrides, std::ostream& err) {
    const std::string text = c.config.empty() ? std::string{} : read_file(c.config);
    const auto p = load_config(text, overrides);
    for (const auto& note : validate(p).notes) err << "# note: " << note << '\n';
    return p;
}

inline void warn_weak_coupling(const SteadyState& ss, const SystemParams& p, std::ostream& err) {
    const auto d = weak_coupling_validity(ss, p);
    if (d.warn)
        err << "# warning: linearization questionable (G/kappa2 = " << fmt17(d.g_over_kappa2)
            << ", G/omega_m = " << fmt17(d.g_over_omega_m) << ", G^2/(kappa2 omega_m) = "
            << fmt17(d.g2_over_kappa2_omega_m) << ")\n";
}

inline std::string kv(const char* key, double v) { return std::string(key) + " = " + fmt17(v) + '\n'; }

}  // namespace detail

inline std::string steady_table(const BranchSet& set) {
    std::string out =
        "branch,selected,re_a1,im_a1,re_a2,im_a2,re_b,im_b,re_sigma_ge,im_sigma_ge,intensity,delta2_eff,"
        "delta2_bare,G,residual\n";
    for (std::size_t k = 0; k < set.solutions.size(); ++k) {
        const auto& s = set.solutions[k];
        out += std::to_string(k) + ',' + (k == set.selected ? "1" : "0");
        for (double v : {s.a1.real(), s.a1.imag(), s.a2.real(), s.a2.imag(), s.b.real(), s.b.imag(),
                         s.sigma_ge.real(), s.sigma_ge.imag(), s.intensity, s.delta2_eff, s.delta2_bare, s.G,
                         s.residual})
            out += ',' + fmt17(v);
        out += '\n';
    }
    return out;
}

inline std::string spectrum_csv(const std::vector<double>& grid, const SystemParams& p, double delta2_eff) {
    std::string out = "omega_over_omega_m,s_ff,s_ff_oracle\n";
    for (double w : grid)
        out += fmt17(w) + ',' + fmt17(force_spectrum(w, p, delta2_eff)) + ',' +
               fmt17(spectrum_matrix_oracle(w, p, delta2_eff)) + '\n';
    return out;
}

inline std::string cooling_report(const CoolingSummary& c, const SteadyState& ss) {
    std::string out;
    out += detail::kv("delta2_eff", ss.delta2_eff);
    out += detail::kv("G", c.G);
    out += detail::kv("s_plus", c.s_plus);
    out += detail::kv("s_minus", c.s_minus);
    out += detail::kv("gamma_m", c.gamma_m);
    out += detail::kv("n_m", c.n_m);
    out += detail::kv("gamma_c", c.gamma_c);
    if (c.n_c) out += detail::kv("n_c", *c.n_c);
    if (c.n_f) out += detail::kv("n_f", *c.n_f);
    out += detail::kv("a_down", c.a_down);
    out += detail::kv("a_up", c.a_up);
    out += std::string("regime = ") + (c.heating_dominated ? "heating-dominated" : "cooling") + '\n';
    return out;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Ground-state cooling of a nanomechanical resonator in a hybrid cavity-atom system", "optocool"};
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", c.config, "key = value parameter file");
        sub->add_option("--set", c.sets, "parameter override key=value (repeatable)")->allow_extra_args(false);
        sub->add_option("--out", c.out, "output file (directory for sweep --figure)");
        sub->add_option("--threads", c.threads, "worker threads, 0 = all cores (env OPTOCOOL_THREADS)");
        sub->add_option("--branch", c.branch, "steady-state branch: lowest | highest");
    };

    auto* steady = app.add_subcommand("steady", "mean-field steady state, all branches");
    auto* spectrum = app.add_subcommand("spectrum", "radiation-force spectrum S_FF on a frequency grid");
    auto* cool = app.add_subcommand("cool", "cooling rate and phonon occupancies");
    auto* evolve = app.add_subcommand("evolve", "phonon rate-equation time evolution");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep or figure reproduction");
    auto* check = app.add_subcommand("check", "oracle-equivalence and identity self-checks");
    for (auto* sub : {steady, spectrum, cool, evolve, sweep, check}) add_common(sub);

    double w_min = -4.0, w_max = 4.0;
    std::size_t w_points = 4001;
    spectrum->add_option("--omega-min", w_min, "grid start (units of omega_m)");
    spectrum->add_option("--omega-max", w_max, "grid end (units of omega_m)");
    spectrum->add_option("--points", w_points, "grid points")->check(CLI::PositiveNumber);

    double t_final = 0.0, initial_mean = -1.0;
    std::size_t samples = 200, n_max = 0;
    evolve->add_option("--t-final", t_final, "evolution time in 1/omega_m (default 25 relaxation times)");
    evolve->add_option("--samples", samples, "output rows after t = 0")->check(CLI::PositiveNumber);
    evolve->add_option("--n-max", n_max, "Fock-space truncation (default from the thermal tail)");
    evolve->add_option("--initial-mean", initial_mean, "mean of the initial thermal state (default n_m)");

    std::string figure, axis;
    double from = 0.0, to = 0.0;
    std::size_t points = 0;
    sweep->add_option("--figure", figure, "fig2 | fig3 | fig5: write CSVs and gnuplot script into --out");
    sweep->add_option("--axis", axis, "swept parameter key");
    sweep->add_option("--from", from, "first grid value");
    sweep->add_option("--to", to, "last grid value");
    sweep->add_option("--points", points, "grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        const auto overrides = detail::parse_sets(c);
        detail::header(err, sub->get_name(), c, overrides);
        const auto branch = detail::resolve_branch(c);

        if (sub == check) {
            bool all = true;
            std::string text;
            for (const auto& fn : checks::self_check_suite()) {
                const auto r = fn();
                all = all && r.passed;
                text += checks::format_result(r) + '\n';
                err << checks::format_result(r) << '\n';
            }
            if (!c.out.empty()) detail::write_text(text, c.out, out);
            else out << (all ? "all checks passed\n" : "self-check FAILED\n");
            return all ? 0 : 3;
        }

        if (sub == sweep && !figure.empty()) {
            if (!c.config.empty()) throw Error(ErrorKind::Validation, "--config cannot be combined with --figure");
            const unsigned threads = detail::resolve_threads(c);
            const std::filesystem::path dir = c.out.empty() ? "." : c.out;
            std::filesystem::create_directories(dir);
            auto apply = [&](SystemParams p) {
                for (const auto& o : overrides) set_parameter(p, o.key, o.value);
                const auto report = validate(p);
                if (!report.ok()) throw Error(ErrorKind::Validation, report.summary());
                return p;
            };
            const std::string script = emit_plot_script(figure);  // rejects unknown ids first
            if (figure == "fig2" || figure == "fig3") {
                const auto base = apply(figure == "fig2" ? figures::fig2_base() : figures::fig3_base());
                const auto configs = figure == "fig2" ? figures::fig2_configs() : figures::fig3_configs();
                detail::write_text(render_csv(sweep_spectrum(base, configs, default_grid(), threads)),
                                   (dir / (figure + ".csv")).string(), out);
            } else {
                for (const auto& [panel, base] : {std::pair{"fig5a", figures::fig5a_params()},
                                                  std::pair{"fig5b", figures::fig5b_params()}}) {
                    const auto spec = figures::fig5_spec(apply(base));
                    detail::write_text(render_csv(sweep_coupling(spec, threads)),
                                       (dir / (std::string(panel) + ".csv")).string(), out);
                }
            }
            detail::write_text(script, (dir / (figure + ".gp")).string(), out);
            err << "# wrote " << figure << " into " << dir.string() << '\n';
            return 0;
        }

        const auto p = detail::load(c, overrides, err);

        if (sub == sweep) {
            if (axis.empty()) throw Error(ErrorKind::Validation, "sweep needs --figure or --axis/--from/--to/--points");
            if (points == 0) throw Error(ErrorKind::EmptySweep, "--points must be positive");
            SweepSpec spec;
            spec.axis = axis;
            spec.values = uniform_grid(from, to, points);
            spec.base = p;
            spec.branch = branch;
            detail::write_text(render_csv(run_sweep(spec, detail::resolve_threads(c))), c.out, out);
            return 0;
        }

        const auto set = solve_steady_state(p, branch);
        const auto& ss = set.chosen();
        if (set.solutions.size() > 1)
            err << "# " << set.solutions.size() << " steady-state branches; using " << c.branch << '\n';
        detail::warn_weak_coupling(ss, p, err);

        if (sub == steady) {
            detail::write_text(steady_table(set), c.out, out);
            return 0;
        }
        if (sub == spectrum) {
            detail::write_text(spectrum_csv(uniform_grid(w_min, w_max, w_points), p, ss.delta2_eff), c.out, out);
            return 0;
        }

        const auto summary = cooling_summary(force_spectrum(1.0, p, ss.delta2_eff),
                                             force_spectrum(-1.0, p, ss.delta2_eff), effective_coupling(ss, p),
                                             p.gamma_m, thermal_occupancy(p));
        if (sub == cool) {
            detail::write_text(cooling_report(summary, ss), c.out, out);
            return 0;
        }

        // evolve
        if (!(summary.a_down > summary.a_up) && t_final <= 0.0)
            throw Error(ErrorKind::Unstable, "heating-dominated; pass --t-final explicitly");
        const double mean0 = initial_mean >= 0.0 ? initial_mean : summary.n_m;
        const double horizon = t_final > 0.0 ? t_final : 25.0 / (summary.a_down - summary.a_up);
        const std::size_t top = n_max > 0 ? n_max : default_n_max(std::max(mean0, summary.n_f.value_or(0.0)));
        std::string csv = "time_omega_m,mean_phonon,ground_state_population\n";
        EvolveOptions opt;
        opt.samples = samples;
        opt.on_sample = [&](const PhononDistribution& d) {
            csv += fmt17(d.time) + ',' + fmt17(mean_phonon(d)) + ',' + fmt17(d.p.front()) + '\n';
        };
        evolve_rate_equation_detailed(thermal_distribution(mean0, top), summary, horizon, opt);
        detail::write_text(csv, c.out, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace optocool::cli
