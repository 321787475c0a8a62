// checks.hpp: Self-check suite: oracle equivalence, analytic limits, identities and figure reproduction
//
// Shared by `optocool check` and the acceptance runner. Each check returns a
// verdict with a one-line measurement summary; tolerances are fixed here.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "optocool/cooling.hpp"
#include "optocool/params.hpp"
#include "optocool/spectrum.hpp"
#include "optocool/steady_state.hpp"
#include "optocool/sweep.hpp"

namespace optocool::checks {

struct CheckResult {
    int id{0};
    std::string name;
    bool passed{false};
    std::string detail;
    double seconds{0.0};
};

namespace tol {
inline constexpr double oracle_rel = 1e-10;
inline constexpr double oracle_seconds = 10.0;
inline constexpr double lorentz_abs = 1e-12;
inline constexpr double dark_ratio = 1e-6;
inline constexpr double coupling_rel = 0.01;
inline constexpr double resonance_abs = 1e-12;
inline constexpr double eigen_identity = 1e-12;
inline constexpr double eigen_contains = 1e-9;
inline constexpr double kinetics_rel = 1e-6;
inline constexpr double kinetics_seconds = 30.0;
inline constexpr double fig5_seconds = 60.0;
inline constexpr double robustness_rel = 0.10;
}  // namespace tol

inline std::string sci(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Random parameter set with all decays in [0.05, 5], so no grid point hits a pole.
inline SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> decay(0.05, 5.0), det(-3.0, 3.0), j(0.0, 3.0), ga(0.0, 0.3);
    std::uniform_int_distribution<std::int64_t> n(0, 500);
    SystemParams p = default_params();
    p.kappa1 = decay(rng);
    p.kappa2 = decay(rng);
    p.gamma = decay(rng);
    p.delta1 = det(rng);
    p.omega_atom = det(rng);
    p.delta2_mode = Delta2Mode::Effective;
    p.delta2 = det(rng);
    p.J = j(rng);
    p.g_a = ga(rng);
    p.N = n(rng);
    return p;
}

inline constexpr std::uint64_t default_seed = 0x6f70746f636f6f6cULL;

namespace detail {

template <class F>
CheckResult timed(int id, std::string name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r{id, std::move(name), false, {}, 0.0};
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace detail

// 1. Closed form versus susceptibility-matrix oracle.
inline CheckResult oracle_equivalence(std::uint64_t seed = default_seed, std::size_t draws = 100) {
    return detail::timed(1, "oracle equivalence", [&](CheckResult& r) {
        std::vector<SystemParams> sets;
        const auto base = figures::fig2_base();
        for (const auto& cfg : figures::fig2_configs()) {
            SystemParams p = base;
            for (const auto& [k, v] : cfg.overrides) set_parameter(p, k, v);
            sets.push_back(p);
        }
        std::mt19937_64 rng(seed);
        for (std::size_t k = 0; k < draws; ++k) sets.push_back(random_params(rng));

        const auto start = std::chrono::steady_clock::now();
        const auto grid = default_grid();
        double worst = 0.0;
        std::size_t points = 0;
        for (const auto& p : sets) {
            const double d2 = solve_steady_state(p).chosen().delta2_eff;
            for (double w : grid) {
                worst = std::max(worst, detail::rel_err(force_spectrum(w, p, d2), spectrum_matrix_oracle(w, p, d2)));
                ++points;
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.passed = worst < tol::oracle_rel && secs < tol::oracle_seconds;
        r.detail = "max rel err " + sci(worst) + " over " + std::to_string(points) + " points (limit " +
                   sci(tol::oracle_rel) + "), " + sci(secs, 3) + " s";
    });
}

// 2. Bare-cavity Lorentzian.
inline CheckResult lorentzian_limit() {
    return detail::timed(2, "Lorentzian limit", [](CheckResult& r) {
        SystemParams p = default_params();
        p.J = 0.0;
        p.g_a = 0.0;
        p.kappa2 = 3.0;
        const double d2 = solve_steady_state(p).chosen().delta2_eff;
        const double peak = force_spectrum(d2, p, d2);
        const double lo = force_spectrum(d2 - 3.0, p, d2);
        const double hi = force_spectrum(d2 + 3.0, p, d2);
        const double err = std::max({std::abs(peak - 2.0 / 3.0), std::abs(lo - 1.0 / 3.0), std::abs(hi - 1.0 / 3.0)});
        r.passed = err < tol::lorentz_abs;
        r.detail = "peak " + fmt17(peak) + ", half-max " + fmt17(lo) + " / " + fmt17(hi) + ", max abs err " + sci(err);
    });
}

// Parameters of the dark-state operating point (units of omega_m).
inline SystemParams dark_state_params(double narrow_width) {
    SystemParams p = default_params();
    p.delta1 = -1.0;
    p.omega_atom = -1.0;
    p.J = 0.45;
    p.N = 200;
    p.g_a = 0.1;
    p.delta2_mode = Delta2Mode::Effective;
    p.delta2 = -0.1;
    p.kappa2 = 3.0;
    p.gamma = narrow_width;
    p.kappa1 = narrow_width;
    return p;
}

// 3. Heating sideband suppression by the dark state.
inline CheckResult dark_state_suppression() {
    return detail::timed(3, "dark-state suppression", [](CheckResult& r) {
        const auto p = dark_state_params(1e-6);
        const double ratio = force_spectrum(-1.0, p, p.delta2) / force_spectrum(1.0, p, p.delta2);
        r.passed = ratio < tol::dark_ratio;
        r.detail = "S(-w_m)/S(+w_m) = " + sci(ratio, 6) + " (limit " + sci(tol::dark_ratio) + ")";
    });
}

// 4. Optimal-coupling condition at delta2_eff = -0.1.
inline CheckResult optimal_coupling_consistency() {
    return detail::timed(4, "optimal coupling", [](CheckResult& r) {
        const double required = optimal_coupling(-0.1);
        auto p = dark_state_params(0.1);
        const double ng2 = p.collective().squared;
        const double j = std::sqrt(required - ng2);
        p.J = j;
        const double dev = std::abs(j - 0.45) / 0.45;
        const double residual = std::abs(resonance_check(p, -0.1));
        r.passed = std::abs(required - 2.2) < 1e-12 && dev < tol::coupling_rel && residual < tol::resonance_abs;
        r.detail = "J^2+Ng^2 = " + fmt17(required) + ", J = " + sci(j, 6) + " (" + sci(100.0 * dev, 3) +
                   "% from 0.45), resonance residual " + sci(residual);
    });
}

// 5. Hybrid eigenenergy identities.
inline CheckResult eigen_identities(std::uint64_t seed = default_seed, std::size_t draws = 100) {
    return detail::timed(5, "eigen identities", [&](CheckResult& r) {
        std::mt19937_64 rng(seed + 5);
        double sum_err = 0.0, prod_err = 0.0, contain_err = 0.0;
        for (std::size_t k = 0; k < draws; ++k) {
            auto p = random_params(rng);
            p.delta1 = p.omega_atom;
            const double d2 = p.delta2;
            const auto e = hybrid_eigenenergies(p, d2);
            const double coupling = p.J * p.J + p.collective().squared;
            sum_err = std::max(sum_err, std::abs(e.e_plus + e.e_minus - (p.omega_atom + d2)));
            prod_err = std::max(prod_err, std::abs(e.e_plus * e.e_minus - (p.omega_atom * d2 - coupling)));
            std::array<double, 3> expect{e.e_minus, e.e_zero, e.e_plus};
            std::sort(expect.begin(), expect.end());
            for (std::size_t i = 0; i < 3; ++i)
                contain_err = std::max(contain_err, std::abs(expect[i] - e.full_eigenvalues[i]));
        }
        r.passed = sum_err < tol::eigen_identity && prod_err < tol::eigen_identity && contain_err < tol::eigen_contains;
        r.detail = "sum err " + sci(sum_err) + ", product err " + sci(prod_err) + ", 3x3 spectrum err " +
                   sci(contain_err) + " over " + std::to_string(draws) + " draws";
    });
}

// fig5a coupling minimizing n_f; used as the kinetics operating point.
inline SystemParams kinetics_params() {
    auto spec = figures::fig5_spec(figures::fig5a_params());
    const auto table = run_sweep(spec, 1);
    double best = std::numeric_limits<double>::infinity(), best_j = 0.0;
    for (const auto& row : table.rows) {
        if (row.n_f && *row.n_f < best) {
            best = *row.n_f;
            best_j = row.value;
        }
    }
    auto p = figures::fig5a_params();
    p.J = best_j;
    return p;
}

// 6. Rate-equation relaxation reaches the analytic final occupancy.
inline CheckResult kinetics_identity() {
    return detail::timed(6, "phonon kinetics identity", [](CheckResult& r) {
        const auto start = std::chrono::steady_clock::now();
        const auto p = kinetics_params();
        const auto s = cooling_point(p);
        const double n_f = s.n_f.value();
        const std::size_t n_max = default_n_max(s.n_m);
        const double t_final = 25.0 / (s.a_down - s.a_up);

        double max_drift = 0.0;
        EvolveOptions opt;
        opt.samples = 50;
        opt.on_sample = [&](const PhononDistribution& d) {
            double total = 0.0;
            for (double v : d.p) total += v;
            max_drift = std::max(max_drift, std::abs(total - 1.0));
        };
        const auto res = evolve_rate_equation_detailed(thermal_distribution(s.n_m, n_max), s, t_final, opt);
        const double mean = mean_phonon(res.final);
        const double rel = std::abs(mean - n_f) / n_f;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.passed = rel < tol::kinetics_rel && max_drift < conservation_tolerance && secs < tol::kinetics_seconds;
        r.detail = "J = " + sci(p.J, 4) + ", N_max = " + std::to_string(n_max) + ", mean " + fmt17(mean) + " vs n_f " +
                   fmt17(n_f) + " (rel " + sci(rel) + "), max |sum-1| " + sci(max_drift) + ", " +
                   std::to_string(res.accepted_steps) + " steps, " + sci(secs, 3) + " s";
    });
}

struct Fig5Minima {
    double n_c{std::numeric_limits<double>::infinity()};
    double n_c_at{0.0};
    double n_f{std::numeric_limits<double>::infinity()};
    double n_f_at{0.0};
};

inline Fig5Minima fig5_minima(const SweepTable& t) {
    Fig5Minima m;
    for (const auto& row : t.rows) {
        if (row.n_c && *row.n_c < m.n_c) {
            m.n_c = *row.n_c;
            m.n_c_at = row.value;
        }
        if (row.n_f && *row.n_f < m.n_f) {
            m.n_f = *row.n_f;
            m.n_f_at = row.value;
        }
    }
    return m;
}

// 7. Minima of the fig5 phonon-number curves.
inline CheckResult fig5_reproduction(unsigned threads = 0) {
    return detail::timed(7, "fig5 phonon minima", [&](CheckResult& r) {
        const auto start = std::chrono::steady_clock::now();
        const double n_m = thermal_occupancy(figures::fig5_base());
        const auto a = fig5_minima(run_sweep(figures::fig5_spec(figures::fig5a_params()), threads));
        const auto b = fig5_minima(run_sweep(figures::fig5_spec(figures::fig5b_params()), threads));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const bool nm_ok = std::abs(n_m - 312.0) < 0.5;
        const bool a_nc = std::abs(a.n_c - 0.18) <= 0.05;
        const bool a_nf = std::abs(a.n_f - 0.32) <= 0.08;
        const bool b_nc = b.n_c < 0.05;
        const bool b_nf = b.n_f < a.n_f;
        r.passed = nm_ok && a_nc && a_nf && b_nc && b_nf && secs < tol::fig5_seconds;
        auto mark = [](bool ok) { return ok ? " ok" : " FAIL"; };
        r.detail = "n_m " + sci(n_m, 6) + mark(nm_ok) + "; (a) min n_c " + sci(a.n_c) + " at J=" + sci(a.n_c_at, 3) +
                   mark(a_nc) + ", min n_f " + sci(a.n_f) + " at J=" + sci(a.n_f_at, 3) + mark(a_nf) +
                   "; (b) min n_c " + sci(b.n_c) + mark(b_nc) + ", min n_f " + sci(b.n_f) + mark(b_nf);
    });
}

// 8. Insensitivity of S_FF(+-omega_m) to the auxiliary-cavity linewidth.
inline CheckResult fig3_robustness() {
    return detail::timed(8, "fig3 kappa1 robustness", [](CheckResult& r) {
        const auto base = figures::fig3_base();
        double worst = 0.0;
        std::string values;
        for (double w : {-1.0, 1.0}) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (double k1 : {0.1, 1.0, 3.0}) {
                auto p = base;
                p.kappa1 = k1;
                const double s = force_spectrum(w, p, solve_steady_state(p).chosen().delta2_eff);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
            const double spread = (hi - lo) / lo;
            worst = std::max(worst, spread);
            values += (values.empty() ? "" : ", ") + std::string(w < 0 ? "spread(-w_m) " : "spread(+w_m) ") +
                      sci(100.0 * spread, 3) + "%";
        }
        r.passed = worst < tol::robustness_rel;
        r.detail = values + " (limit 10%)";
    });
}

// 9. Sweep output independent of the worker count.
inline CheckResult sweep_determinism() {
    return detail::timed(9, "sweep determinism", [](CheckResult& r) {
        const unsigned many = std::max(4u, std::thread::hardware_concurrency());
        bool same = true;
        for (const auto& base : {figures::fig5a_params(), figures::fig5b_params()}) {
            const auto spec = figures::fig5_spec(base);
            same = same && render_csv(run_sweep(spec, 1)) == render_csv(run_sweep(spec, many));
        }
        const auto grid = default_grid();
        same = same && render_csv(sweep_spectrum(figures::fig2_base(), figures::fig2_configs(), grid, 1)) ==
                           render_csv(sweep_spectrum(figures::fig2_base(), figures::fig2_configs(), grid, many));
        r.passed = same;
        r.detail = std::string(same ? "identical" : "DIFFERENT") + " CSV bytes at 1 vs " + std::to_string(many) +
                   " threads (fig5a, fig5b, fig2)";
    });
}

using CheckFn = std::function<CheckResult()>;

inline std::vector<CheckFn> acceptance_suite() {
    return {[] { return oracle_equivalence(); }, lorentzian_limit,         dark_state_suppression,
            optimal_coupling_consistency,        [] { return eigen_identities(); }, kinetics_identity,
            [] { return fig5_reproduction(); }, fig3_robustness,          sweep_determinism};
}

// Oracle-equivalence and identity checks run by `optocool check`.
inline std::vector<CheckFn> self_check_suite() {
    return {[] { return oracle_equivalence(); }, lorentzian_limit, optimal_coupling_consistency,
            [] { return eigen_identities(); }, kinetics_identity};
}

inline std::string format_result(const CheckResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %d %-26s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
    return std::string(head) + " " + r.detail + " [" + sci(r.seconds, 3) + " s]";
}

}  // namespace optocool::checks
