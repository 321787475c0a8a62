// cooling.hpp: Cooling rate, occupancy limits and phonon rate-equation kinetics

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>


#include "optocool/error.hpp"
#include "optocool/format.hpp"
#include "optocool/dopri.hpp"

namespace optocool {

struct CoolingSummary {
    double s_plus{0.0};   // S_FF(+omega_m), drives phonon absorption (cooling)
    double s_minus{0.0};  // S_FF(-omega_m), drives phonon emission (heating)
    double G{0.0};
    double gamma_m{0.0};
    double n_m{0.0};
    double gamma_c{0.0};
    std::optional<double> n_c;  // only when gamma_c > 0
    std::optional<double> n_f;  // only when not heating-dominated
    double a_down{0.0};         // G^2 S(+) + gamma_m (n_m + 1)
    double a_up{0.0};           // G^2 S(-) + gamma_m n_m
    bool heating_dominated{false};
};

inline CoolingSummary cooling_summary(double s_plus, double s_minus, double G, double gamma_m, double n_m) {
    CoolingSummary c;
    c.s_plus = s_plus;
    c.s_minus = s_minus;
    c.G = G;
    c.gamma_m = gamma_m;
    c.n_m = n_m;
    const double g2 = G * G;
    c.gamma_c = g2 * (s_plus - s_minus);
    c.a_down = g2 * s_plus + gamma_m * (n_m + 1.0);
    c.a_up = g2 * s_minus + gamma_m * n_m;
    c.heating_dominated = !(s_plus > s_minus);
    if (c.heating_dominated) return c;
    if (c.gamma_c > 0.0) c.n_c = s_minus / (s_plus - s_minus);
    if (gamma_m + c.gamma_c > 0.0) c.n_f = (gamma_m * n_m + c.gamma_c * c.n_c.value_or(0.0)) / (gamma_m + c.gamma_c);
    return c;
}

// ---------------------------------------------------------------------------
// Fock-state distribution

struct PhononDistribution {
    std::vector<double> p;  // P_0 .. P_{n_max}
    double time{0.0};

    std::size_t n_max() const { return p.empty() ? 0 : p.size() - 1; }
};

inline constexpr double tail_threshold = 1e-10;
inline constexpr double conservation_tolerance = 1e-9;
inline constexpr double negativity_floor = -1e-12;

inline double mean_phonon(const PhononDistribution& d) {
    double m = 0.0;
    for (std::size_t n = 0; n < d.p.size(); ++n) m += static_cast<double>(n) * d.p[n];
    return m;
}

inline PhononDistribution fock_state(std::size_t n, std::size_t n_max) {
    PhononDistribution d;
    d.p.assign(n_max + 1, 0.0);
    d.p.at(n) = 1.0;
    return d;
}

// Smallest N with thermal tail sum_{n>N} P_n < 1e-10, capped at 20 (n + 1).
inline std::size_t default_n_max(double n_mean) {
    if (n_mean <= 0.0) return 0;
    const double r = n_mean / (n_mean + 1.0);
    // tail beyond N is r^(N+1)
    const double needed = std::ceil(std::log(tail_threshold) / std::log(r)) - 1.0;
    const double cap = std::floor(20.0 * (n_mean + 1.0));
    return static_cast<std::size_t>(std::max(0.0, std::min(needed, cap)));
}

// Truncated geometric distribution with ratio r, normalized over 0..n_max.
inline PhononDistribution geometric_distribution(double r, std::size_t n_max) {
    PhononDistribution d;
    d.p.resize(n_max + 1);
    double w = 1.0, total = 0.0;
    for (auto& pn : d.p) {
        pn = w;
        total += w;
        w *= r;
    }
    for (auto& pn : d.p) pn /= total;
    return d;
}

inline PhononDistribution thermal_distribution(double n_mean, std::size_t n_max) {
    return geometric_distribution(n_mean / (n_mean + 1.0), n_max);
}

// Detailed-balance steady state of the truncated chain.
inline PhononDistribution steady_distribution(const CoolingSummary& s, std::size_t n_max) {
    if (!(s.a_down > s.a_up))
        throw Error(ErrorKind::Unstable, "heating rate " + fmt17(s.a_up) + " >= cooling rate " + fmt17(s.a_down));
    return geometric_distribution(s.a_up / s.a_down, n_max);
}

// Birth-death generator on levels 0..n_max: level n decays at a_down n and is
// excited at a_up (n + 1); there is no excitation out of the top level.
class RateEquation {
public:
    RateEquation(double a_down, double a_up, std::size_t n_max) : down_(n_max + 2, 0.0), up_(n_max + 2, 0.0) {
        for (std::size_t n = 0; n <= n_max; ++n) {
            down_[n] = a_down * static_cast<double>(n);
            up_[n + 1] = n < n_max ? a_up * static_cast<double>(n + 1) : 0.0;  // shifted by one
        }
    }

    void operator()(const std::vector<double>& p, std::vector<double>& dpdt) const {
        const std::size_t top = p.size() - 1;
        const double* down = down_.data();
        const double* up = up_.data();  // up[n + 1] is the excitation rate out of n
        if (top == 0) {
            dpdt[0] = 0.0;
            return;
        }
        dpdt[0] = down[1] * p[1] - up[1] * p[0];
        for (std::size_t n = 1; n < top; ++n)
            dpdt[n] = down[n + 1] * p[n + 1] + up[n] * p[n - 1] - (down[n] + up[n + 1]) * p[n];
        dpdt[top] = up[top] * p[top - 1] - down[top] * p[top];
    }

private:
    std::vector<double> down_;
    std::vector<double> up_;
};

struct EvolveOptions {
    double abs_tol{1e-14};  // below the negativity floor so tail entries stay non-negative
    double rel_tol{1e-10};
    // Called at t = k t_final / samples for k = 0..samples (when samples > 0).
    std::size_t samples{0};
    std::function<void(const PhononDistribution&)> on_sample;
};

struct EvolveResult {
    PhononDistribution final;
    std::size_t accepted_steps{0};
    std::size_t rejected_steps{0};
    std::size_t clamped_entries{0};  // negatives in (-1e-12, 0) reset to zero
};

namespace detail {

// Returns true when negatives were clamped.
inline bool audit_step(std::vector<double>& p, std::size_t& clamped, double t) {
    const std::size_t clamped_before = clamped;
    double total = 0.0;
    for (auto& pn : p) {
        if (pn < 0.0) {
            if (pn < negativity_floor)
                throw Error(ErrorKind::InvariantBreach, "negative probability " + fmt17(pn) + " at t = " + fmt17(t));
            pn = 0.0;
            ++clamped;
        }
        total += pn;
    }
    if (std::abs(total - 1.0) >= conservation_tolerance)
        throw Error(ErrorKind::InvariantBreach, "probability not conserved: sum = " + fmt17(total) + " at t = " + fmt17(t));
    if (!(p.back() < tail_threshold))
        throw Error(ErrorKind::TruncationOverflow,
                    "P_Nmax = " + fmt17(p.back()) + " at t = " + fmt17(t) + "; increase n_max");
    return clamped != clamped_before;
}

}  // namespace detail

// Integrates the phonon rate equation from initial.time to initial.time + t_final
// with error-controlled explicit Runge-Kutta steps; every accepted step is
// audited for conservation, positivity and truncation.
inline EvolveResult evolve_rate_equation_detailed(const PhononDistribution& initial, const CoolingSummary& s,
                                                  double t_final, const EvolveOptions& opt = {}) {
    if (initial.p.empty()) throw Error(ErrorKind::Validation, "empty distribution");
    if (s.a_down < 0.0 || s.a_up < 0.0) throw Error(ErrorKind::Validation, "negative transition rates");
    if (t_final < 0.0) throw Error(ErrorKind::Validation, "negative evolution time");

    const RateEquation f(s.a_down, s.a_up, initial.n_max());
    // Gershgorin bound on the generator spectrum; Dormand-Prince is stable
    // on the negative real axis up to about 3.3 / radius.
    const double top = static_cast<double>(initial.p.size() - 1);
    const double radius = 2.0 * top * (s.a_down + s.a_up);
    const double h_max = radius > 0.0 ? 3.0 / radius : t_final;
    const dopri::Tolerance tol{opt.abs_tol, opt.rel_tol};
    dopri::Controller ctl;

    EvolveResult out;
    std::vector<double> p = initial.p;
    const double t0 = initial.time;
    double t = t0;

    auto audit = [&](std::vector<double>& y, double time) {
        ++out.accepted_steps;
        return detail::audit_step(y, out.clamped_entries, time);
    };
    auto emit = [&](double time) {
        if (opt.samples > 0 && opt.on_sample) opt.on_sample(PhononDistribution{p, time});
    };

    const std::size_t segments = std::max<std::size_t>(opt.samples, 1);
    emit(t0);
    for (std::size_t k = 1; k <= segments; ++k) {
        const double target = t0 + t_final * static_cast<double>(k) / static_cast<double>(segments);
        if (radius == 0.0) {
            t = target;  // no transitions
        } else {
            const auto stats = dopri::integrate(f, p, t, target, h_max, ctl, tol, audit);
            out.rejected_steps += stats.rejected;
        }
        emit(t);
    }
    out.final = PhononDistribution{std::move(p), t};
    return out;
}

inline PhononDistribution evolve_rate_equation(const PhononDistribution& initial, const CoolingSummary& s,
                                               double t_final) {
    return evolve_rate_equation_detailed(initial, s, t_final).final;
}

}  // namespace optocool
