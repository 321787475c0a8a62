// steady_state.hpp: Mean-field fixed point of the driven hybrid cavity system
//
// The radiation-pressure shift of the cavity-2 detuning depends on the
// intracavity intensity x = |<a2>|^2, which turns the fixed point into a real
// cubic in x. All non-negative roots are returned as separate branches.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "optocool/error.hpp"
#include "optocool/params.hpp"

namespace optocool {

using cplx = std::complex<double>;

struct SteadyState {
    cplx a1;
    cplx a2;
    cplx b;
    cplx sigma_ge;
    double intensity{0.0};    // |<a2>|^2
    double delta2_eff{0.0};   // shifted detuning
    double delta2_bare{0.0};  // bare detuning (implied in Effective mode)
    double G{0.0};            // g |<a2>|
    double residual{0.0};     // max-norm of the mean-field equations of motion
};

struct BranchSet {
    std::vector<SteadyState> solutions;  // ascending intensity
    std::size_t selected{0};

    const SteadyState& chosen() const { return solutions.at(selected); }
};

enum class BranchSelect { Lowest, Highest };

// Residual tolerance for a solved steady state.
inline double steady_state_tolerance(double drive_modulus) {
    return 1e-10 * std::max(1.0, drive_modulus);
}

// Right-hand side of the noiseless mean-field equations, max-norm over the
// four components. Uses the bare detuning.
inline double mean_field_residual(const SystemParams& p, const SteadyState& s, cplx drive) {
    const auto cc = p.collective();
    const cplx i{0.0, 1.0};
    const cplx r1 = -(p.kappa1 + i * p.delta1) * s.a1 - i * p.J * s.a2;
    const cplx r2 = -(p.kappa2 + i * s.delta2_bare) * s.a2 - i * p.J * s.a1 - i * cc.value * s.sigma_ge +
                    i * p.g * s.a2 * (2.0 * s.b.real()) + drive;
    const cplx r3 = -(p.gamma_m + i) * s.b + i * p.g * std::norm(s.a2);
    const cplx r4 = -(p.gamma + i * p.omega_atom) * s.sigma_ge - i * cc.value * s.a2;
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
}

namespace detail {

// kappa2 + N g_a^2/(gamma + i Omega) + J^2/(kappa1 + i Delta1); uncoupled
// channels contribute nothing.
inline cplx static_loading(const SystemParams& p) {
    const auto cc = p.collective();
    const cplx i{0.0, 1.0};
    if (p.J != 0.0 && p.kappa1 == 0.0 && p.delta1 == 0.0)
        throw Error(ErrorKind::Degenerate, "kappa1 = delta1 = 0 with J != 0");
    if (cc.squared != 0.0 && p.gamma == 0.0 && p.omega_atom == 0.0)
        throw Error(ErrorKind::Degenerate, "gamma = omega_atom = 0 with N g_a^2 != 0");
    cplx k = p.kappa2;
    if (cc.squared != 0.0) k += cc.squared / (p.gamma + i * p.omega_atom);
    if (p.J != 0.0) k += p.J * p.J / (p.kappa1 + i * p.delta1);
    return k;
}

// Detuning shift per unit intensity: Delta2 - Delta2_eff = beta x.
inline double shift_per_intensity(const SystemParams& p) {
    return 2.0 * p.g * p.g / (p.gamma_m * p.gamma_m + 1.0);
}

inline SteadyState back_substitute(const SystemParams& p, cplx loading, double delta2_eff, cplx drive) {
    const cplx i{0.0, 1.0};
    const auto cc = p.collective();
    SteadyState s;
    s.delta2_eff = delta2_eff;
    const cplx denom = loading + i * delta2_eff;
    if (denom == cplx{0.0, 0.0})
        throw Error(ErrorKind::Degenerate, "undamped cavity-2 resonance (zero response denominator)");
    s.a2 = drive / denom;
    s.intensity = std::norm(s.a2);
    s.a1 = p.J != 0.0 ? -i * p.J * s.a2 / (p.kappa1 + i * p.delta1) : cplx{};
    s.sigma_ge = cc.squared != 0.0 ? -i * cc.value * s.a2 / (p.gamma + i * p.omega_atom) : cplx{};
    s.b = i * p.g * s.intensity / (p.gamma_m + i);
    s.delta2_bare = delta2_eff + p.g * 2.0 * s.b.real();
    s.G = p.g * std::abs(s.a2);
    s.residual = mean_field_residual(p, s, drive);
    return s;
}

// Non-negative real roots of
//   f(x) = beta^2 x^3 - 2 beta s x^2 + (kr^2 + s^2) x - e2,
// ascending. f(0) = -e2 <= 0 so at least one root exists for e2 > 0.
inline std::vector<double> intensity_roots(double beta, double s, double kr, double e2) {
    const double c1 = kr * kr + s * s;
    auto f = [&](double x) { return ((beta * beta * x - 2.0 * beta * s) * x + c1) * x - e2; };
    if (e2 == 0.0) return {0.0};
    if (beta == 0.0) {
        if (c1 == 0.0) return {};
        return {e2 / c1};
    }

    // Monotone pieces separated by the critical points of f.
    std::vector<double> breaks{0.0};
    const double disc = s * s - 3.0 * kr * kr;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        for (double xc : {(2.0 * s - r) / (3.0 * beta), (2.0 * s + r) / (3.0 * beta)})
            if (xc > 0.0) breaks.push_back(xc);
    }
    double hi = std::max(breaks.back(), c1 > 0.0 ? e2 / c1 : 1.0);
    if (hi <= breaks.back()) hi = breaks.back() + 1.0;
    while (f(hi) <= 0.0) hi *= 2.0;
    breaks.push_back(hi);

    std::vector<double> roots;
    const boost::math::tools::eps_tolerance<double> tol(52);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double lo = breaks[k], up = breaks[k + 1];
        const double flo = f(lo), fup = f(up);
        if (flo == 0.0) {
            if (roots.empty() || roots.back() != lo) roots.push_back(lo);
            continue;
        }
        if ((flo < 0.0) == (fup < 0.0)) continue;
        std::uintmax_t iters = 200;
        const auto [a, b] = boost::math::tools::toms748_solve(f, lo, up, flo, fup, tol, iters);
        const double x = 0.5 * (a + b);
        if (x >= 0.0 && (roots.empty() || roots.back() != x)) roots.push_back(x);
    }
    return roots;
}

}  // namespace detail

// Solves for all steady-state branches with a complex drive amplitude.
inline BranchSet solve_steady_state(const SystemParams& p, cplx drive,
                                    BranchSelect select = BranchSelect::Lowest) {
    const cplx loading = detail::static_loading(p);
    const double tol = steady_state_tolerance(std::abs(drive));
    BranchSet set;

    if (p.delta2_mode == Delta2Mode::Effective) {
        set.solutions.push_back(detail::back_substitute(p, loading, p.delta2, drive));
    } else {
        const double beta = detail::shift_per_intensity(p);
        const double s = loading.imag() + p.delta2;
        const auto roots = detail::intensity_roots(beta, s, loading.real(), std::norm(drive));
        if (roots.empty()) {
            if (loading.real() == 0.0 && s == 0.0)
                throw Error(ErrorKind::Degenerate, "undamped cavity-2 resonance (zero response denominator)");
            throw Error(ErrorKind::NoPhysicalRoot, "steady-state cubic has no non-negative root");
        }
        for (double x : roots) set.solutions.push_back(detail::back_substitute(p, loading, p.delta2 - beta * x, drive));
    }

    for (const auto& sol : set.solutions) {
        if (!(sol.residual < tol))
            throw Error(ErrorKind::InvariantBreach,
                        "steady-state residual " + fmt17(sol.residual) + " exceeds " + fmt17(tol));
    }
    set.selected = select == BranchSelect::Lowest ? 0 : set.solutions.size() - 1;
    return set;
}

inline BranchSet solve_steady_state(const SystemParams& p, BranchSelect select = BranchSelect::Lowest) {
    return solve_steady_state(p, cplx{p.epsilon, 0.0}, select);
}

// G = g |<a2>|, reported as a non-negative real.
inline double effective_coupling(const SteadyState& ss, const SystemParams& p) {
    return p.g * std::abs(ss.a2);
}

struct DiagnosticsReport {
    double g_over_kappa2{0.0};
    double g_over_omega_m{0.0};
    double g2_over_kappa2_omega_m{0.0};
    bool warn{false};
};

inline constexpr double weak_coupling_threshold = 0.3;

// Checks that the linearized, back-action-free treatment is justified.
inline DiagnosticsReport weak_coupling_validity(const SteadyState& ss, const SystemParams& p) {
    const double G = effective_coupling(ss, p);
    auto ratio = [](double num, double den) {
        if (num == 0.0) return 0.0;
        return den == 0.0 ? INFINITY : num / den;
    };
    DiagnosticsReport r;
    r.g_over_kappa2 = ratio(G, p.kappa2);
    r.g_over_omega_m = G;
    r.g2_over_kappa2_omega_m = ratio(G * G, p.kappa2);
    r.warn = r.g_over_kappa2 > weak_coupling_threshold || r.g_over_omega_m > weak_coupling_threshold ||
             r.g2_over_kappa2_omega_m > weak_coupling_threshold;
    return r;
}

}  // namespace optocool
