// spectrum.hpp: Radiation-force absorption spectrum and interference analysis
//
// force_spectrum() is the closed form; spectrum_matrix_oracle() rebuilds the
// same quantity from the linearized fluctuation equations by solving the
// frequency-domain susceptibility system numerically. The two share no code
// beyond the parameter struct.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "optocool/error.hpp"
#include "optocool/params.hpp"

namespace optocool {

using cplx = std::complex<double>;

enum class SpectrumMethod { ClosedForm, MatrixOracle };

struct SpectrumCurve {
    std::vector<double> omega;  // ascending, units of omega_m
    std::vector<double> s_ff;   // units of 1/omega_m
    SpectrumMethod method{SpectrumMethod::ClosedForm};
};

struct HybridEigenSet {
    double e_plus{0.0};
    double e_minus{0.0};
    double e_zero{0.0};
    std::array<double, 3> full_eigenvalues{};  // ascending
};

// Uniform grid of `points` samples on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) grid[k] = lo + step * static_cast<double>(k);
    grid.back() = hi;
    return grid;
}

inline std::vector<double> default_grid() { return uniform_grid(-4.0, 4.0, 4001); }

namespace detail {

inline void guard_poles(double omega, const SystemParams& p) {
    if (p.J != 0.0 && p.kappa1 == 0.0 && omega == p.delta1)
        throw Error(ErrorKind::PoleAtGrid, "kappa1 = 0 and omega = delta1 with J != 0");
    if (p.collective().squared != 0.0 && p.gamma == 0.0 && omega == p.omega_atom)
        throw Error(ErrorKind::PoleAtGrid, "gamma = 0 and omega = omega_atom with N g_a^2 != 0");
}

}  // namespace detail

// H(w) = kappa2 - i(w - D2) + J^2/(kappa1 - i(w - D1)) + N g_a^2/(gamma - i(w - Omega))
inline cplx response_denominator(double omega, const SystemParams& p, double delta2_eff) {
    detail::guard_poles(omega, p);
    const cplx i{0.0, 1.0};
    const double ng2 = p.collective().squared;
    cplx h = p.kappa2 - i * (omega - delta2_eff);
    if (p.J != 0.0) h += p.J * p.J / (p.kappa1 - i * (omega - p.delta1));
    if (ng2 != 0.0) h += ng2 / (p.gamma - i * (omega - p.omega_atom));
    return h;
}

inline double force_spectrum(double omega, const SystemParams& p, double delta2_eff) {
    const cplx h = response_denominator(omega, p, delta2_eff);
    const double ng2 = p.collective().squared;
    double num = 2.0 * p.kappa2;
    if (p.J != 0.0 && p.kappa1 != 0.0) {
        const double d = omega - p.delta1;
        num += 2.0 * p.J * p.J * p.kappa1 / (p.kappa1 * p.kappa1 + d * d);
    }
    if (ng2 != 0.0 && p.gamma != 0.0) {
        const double d = omega - p.omega_atom;
        num += 2.0 * ng2 * p.gamma / (p.gamma * p.gamma + d * d);
    }
    return num / std::norm(h);
}

// Independent evaluation from the linearized fluctuation equations for
// (da2, da1, dsigma). With d/dt -> -i w the system reads M(w) x = L n_in;
// only the vacuum correlator <n n^dag> survives in <F(t) F(0)>, so
//   S_FF(w) = sum_k 2 decay_k |(M^-1)_{0k}|^2.
// Channels with zero coupling are left out of the system.
inline double spectrum_matrix_oracle(double omega, const SystemParams& p, double delta2_eff) {
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
    using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 3, 1>;
    const cplx i{0.0, 1.0};

    struct Channel {
        double decay;
        double detuning;
        double coupling;  // to mode a2
    };
    std::vector<Channel> channels{{p.kappa2, delta2_eff, 0.0}};
    if (p.J != 0.0) channels.push_back({p.kappa1, p.delta1, p.J});
    if (p.collective().squared != 0.0) channels.push_back({p.gamma, p.omega_atom, p.collective().value});

    const auto n = static_cast<Eigen::Index>(channels.size());
    Mat m = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& c = channels[static_cast<std::size_t>(k)];
        m(k, k) = c.decay + i * (c.detuning - omega);
        if (k > 0) {
            m(0, k) = i * c.coupling;
            m(k, 0) = i * c.coupling;
        }
    }

    // Row 0 of M^-1 solves M^T y = e_0.
    const Eigen::PartialPivLU<Mat> lu(m.transpose());
    if (!(lu.rcond() > 1e-14))
        throw Error(ErrorKind::SingularMatrix, "susceptibility matrix singular at omega = " + fmt17(omega));
    Vec e0 = Vec::Zero(n);
    e0(0) = 1.0;
    const Vec row = lu.solve(e0);

    double s = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) s += 2.0 * channels[static_cast<std::size_t>(k)].decay * std::norm(row(k));
    return s;
}

inline SpectrumCurve evaluate_spectrum(const std::vector<double>& grid, const SystemParams& p, double delta2_eff,
                                       SpectrumMethod method = SpectrumMethod::ClosedForm) {
    SpectrumCurve curve;
    curve.method = method;
    curve.omega = grid;
    curve.s_ff.reserve(grid.size());
    for (double w : grid)
        curve.s_ff.push_back(method == SpectrumMethod::ClosedForm ? force_spectrum(w, p, delta2_eff)
                                                                  : spectrum_matrix_oracle(w, p, delta2_eff));
    return curve;
}

// Coherent energies of the (a2, a1, sigma) triplet: the two-mode formula and
// the full 3x3 spectrum. They coincide when delta1 == omega_atom.
inline HybridEigenSet hybrid_eigenenergies(const SystemParams& p, double delta2_eff) {
    const auto cc = p.collective();
    const double om = p.omega_atom;
    const double root = std::sqrt(4.0 * (p.J * p.J + cc.squared) + (om - delta2_eff) * (om - delta2_eff));

    HybridEigenSet set;
    set.e_plus = 0.5 * (om + delta2_eff + root);
    set.e_minus = 0.5 * (om + delta2_eff - root);
    set.e_zero = om;

    Eigen::Matrix3d h;
    h << delta2_eff, p.J, cc.value,
         p.J, p.delta1, 0.0,
         cc.value, 0.0, om;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h, Eigen::EigenvaluesOnly);
    for (int k = 0; k < 3; ++k) set.full_eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    return set;
}

// Required J^2 + N g_a^2 (units omega_m^2) for the cooling sideband to sit on
// a hybrid eigenenergy when delta1 = omega_atom = -omega_m.
inline double optimal_coupling(double delta2_eff) {
    if (delta2_eff > 1.0)
        throw Error(ErrorKind::InfeasibleDetuning, "delta2_eff = " + fmt17(delta2_eff) + " exceeds omega_m");
    return 2.0 * (1.0 - delta2_eff);
}

// det(E - H) of the coherent coupling matrix at E = omega_m. With
// delta1 = omega_atom = -omega_m this vanishes iff J^2 + N g_a^2 = 2(1 - delta2_eff).
inline double resonance_check(const SystemParams& p, double delta2_eff) {
    const double e = 1.0;
    const double ng2 = p.collective().squared;
    return (e - delta2_eff) * (e - p.delta1) * (e - p.omega_atom) - p.J * p.J * (e - p.omega_atom) -
           ng2 * (e - p.delta1);
}

}  // namespace optocool
