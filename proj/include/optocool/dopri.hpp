// dopri.hpp: Dormand-Prince 5(4) integrator with PI step-size control
//
// Explicit embedded Runge-Kutta with FSAL, max-norm error control and a PI
// step-size controller (beta = 0.04).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#if defined(__SSE2__)
#include <pmmintrin.h>
#endif

namespace optocool::dopri {

// Flushes subnormals to zero for the lifetime of the guard (calling thread
// only). Decaying tails of a distribution otherwise drift into the subnormal
// range, where arithmetic is two orders of magnitude slower.
class FlushSubnormals {
public:
#if defined(__SSE2__)
    FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }  // FTZ | DAZ
    ~FlushSubnormals() { _mm_setcsr(saved_); }

private:
    unsigned int saved_;
#else
    FlushSubnormals() = default;
#endif
public:
    FlushSubnormals(const FlushSubnormals&) = delete;
    FlushSubnormals& operator=(const FlushSubnormals&) = delete;
};

struct Tolerance {
    double abs{1e-14};
    double rel{1e-10};
};

struct StepStats {
    std::size_t accepted{0};
    std::size_t rejected{0};
};

// Step-size memory carried across successive integrate() calls.
struct Controller {
    double h{0.0};
    double err_old{1e-4};
};

namespace tableau {
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
}  // namespace tableau

// Integrates the autonomous system y' = f(y) from t to t_end.
// `f(const std::vector<double>&, std::vector<double>&)` writes the derivative;
// `after_step(y, t)` runs on every accepted step; it may adjust y in place and
// returns true when it did.
// `h_max` caps the step (pass the explicit stability limit for stiff input).
template <class Rhs, class AfterStep>
StepStats integrate(const Rhs& f, std::vector<double>& y, double& t, double t_end, double h_max,
                    Controller& ctl, const Tolerance& tol, AfterStep&& after_step) {
    using namespace tableau;
    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
    constexpr double expo = 0.2 - beta * 0.75;

    const FlushSubnormals ftz;
    StepStats stats;
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y1(n);
    f(y, k1);
    if (!(ctl.h > 0.0)) ctl.h = std::min(h_max, 1e-3 * std::max(t_end - t, 1e-300));

    while (t < t_end) {
        double h = std::min(ctl.h, h_max);
        const bool last = h >= t_end - t;
        if (last) h = t_end - t;

        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        f(yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(yt, k3);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(y1, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double est = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y1[i]));
            err = std::max(err, std::abs(est) / scale);
        }

        const double fac11 = std::pow(err, expo);
        if (err <= 1.0) {
            ++stats.accepted;
            double fac = fac11 / std::pow(ctl.err_old, beta);
            fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
            ctl.err_old = std::max(err, 1e-4);
            const double h_next = h / fac;
            // a step shortened to land on t_end keeps the previous proposal
            ctl.h = last ? std::max(ctl.h, h_next) : h_next;
            t = last ? t_end : t + h;
            y.swap(y1);
            if (after_step(y, t))
                f(y, k1);
            else
                k1.swap(k7);  // first-same-as-last
        } else {
            ++stats.rejected;
            ctl.h = h / std::min(1.0 / fac_min, fac11 / safety);
        }
    }
    return stats;
}

}  // namespace optocool::dopri
