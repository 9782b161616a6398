#pragma once

// Embedded Dormand-Prince 5(4) integrator with adaptive step control.
// State is a std::vector<double>; the RHS is any callable f(t, y, dydt).

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasepump {

struct OdeError : std::runtime_error {
    double t_fail;
    OdeError(const std::string& msg, double t)
        : std::runtime_error(msg + " at t = " + std::to_string(t)), t_fail(t) {}
};

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 0.0;  // 0 = no cap
};

// Integrates from t0 to t1, calling observer(t, y) after every accepted step
// (and once at t0).  Returns the final state.
template <typename Rhs, typename Observer>
std::vector<double> integrate_adaptive(Rhs&& rhs, std::vector<double> y,
                                       double t0, double t1,
                                       const OdeOptions& opt,
                                       Observer&& observer) {
    // Dormand-Prince coefficients
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::abs(opt.h_init);
    if (opt.h_max > 0.0) h = dir * std::min(std::abs(h), opt.h_max);

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n);

    rhs(t, y, k1);
    observer(t, y);

    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);  // FSAL

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = opt.abs_tol +
                        opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(ei) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            observer(t, y);
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (opt.h_max > 0.0 && std::abs(h) > opt.h_max) h = dir * opt.h_max;
        if (std::abs(h) < opt.h_min)
            throw OdeError("step-size underflow", t);
    }
    return y;
}

template <typename Rhs>
std::vector<double> integrate_adaptive(Rhs&& rhs, std::vector<double> y,
                                       double t0, double t1,
                                       const OdeOptions& opt) {
    return integrate_adaptive(std::forward<Rhs>(rhs), std::move(y), t0, t1, opt,
                              [](double, const std::vector<double>&) {});
}

}  // namespace phasepump
