#pragma once

// Full coupled Duffing-Van der Pol simulation and Adler-reduction checks.
// The oscillators are integrated in their raw second-order form; the slow
// phase difference is recovered by quadrature demodulation and compared
// against the reduced phase equation coefficients.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasepump/ode.hpp"

namespace phasepump {

enum class CouplingKind { single, static_linear, parametric, nonlinear_parametric };

struct DuffingParams {
    CouplingKind kind = CouplingKind::single;
    double omega1 = 1.0;   // carrier of oscillator 1
    double omega2 = 1.0;   // carrier of oscillator 2
    double gamma1 = 0.01;  // negative-damping rate (nonlinear damping b is
    double gamma2 = 0.01;  // fixed to gamma by the amplitude rescaling)
    double a1 = 0.005;     // Duffing coefficient, dimensionless form
    double a2 = 0.005;
    double delta1 = 0.0;   // detunings; oscillator 1 carries (1 - delta1),
    double delta2 = 0.0;   // oscillator 2 carries (1 + delta2)
    double kappa1 = 0.0;   // linear coupling amplitudes
    double kappa2 = 0.0;
    double lambda1 = 0.0;  // nonlinear parametric coupling amplitudes
    double lambda2 = 0.0;
    double theta1 = 0.0;   // parametric coupling phases
    double theta2 = 0.0;

    std::vector<std::string> validity_warnings() const {
        std::vector<std::string> w;
        auto check = [&](double v, const char* name) {
            if (std::abs(v) > 0.1)
                w.push_back(std::string(name) + " above 0.1 strains the reduction");
        };
        check(gamma1, "gamma1");
        check(gamma2, "gamma2");
        check(a1, "a1");
        check(a2, "a2");
        check(delta1, "delta1");
        check(delta2, "delta2");
        check(kappa1, "kappa1");
        check(kappa2, "kappa2");
        check(lambda1, "lambda1");
        check(lambda2, "lambda2");
        return w;
    }
    void validate() const {
        if (omega1 <= 0.0 || omega2 <= 0.0)
            throw std::invalid_argument("carrier frequencies must be positive");
        if (gamma1 <= 0.0 || gamma2 <= 0.0)
            throw std::invalid_argument("damping rates must be positive");
    }
};

struct DuffingTraces {
    std::vector<double> t;   // uniform grid
    std::vector<double> u1;
    std::vector<double> u2;
    double dt = 0.0;
    DuffingParams params;
    std::vector<std::string> warnings;
};

struct Demodulated {
    std::vector<double> t;          // trimmed of filter edges
    std::vector<double> amplitude;  // |u0|, steady value 1 after rescaling
    std::vector<double> phase;      // unwrapped slow phase
};

struct ReductionReport {
    // reduced model dphi/dt = d - s sin(arg) - c cos(arg), arg = phi for
    // fundamental couplings and 2 phi for the overtone; coupling phases are
    // folded into s and c
    double d_pred = 0.0, s_pred = 0.0, c_pred = 0.0;
    double d_fit = 0.0, s_fit = 0.0, c_fit = 0.0;
    double residual_rel = 0.0;      // rms rate misfit over the carrier frequency
    double amplitude_ratio_dev = 0.0;  // max |R1/R2 - 1| seen in the fit window
    CouplingKind kind = CouplingKind::single;
};

struct DemodulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Second-order system in first-order form y = (u1, u1', u2, u2').
inline DuffingTraces simulate_duffing(const DuffingParams& dp,
                                      std::array<double, 4> init, double t_end,
                                      double dt_sample) {
    dp.validate();
    if (dt_sample <= 0.0 || t_end <= 0.0)
        throw std::invalid_argument("simulate_duffing: bad time grid");

    const double w1 = dp.omega1, w2 = dp.omega2;
    auto rhs = [&](double t, const std::vector<double>& y,
                   std::vector<double>& dy) {
        double drive1 = 0.0, drive2 = 0.0;
        switch (dp.kind) {
            case CouplingKind::single:
                break;
            case CouplingKind::static_linear:
                drive1 = w1 * w1 * dp.kappa1 * y[2];
                drive2 = w2 * w2 * dp.kappa2 * y[0];
                break;
            case CouplingKind::parametric: {
                double k1 = 2.0 * dp.kappa1 *
                            std::cos((w1 - w2) * t + dp.theta1);
                double k2 = 2.0 * dp.kappa2 *
                            std::cos((w2 - w1) * t + dp.theta2);
                drive1 = w1 * w1 * k1 * y[2];
                drive2 = w2 * w2 * k2 * y[0];
                break;
            }
            case CouplingKind::nonlinear_parametric: {
                double l1 = 2.0 * dp.lambda1 * std::cos(2.0 * (w1 - w2) * t);
                double l2 = 2.0 * dp.lambda2 * std::cos(2.0 * (w2 - w1) * t);
                drive1 = w1 * w1 * l1 * y[0] * y[2] * y[2];
                drive2 = w2 * w2 * l2 * y[2] * y[0] * y[0];
                break;
            }
        }
        dy[0] = y[1];
        dy[1] = -w1 * w1 * (1.0 - dp.delta1) * y[0] +
                dp.gamma1 * w1 * (1.0 - y[0] * y[0]) * y[1] -
                dp.a1 * w1 * w1 * y[0] * y[0] * y[0] + drive1;
        dy[2] = y[3];
        dy[3] = -w2 * w2 * (1.0 + dp.delta2) * y[2] +
                dp.gamma2 * w2 * (1.0 - y[2] * y[2]) * y[3] -
                dp.a2 * w2 * w2 * y[2] * y[2] * y[2] + drive2;
    };

    // record accepted steps with derivatives, then resample by cubic Hermite
    std::vector<double> ts;
    std::vector<std::array<double, 4>> ys, dys;
    std::vector<double> scratch(4);
    auto observer = [&](double t, const std::vector<double>& y) {
        rhs(t, y, scratch);
        ts.push_back(t);
        ys.push_back({y[0], y[1], y[2], y[3]});
        dys.push_back({scratch[0], scratch[1], scratch[2], scratch[3]});
    };
    OdeOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    integrate_adaptive(rhs, {init[0], init[1], init[2], init[3]}, 0.0, t_end,
                       opt, observer);

    DuffingTraces out;
    out.dt = dt_sample;
    out.params = dp;
    out.warnings = dp.validity_warnings();
    const int n = static_cast<int>(t_end / dt_sample) + 1;
    std::size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        double t = i * dt_sample;
        while (seg + 2 < ts.size() && ts[seg + 1] < t) ++seg;
        double h = ts[seg + 1] - ts[seg];
        double s = (t - ts[seg]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        auto interp = [&](int c) {
            return h00 * ys[seg][c] + h10 * h * dys[seg][c] +
                   h01 * ys[seg + 1][c] + h11 * h * dys[seg + 1][c];
        };
        out.t.push_back(t);
        out.u1.push_back(interp(0));
        out.u2.push_back(interp(2));
    }
    return out;
}

// Quadrature demodulation against the carrier with a boxcar low-pass whose
// first null sits at omega/20; edges inside one filter window are trimmed.
inline Demodulated extract_phase(const std::vector<double>& t,
                                 const std::vector<double>& u, double omega) {
    if (t.size() != u.size() || t.size() < 8)
        throw std::invalid_argument("extract_phase: bad trace");
    const double dt = t[1] - t[0];
    // window of 40 half-periods puts the filter null on the 2 omega image
    // and the cutoff near omega / 20
    const int p = std::max<int>(1, std::lround(std::numbers::pi / (omega * dt)));
    const int win = 40 * p;
    const int half = win / 2;
    const int n = static_cast<int>(t.size());
    if (win >= n)
        throw DemodulationError("extract_phase: trace shorter than the filter");

    std::vector<std::complex<double>> pre(n + 1, 0.0);
    for (int i = 0; i < n; ++i)
        pre[i + 1] = pre[i] + u[i] * std::complex<double>(std::cos(omega * t[i]),
                                                          -std::sin(omega * t[i]));
    // first boxcar pass
    std::vector<std::complex<double>> base;
    base.reserve(n - win + 1);
    for (int i = half; i - half + win < n; ++i)
        base.push_back((pre[i - half + win] - pre[i - half]) / double(win));
    // second pass squares the stopband, which matters when the carrier sits
    // slightly off omega and its double-frequency image misses the null
    const int nb = static_cast<int>(base.size());
    if (win >= nb)
        throw DemodulationError("extract_phase: trace shorter than the filter");
    std::vector<std::complex<double>> pre2(nb + 1, 0.0);
    for (int i = 0; i < nb; ++i) pre2[i + 1] = pre2[i] + base[i];
    Demodulated out;
    double prev = 0.0;
    double amp_acc = 0.0;
    for (int j = half; j - half + win < nb; ++j) {
        std::complex<double> z =
            (pre2[j - half + win] - pre2[j - half]) / double(win);
        const int i = half + j;
        double ph = std::arg(z);
        if (!out.t.empty()) {
            while (ph - prev > std::numbers::pi) ph -= 2.0 * std::numbers::pi;
            while (ph - prev < -std::numbers::pi) ph += 2.0 * std::numbers::pi;
        }
        prev = ph;
        out.t.push_back(t[i]);
        out.amplitude.push_back(std::abs(z));
        out.phase.push_back(ph);
        amp_acc += std::abs(z);
    }
    if (amp_acc / out.t.size() < 0.05)
        throw DemodulationError("extract_phase: carrier amplitude too small");
    return out;
}

// Slow phase difference phi = phi_2 - phi_1 on the common trimmed grid.
struct PhaseDifference {
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<double> ratio;  // R1 / R2
};

inline PhaseDifference phase_difference(const DuffingTraces& tr) {
    auto d1 = extract_phase(tr.t, tr.u1, tr.params.omega1);
    auto d2 = extract_phase(tr.t, tr.u2, tr.params.omega2);
    // align the two trimmed grids
    std::size_t o1 = 0, o2 = 0;
    if (d1.t.front() < d2.t.front())
        o1 = static_cast<std::size_t>(
            std::lround((d2.t.front() - d1.t.front()) / tr.dt));
    else
        o2 = static_cast<std::size_t>(
            std::lround((d1.t.front() - d2.t.front()) / tr.dt));
    PhaseDifference out;
    double prev = 0.0;
    for (std::size_t i = 0; o1 + i < d1.t.size() && o2 + i < d2.t.size(); ++i) {
        double phi = d2.phase[o2 + i] - d1.phase[o1 + i];
        if (!out.t.empty()) {
            while (phi - prev > std::numbers::pi)
                phi -= 2.0 * std::numbers::pi;
            while (phi - prev < -std::numbers::pi)
                phi += 2.0 * std::numbers::pi;
        }
        prev = phi;
        out.t.push_back(d1.t[o1 + i]);
        out.phi.push_back(phi);
        out.ratio.push_back(d1.amplitude[o1 + i] /
                            std::max(d2.amplitude[o2 + i], 1e-12));
    }
    return out;
}

// Reduced-model coefficients of the slow phase equation in unscaled time.
inline ReductionReport predicted_coefficients(const DuffingParams& dp) {
    ReductionReport rep;
    rep.kind = dp.kind;
    const double w1 = dp.omega1, w2 = dp.omega2;
    rep.d_pred = (w1 * dp.delta1 + w2 * dp.delta2 +
                  3.0 * (w2 * dp.a2 - w1 * dp.a1)) / 2.0;
    switch (dp.kind) {
        case CouplingKind::single:
            // oscillator 1 carries (1 - delta1), so its slow phase drifts at
            // (3 a1 - delta1) omega1 / 2 relative to the carrier
            rep.d_pred = w1 * (3.0 * dp.a1 - dp.delta1) / 2.0;
            break;
        case CouplingKind::static_linear:
        case CouplingKind::parametric: {
            // each oscillator's sin and cos terms carry its own coupling
            // phase; fold them into the plain (sin, cos) basis
            const double t1 =
                dp.kind == CouplingKind::parametric ? dp.theta1 : 0.0;
            const double t2 =
                dp.kind == CouplingKind::parametric ? dp.theta2 : 0.0;
            const double s1 = 1.5 * w1 * dp.a1 * dp.kappa1 / dp.gamma1;
            const double s2 = 1.5 * w2 * dp.a2 * dp.kappa2 / dp.gamma2;
            rep.s_pred = s1 * std::cos(t1) + s2 * std::cos(t2) +
                         0.5 * (w2 * dp.kappa2 * std::sin(t2) -
                                w1 * dp.kappa1 * std::sin(t1));
            rep.c_pred = -s1 * std::sin(t1) - s2 * std::sin(t2) +
                         0.5 * (w2 * dp.kappa2 * std::cos(t2) -
                                w1 * dp.kappa1 * std::cos(t1));
            break;
        }
        case CouplingKind::nonlinear_parametric:
            rep.s_pred = 0.5 * (3.0 * w2 * dp.a2 * dp.lambda2 / dp.gamma2 +
                                3.0 * w1 * dp.a1 * dp.lambda1 / dp.gamma1);
            rep.c_pred = 0.5 * (w2 * dp.lambda2 - w1 * dp.lambda1);
            break;
    }
    return rep;
}

// Simulates, extracts phi(t), and fits dphi/dt onto the reduced sinusoid
// form.  The fit window starts at t_skip to clear the amplitude ring-up.
// Several initial conditions may be pooled into one fit; a locked run covers
// only one relaxation branch, which leaves the cosine direction nearly
// collinear with the constant.
inline ReductionReport reduction_check(
    const DuffingParams& dp, const std::vector<std::array<double, 4>>& inits,
    double t_end, double t_skip, double dt_sample = 0.0) {
    if (inits.empty())
        throw std::invalid_argument("reduction_check: no initial conditions");
    if (dt_sample <= 0.0)
        dt_sample = 0.05 * 2.0 * std::numbers::pi /
                    std::max(dp.omega1, dp.omega2);
    auto rep = predicted_coefficients(dp);

    if (dp.kind == CouplingKind::single) {
        auto traces = simulate_duffing(dp, inits.front(), t_end, dt_sample);
        auto d = extract_phase(traces.t, traces.u1, dp.omega1);
        std::size_t i0 = 0;
        while (i0 < d.t.size() && d.t[i0] < t_skip) ++i0;
        if (d.t.size() - i0 < 16)
            throw std::invalid_argument("reduction_check: window too short");
        rep.d_fit = (d.phase.back() - d.phase[i0]) /
                    (d.t.back() - d.t[i0]);
        double res = 0.0;
        for (std::size_t i = i0; i < d.t.size(); ++i) {
            double pred = d.phase[i0] + rep.d_fit * (d.t[i] - d.t[i0]);
            res = std::max(res, std::abs(d.phase[i] - pred));
        }
        rep.residual_rel =
            res / ((d.t.back() - d.t[i0]) * dp.omega1);
        return rep;
    }

    const std::size_t hstep = 8;  // centered derivative over a few samples
    const bool overtone = dp.kind == CouplingKind::nonlinear_parametric;
    double m[3][3] = {};
    double b[3] = {};
    std::vector<double> dphi, s_basis, c_basis;
    for (const auto& init : inits) {
        auto traces = simulate_duffing(dp, init, t_end, dt_sample);
        auto pd = phase_difference(traces);
        std::size_t i0 = 0;
        while (i0 < pd.t.size() && pd.t[i0] < t_skip) ++i0;
        const std::size_t n = pd.t.size();
        if (n < i0 + 2 * hstep + 64)
            throw std::invalid_argument("reduction_check: window too short");

        std::vector<double> rates(n, 0.0);
        double peak_rate = 0.0;
        for (std::size_t i = i0 + hstep; i + hstep < n; ++i) {
            rates[i] = (pd.phi[i + hstep] - pd.phi[i - hstep]) /
                       (pd.t[i + hstep] - pd.t[i - hstep]);
            peak_rate = std::max(peak_rate, std::abs(rates[i]));
        }
        for (std::size_t i = i0 + hstep; i + hstep < n; ++i) {
            double rate = rates[i];
            // a locked tail pins every sample to one point of the sinusoid;
            // keep only the stretch that still moves
            if (std::abs(rate) < 0.03 * peak_rate) continue;
            double arg = overtone ? 2.0 * pd.phi[i] : pd.phi[i];
            double base[3] = {1.0, -std::sin(arg), -std::cos(arg)};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) m[r][c] += base[r] * base[c];
                b[r] += base[r] * rate;
            }
            dphi.push_back(rate);
            s_basis.push_back(base[1]);
            c_basis.push_back(base[2]);
            rep.amplitude_ratio_dev =
                std::max(rep.amplitude_ratio_dev, std::abs(pd.ratio[i] - 1.0));
        }
    }
    // solve the 3x3 normal equations by Cramer's rule
    auto det3 = [](double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    double det = det3(m);
    if (std::abs(det) < 1e-12)
        throw DemodulationError("reduction_check: degenerate phase coverage");
    double sol[3];
    for (int c = 0; c < 3; ++c) {
        double mc[3][3];
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) mc[r][k] = m[r][k];
        for (int r = 0; r < 3; ++r) mc[r][c] = b[r];
        sol[c] = det3(mc) / det;
    }
    rep.d_fit = sol[0];
    rep.s_fit = sol[1];
    rep.c_fit = sol[2];

    double ss = 0.0;
    for (std::size_t i = 0; i < dphi.size(); ++i) {
        double model = sol[0] + sol[1] * s_basis[i] + sol[2] * c_basis[i];
        ss += (dphi[i] - model) * (dphi[i] - model);
    }
    // normalized by the carrier so the misfit reflects the order in the
    // small-parameter expansion rather than the coupling strength
    rep.residual_rel =
        std::sqrt(ss / dphi.size()) / (0.5 * (dp.omega1 + dp.omega2));
    return rep;
}

}  // namespace phasepump
