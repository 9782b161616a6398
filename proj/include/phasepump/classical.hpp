#pragma once

// Classical Adler dynamics: trajectory integration, fixed points, phase-slip
// classification, winding numbers, hysteresis and non-reciprocity.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasepump/model.hpp"
#include "phasepump/ode.hpp"

namespace phasepump {

enum class SweepDirection { forward, backward };
enum class Stability { attractive, repulsive };
enum class SlipDirection { positive, negative, marginal };

struct TrajectorySample {
    double t;
    double phi;    // unwrapped
    double theta;
};

struct SlipEvent {
    double theta;   // modulation time where the jump occurs
    double dphi;    // signed jump accumulated in the detection window
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    ModelParams params;
    SweepDirection direction = SweepDirection::forward;
    std::vector<SlipEvent> slips;
};

struct FixedPoint {
    double phi0;       // in [0, 2pi)
    double slope;      // df/dphi at the root
    Stability stability;
};

struct SaddleClassification {
    double t0;
    double phi0;
    double a;          // coefficient of (t - t0)(phi - phi0)^2
    SlipDirection slip_direction;
};

struct WindingResult {
    double chi;
    std::string method;
    int cycles_used = 0;
    double convergence_estimate = 0.0;
};

struct RootInIntervalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSaddleFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Fixed points

inline std::vector<FixedPoint> find_fixed_points(const ModelParams& p,
                                                 double theta,
                                                 int grid = 2048) {
    std::vector<FixedPoint> out;
    auto f = [&](double phi) { return force(p, phi, theta); };
    const double h = two_pi / grid;
    for (int i = 0; i < grid; ++i) {
        double x0 = i * h, x1 = (i + 1) * h;
        double f0 = f(x0), f1 = f(x1);
        double root;
        const double zero_tol = 1e-12 * (1.0 + p.mu + std::abs(p.delta));
        if (std::abs(f0) < zero_tol) {
            root = x0;
        } else if (f0 * f1 < 0.0) {
            // bisect then Newton-polish
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi), fm = f(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            root = 0.5 * (lo + hi);
            for (int it = 0; it < 8; ++it) {
                double fr = f(root), dfr = force_dphi(p, root, theta);
                if (dfr == 0.0) break;
                double step = fr / dfr;
                root -= step;
                if (std::abs(step) < 1e-15) break;
            }
            if (root < x0 || root >= x1 + 1e-12) root = 0.5 * (lo + hi);
        } else {
            continue;
        }
        double slope = force_dphi(p, root, theta);
        if (root < 0.0) root += two_pi;
        if (root >= two_pi) root -= two_pi;
        // skip duplicates from adjacent brackets
        bool dup = false;
        for (const auto& fp : out)
            if (std::abs(fp.phi0 - root) < 1e-9 ||
                std::abs(std::abs(fp.phi0 - root) - two_pi) < 1e-9)
                dup = true;
        if (dup) continue;
        out.push_back({root, slope,
                       slope < 0.0 ? Stability::attractive
                                   : Stability::repulsive});
    }
    return out;
}

// Attractive fixed point at theta = 0 with smallest phi >= 0; the default
// initial condition for trajectories and sweeps.
inline std::optional<double> initial_attractive_phi(const ModelParams& p) {
    auto fps = find_fixed_points(p, 0.0);
    std::optional<double> best;
    for (const auto& fp : fps)
        if (fp.stability == Stability::attractive)
            if (!best || fp.phi0 < *best) best = fp.phi0;
    return best;
}

// Attractive fixed point at theta = 0 sitting in the shallower well (highest
// potential value).  With finite detuning the tilt-disfavored well is the one
// whose forward/backward slips fail to retrace (the ratchet protocol).
inline std::optional<double> shallow_attractive_phi(const ModelParams& p) {
    auto fps = find_fixed_points(p, 0.0);
    std::optional<double> best;
    double vmax = -1e300;
    for (const auto& fp : fps) {
        if (fp.stability != Stability::attractive) continue;
        double v = potential(p, fp.phi0, 0.0);
        if (!best || v > vmax) {
            best = fp.phi0;
            vmax = v;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Trajectory integration

namespace detail {

inline void detect_slips(Trajectory& traj, double slip_dphi = 0.5,
                         double theta_window = 0.01) {
    traj.slips.clear();
    const auto& s = traj.samples;
    std::size_t lo = 0;
    double last_slip_theta = -1e300;
    for (std::size_t hi = 1; hi < s.size(); ++hi) {
        while (std::abs(s[hi].theta - s[lo].theta) > theta_window) ++lo;
        double dphi = s[hi].phi - s[lo].phi;
        if (std::abs(dphi) > slip_dphi) {
            double th = 0.5 * (s[lo].theta + s[hi].theta);
            if (std::abs(th - last_slip_theta) > 5.0 * theta_window) {
                traj.slips.push_back({th, dphi});
                last_slip_theta = th;
            } else {
                traj.slips.back().theta = th;
                traj.slips.back().dphi += dphi;
            }
            lo = hi;
        }
    }
}

}  // namespace detail

// Integrates dphi/dt = f(phi, omega*t) over [t0, t1].  Samples are recorded
// at accepted steps no closer than out_stride in t (0 records every step).
inline Trajectory integrate(const ModelParams& p, double phi_init, double t0,
                            double t1, double tol = 1e-9,
                            double out_stride = 0.0) {
    p.validate();
    Trajectory traj;
    traj.params = p;
    traj.direction =
        p.omega >= 0.0 ? SweepDirection::forward : SweepDirection::backward;

    OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    // keep steps below a fraction of the drive period so slips are resolved
    if (p.omega != 0.0) opt.h_max = 0.02 * two_pi / std::abs(p.omega);

    auto rhs = [&p](double t, const std::vector<double>& y,
                    std::vector<double>& dydt) {
        dydt[0] = force(p, y[0], p.omega * t);
    };
    double last_t = -1e300;
    auto obs = [&](double t, const std::vector<double>& y) {
        if (t - last_t >= out_stride || t == t1) {
            traj.samples.push_back({t, y[0], p.omega * t});
            last_t = t;
        }
    };
    auto yend = integrate_adaptive(rhs, {phi_init}, t0, t1, opt, obs);
    if (traj.samples.empty() || traj.samples.back().t != t1)
        traj.samples.push_back({t1, yend[0], p.omega * t1});
    detail::detect_slips(traj);
    return traj;
}

// ---------------------------------------------------------------------------
// Static time of flight, dphi/f quadrature with frozen theta

namespace detail {

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Time for the phase to move from phi_i to phi_f under the frozen-theta force.
inline double time_between(const ModelParams& p, double theta, double phi_i,
                           double phi_f, double tol = 1e-12) {
    if (phi_i == phi_f) return 0.0;
    const double lo = std::min(phi_i, phi_f), hi = std::max(phi_i, phi_f);
    // scan for roots of f inside [lo, hi]
    const int n = 512;
    const double root_tol = 1e-9;
    double prev = force(p, lo, theta);
    if (std::abs(prev) < root_tol)
        throw DivergenceError("time_between: endpoint at a root of the force");
    for (int i = 1; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        double fx = force(p, x, theta);
        if (i == n && std::abs(fx) < root_tol)
            throw DivergenceError(
                "time_between: endpoint at a root of the force");
        if (prev * fx < 0.0 || (i < n && std::abs(fx) < root_tol))
            throw RootInIntervalError(
                "time_between: force vanishes inside the interval");
        prev = fx;
    }
    auto g = [&](double phi) { return 1.0 / force(p, phi, theta); };
    double fa = g(phi_i), fb = g(phi_f), fm = g(0.5 * (phi_i + phi_f));
    double whole = (phi_f - phi_i) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson(g, phi_i, phi_f, fa, fm, fb, whole, tol,
                                    48);
}

// ---------------------------------------------------------------------------
// Saddle-node classification

// Field concept: f(phi,theta), f_phi, f_theta, f_phi2, f_phitheta.
struct ModelField {
    ModelParams p;
    double f(double phi, double th) const { return force(p, phi, th); }
    double f_phi(double phi, double th) const { return force_dphi(p, phi, th); }
    double f_theta(double phi, double th) const {
        return force_dtheta(p, phi, th);
    }
    double f_phi2(double phi, double th) const {
        return force_dphi2(p, phi, th);
    }
    double f_phitheta(double phi, double th) const {
        return force_dphi_dtheta(p, phi, th);
    }
};

// Finite-difference wrapper around an arbitrary f(phi, theta) callable.
template <typename F>
struct NumericField {
    F fn;
    double h = 1e-6;
    double f(double phi, double th) const { return fn(phi, th); }
    double f_phi(double phi, double th) const {
        return (fn(phi + h, th) - fn(phi - h, th)) / (2.0 * h);
    }
    double f_theta(double phi, double th) const {
        return (fn(phi, th + h) - fn(phi, th - h)) / (2.0 * h);
    }
    double f_phi2(double phi, double th) const {
        return (fn(phi + h, th) - 2.0 * fn(phi, th) + fn(phi - h, th)) /
               (h * h);
    }
    double f_phitheta(double phi, double th) const {
        return (fn(phi + h, th + h) - fn(phi + h, th - h) -
                fn(phi - h, th + h) + fn(phi - h, th - h)) /
               (4.0 * h * h);
    }
};

// Locates a simultaneous root of (f, df/dphi) near the guess by 2D Newton in
// (phi, theta), then fits f locally to a*(t - t0)*(phi - phi0)^2.
template <typename Field>
SaddleClassification classify_saddle_field(const Field& fld, double omega,
                                           PhasePoint guess,
                                           double search_radius = 1.5,
                                           double marginal_tol = 1e-6) {
    if (omega == 0.0)
        throw std::invalid_argument("classify_saddle: omega must be nonzero");
    double phi = guess.phi, th = guess.theta;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        double F0 = fld.f(phi, th);
        double F1 = fld.f_phi(phi, th);
        double j00 = fld.f_phi(phi, th), j01 = fld.f_theta(phi, th);
        double j10 = fld.f_phi2(phi, th), j11 = fld.f_phitheta(phi, th);
        double det = j00 * j11 - j01 * j10;
        if (std::abs(det) < 1e-14) break;
        double dphi = (F0 * j11 - F1 * j01) / det;
        double dth = (F1 * j00 - F0 * j10) / det;
        // damped step: keep the iterate inside the search box
        double norm = std::hypot(dphi, dth);
        if (norm > 0.5) { dphi *= 0.5 / norm; dth *= 0.5 / norm; }
        phi -= dphi;
        th -= dth;
        if (std::hypot(phi - guess.phi, th - guess.theta) > search_radius)
            throw NoSaddleFoundError("classify_saddle: left search radius");
        if (std::hypot(dphi, dth) < 1e-13) { converged = true; break; }
    }
    if (!converged || std::abs(fld.f(phi, th)) > 1e-9 ||
        std::abs(fld.f_phi(phi, th)) > 1e-9)
        throw NoSaddleFoundError("classify_saddle: Newton did not converge");

    // least-squares fit of f onto (t - t0)(phi - phi0)^2 on a local grid
    const double dphi_fit = 0.05;
    const double dth_fit = 0.02;
    double num = 0.0, den = 0.0;
    const int m = 8;
    for (int i = -m; i <= m; ++i) {
        for (int j = -m; j <= m; ++j) {
            if (j == 0) continue;
            double dp = dphi_fit * i / m;
            double dt_theta = dth_fit * j / m;
            double g = (dt_theta / omega) * dp * dp;
            double val = fld.f(phi + dp, th + dt_theta);
            num += val * g;
            den += g * g;
        }
    }
    double a = num / den;
    SlipDirection dir = SlipDirection::marginal;
    if (a > marginal_tol) dir = SlipDirection::positive;
    else if (a < -marginal_tol) dir = SlipDirection::negative;
    return {th / omega, phi, a, dir};
}

inline SaddleClassification classify_saddle(const ModelParams& p,
                                            PhasePoint guess,
                                            double search_radius = 1.5) {
    return classify_saddle_field(ModelField{p}, p.omega, guess, search_radius);
}

// Scans the (phi, theta) cell grid for saddle candidates of the model field
// over one modulation cycle and classifies each.
inline std::vector<SaddleClassification> find_saddles(const ModelParams& p,
                                                      int grid = 96) {
    std::vector<SaddleClassification> out;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            double phi = two_pi * (i + 0.5) / grid;
            double th = two_pi * (j + 0.5) / grid;
            double f0 = force(p, phi, th);
            double f1 = force_dphi(p, phi, th);
            if (std::abs(f0) > 0.15 || std::abs(f1) > 0.15) continue;
            try {
                auto sc = classify_saddle(p, {phi, th}, 0.6);
                double thc = std::fmod(sc.t0 * p.omega, two_pi);
                if (thc < 0.0) thc += two_pi;
                bool dup = false;
                for (auto& s : out) {
                    double ths = std::fmod(s.t0 * p.omega, two_pi);
                    if (ths < 0.0) ths += two_pi;
                    if (std::abs(ths - thc) < 1e-6 &&
                        std::abs(s.phi0 - sc.phi0) < 1e-6)
                        dup = true;
                }
                if (!dup) out.push_back(sc);
            } catch (const NoSaddleFoundError&) {
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Winding number and hysteresis

inline WindingResult winding(const ModelParams& p, int settle_cycles = 1,
                             int measure_cycles = 1, double tol = 1e-9) {
    if (p.omega == 0.0)
        throw std::invalid_argument("winding: omega must be nonzero");
    if (measure_cycles < 1)
        throw std::invalid_argument("winding: measure_cycles must be >= 1");
    auto phi0 = initial_attractive_phi(p);
    double phi = phi0 ? *phi0 : 0.0;

    OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    opt.h_max = 0.02 * two_pi / std::abs(p.omega);
    auto rhs = [&p](double t, const std::vector<double>& y,
                    std::vector<double>& dydt) {
        dydt[0] = force(p, y[0], p.omega * t);
    };

    const double T = two_pi / std::abs(p.omega);
    std::vector<double> cycle_phi;  // phi at each cycle boundary
    std::vector<double> y{phi};
    double t = 0.0;
    cycle_phi.push_back(y[0]);
    for (int c = 0; c < settle_cycles + measure_cycles; ++c) {
        y = integrate_adaptive(rhs, y, t, t + T, opt);
        t += T;
        cycle_phi.push_back(y[0]);
    }
    double phi_start = cycle_phi[settle_cycles];
    double phi_end = cycle_phi.back();
    double chi = (phi_end - phi_start) / (two_pi * measure_cycles);
    double conv = 0.0;
    if (measure_cycles >= 2) {
        double chi_prev = (cycle_phi[cycle_phi.size() - 2] - phi_start) /
                          (two_pi * (measure_cycles - 1));
        conv = std::abs(chi - chi_prev);
    } else {
        double chi_settle =
            (cycle_phi[settle_cycles] - cycle_phi[settle_cycles - 1 >= 0
                                                      ? settle_cycles - 1
                                                      : 0]) /
            two_pi;
        conv = std::abs(chi - chi_settle);
    }
    return {chi, "classical", measure_cycles, conv};
}

// Forward and backward one-cycle trajectories from the same initial attractive
// fixed point at theta = 0.
inline std::pair<Trajectory, Trajectory> hysteresis_pair(
    const ModelParams& p, double tol = 1e-9, int cycles = 1,
    std::optional<double> phi_init = std::nullopt) {
    ModelParams fwd = p;
    fwd.omega = std::abs(p.omega);
    ModelParams bwd = p;
    bwd.omega = -std::abs(p.omega);
    double phi;
    if (phi_init) {
        phi = *phi_init;
    } else {
        auto phi0 = initial_attractive_phi(p);
        phi = phi0 ? *phi0 : 0.0;
    }
    const double T = two_pi / std::abs(p.omega);
    auto tf = integrate(fwd, phi, 0.0, cycles * T, tol);
    auto tb = integrate(bwd, phi, 0.0, cycles * T, tol);
    return {std::move(tf), std::move(tb)};
}

}  // namespace phasepump
