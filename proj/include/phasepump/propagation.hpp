#pragma once

// Direct time-dependent Schrodinger propagation in the momentum basis with
// a midpoint-Hamiltonian Crank-Nicolson step.  The update matrix is
// pentadiagonal, so each step is a banded solve.

#include <stdexcept>
#include <vector>

#include "phasepump/hamiltonian.hpp"

namespace phasepump {

struct PropagationResult {
    std::vector<double> times;
    std::vector<VectorXcd> states;
    std::vector<double> norms;
    std::vector<double> phase;  // cumulative integral of <v> dt
    double final_phase = 0.0;
};

struct NormDriftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// in-place solve of a pentadiagonal system given its five diagonals; the
// Crank-Nicolson matrix is diagonally dominant, so no pivoting
inline void solve_penta(std::vector<Complex>& d2l, std::vector<Complex>& d1l,
                        std::vector<Complex>& d0, std::vector<Complex>& d1u,
                        std::vector<Complex>& d2u, VectorXcd& rhs) {
    const int n = static_cast<int>(d0.size());
    for (int i = 0; i + 1 < n; ++i) {
        Complex m1 = d1l[i] / d0[i];
        d0[i + 1] -= m1 * d1u[i];
        if (i + 2 < n) d1u[i + 1] -= m1 * d2u[i];
        rhs(i + 1) -= m1 * rhs(i);
        if (i + 2 < n) {
            Complex m2 = d2l[i] / d0[i];
            d1l[i + 1] -= m2 * d1u[i];
            d0[i + 2] -= m2 * d2u[i];
            rhs(i + 2) -= m2 * rhs(i);
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        Complex s = rhs(i);
        if (i + 1 < n) s -= d1u[i] * rhs(i + 1);
        if (i + 2 < n) s -= d2u[i] * rhs(i + 2);
        rhs(i) = s / d0[i];
    }
}

}  // namespace detail

// Crank-Nicolson propagation from t_start to t_end with fixed step dt
// (negative dt runs backward).  States are stored every store_stride steps;
// 0 picks a stride keeping about a thousand samples.
inline PropagationResult propagate(const ModelParams& p, const VectorXcd& psi0,
                                   double t_start, double t_end, double dt,
                                   int store_stride = 0) {
    p.validate(true);
    const int n = static_cast<int>(psi0.size());
    if (n < 5 || n % 2 == 0)
        throw std::invalid_argument("propagate: psi0 must span a momentum basis");
    const int k_max = (n - 1) / 2;
    if (dt == 0.0 || (t_end - t_start) * dt <= 0.0)
        throw std::invalid_argument("propagate: dt sign must match the span");
    if (std::abs(dt) * k_max * k_max / (2.0 * p.m_e) >= 0.1)
        throw StepResolutionError("propagate: dt too large for k_max");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("propagate: psi0 must be normalized");

    const long n_steps = std::lround((t_end - t_start) / dt);
    if (store_stride <= 0)
        store_stride = std::max<long>(1, n_steps / 1024);

    const double c2 = -0.25 * p.mu * (1.0 - p.r);
    auto velocity = [&](const VectorXcd& psi) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += (i - k_max) / p.m_e * std::norm(psi(i));
        return v;
    };

    PropagationResult out;
    VectorXcd psi = psi0;
    double acc = 0.0;
    double v_prev = velocity(psi);
    out.times.push_back(t_start);
    out.states.push_back(psi);
    out.norms.push_back(psi.norm());
    out.phase.push_back(0.0);

    std::vector<Complex> d2l(n), d1l(n), d0(n), d1u(n), d2u(n);
    VectorXcd rhs(n);
    for (long s = 0; s < n_steps; ++s) {
        const double t = t_start + s * dt;
        const double theta_mid = p.omega * (t + 0.5 * dt);
        const Complex c1 = -0.5 * p.mu * p.r *
                           Complex(std::cos(theta_mid), -std::sin(theta_mid));
        const Complex ia(0.0, 0.5 * dt);

        // rhs = (I - i dt/2 H) psi
        for (int i = 0; i < n; ++i) {
            double k = i - k_max;
            Complex h = k * k / (2.0 * p.m_e) * psi(i);
            if (i >= 1) h += c1 * psi(i - 1);
            if (i + 1 < n) h += std::conj(c1) * psi(i + 1);
            if (i >= 2) h += c2 * psi(i - 2);
            if (i + 2 < n) h += c2 * psi(i + 2);
            rhs(i) = psi(i) - ia * h;
        }
        for (int i = 0; i < n; ++i) {
            double k = i - k_max;
            d0[i] = 1.0 + ia * (k * k / (2.0 * p.m_e));
            d1l[i] = ia * c1;
            d1u[i] = ia * std::conj(c1);
            d2l[i] = ia * c2;
            d2u[i] = ia * c2;
        }
        detail::solve_penta(d2l, d1l, d0, d1u, d2u, rhs);
        psi = rhs;

        double nrm = psi.norm();
        if (std::abs(nrm - 1.0) > 1e-8)
            throw NormDriftError("propagate: norm drift exceeded 1e-8");
        double v = velocity(psi);
        acc += 0.5 * (v_prev + v) * dt;
        v_prev = v;
        if ((s + 1) % store_stride == 0 || s + 1 == n_steps) {
            out.times.push_back(t + dt);
            out.states.push_back(psi);
            out.norms.push_back(nrm);
            out.phase.push_back(acc);
        }
    }
    out.final_phase = acc;
    return out;
}

inline double fidelity(const VectorXcd& a, const VectorXcd& b) {
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace phasepump
