#pragma once

// First-order adiabatic perturbation theory of the quantum pump: velocity
// expectation of the corrected ground state, per-cycle phase curves and
// winding numbers, and |psi|(phi, theta) amplitude maps.

#include <stdexcept>
#include <vector>

#include "phasepump/hamiltonian.hpp"

namespace phasepump {

struct AdiabaticConfig {
    int n_excited = 12;     // excited states kept in the perturbative sum
    int theta_grid = 2048;  // theta samples per cycle
    double dtheta_fd = 0.0; // 0 = 2 pi / theta_grid
    int k_max = 40;

    double fd_step() const {
        return dtheta_fd > 0.0 ? dtheta_fd : two_pi / theta_grid;
    }
    void validate() const {
        if (n_excited < 1)
            throw std::invalid_argument("n_excited must be >= 1");
        if (theta_grid < 256)
            throw std::invalid_argument("theta_grid must be >= 256");
    }
};

struct PumpCurve {
    std::vector<double> theta;
    std::vector<double> phase;  // cumulative integral of <v> dt
    double chi = 0.0;
};

struct GapCollapseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// align the global phase of `vec` so that <ref|vec> is real positive
inline void align_phase(const VectorXcd& ref, VectorXcd& vec) {
    Complex ov = ref.dot(vec);
    double a = std::abs(ov);
    if (a > 1e-14) vec *= std::conj(ov) / a;
}

// velocity from ground-state eigenvectors at theta - d, theta, theta + d
inline double velocity_from_triplet(const ModelParams& p,
                                    const EigenDecomposition& dec,
                                    VectorXcd prev, VectorXcd next,
                                    double fd_step, int n_excited) {
    const double gap = dec.energies(1) - dec.energies(0);
    if (gap < 1e-9)
        throw GapCollapseError("adiabatic velocity: spectral gap collapsed");
    align_phase(dec.vectors.col(0), prev);
    align_phase(dec.vectors.col(0), next);
    VectorXcd dpsi_dt = (next - prev) * (p.omega / (2.0 * fd_step));

    const int n = dec.vectors.rows();
    const int k_max = (n - 1) / 2;
    Complex acc = 0.0;
    for (int m = 1; m <= n_excited; ++m) {
        Complex p0m = 0.0;  // <phi_0| p_phi |phi_m>
        for (int j = 0; j < n; ++j)
            p0m += std::conj(dec.vectors(j, 0)) * double(j - k_max) *
                   dec.vectors(j, m);
        Complex mdt = dec.vectors.col(m).dot(dpsi_dt);
        acc += p0m * mdt / (dec.energies(0) - dec.energies(m));
    }
    // -(i/m_e) * sum + h.c. = 2 Im(sum) / m_e
    return 2.0 * acc.imag() / p.m_e;
}

// analytic dH/dtheta (only the cos(phi - theta) band depends on theta)
inline MatrixXcd hamiltonian_dtheta(const ModelParams& p, double theta,
                                    const MomentumBasis& basis) {
    const int n = basis.dim();
    MatrixXcd dh = MatrixXcd::Zero(n, n);
    const Complex c1 = Complex(0.0, 0.5 * p.mu * p.r) *
                       Complex(std::cos(theta), -std::sin(theta));
    for (int i = 0; i + 1 < n; ++i) {
        dh(i + 1, i) = c1;
        dh(i, i + 1) = std::conj(c1);
    }
    return dh;
}

}  // namespace detail

// Adiabatic phase velocity with d|phi_0>/dt from central eigenvector
// differences.
inline double instantaneous_velocity(const ModelParams& p, double theta,
                                     const AdiabaticConfig& cfg) {
    cfg.validate();
    if (p.omega == 0.0) return 0.0;
    MomentumBasis basis{cfg.k_max};
    const double d = cfg.fd_step();
    auto dec = eigensolve(build_hamiltonian(p, theta, basis),
                          cfg.n_excited + 1, theta);
    auto decm = eigensolve(build_hamiltonian(p, theta - d, basis), 1);
    auto decp = eigensolve(build_hamiltonian(p, theta + d, basis), 1);
    return detail::velocity_from_triplet(p, dec, decm.vectors.col(0),
                                         decp.vectors.col(0), d,
                                         cfg.n_excited);
}

// Same quantity via <phi_m|dH/dt|phi_0>/(E_0 - E_m); the gauge-free route
// used to cross-check the finite-difference one.
inline double instantaneous_velocity_matrix_element(const ModelParams& p,
                                                    double theta,
                                                    const AdiabaticConfig& cfg) {
    cfg.validate();
    if (p.omega == 0.0) return 0.0;
    MomentumBasis basis{cfg.k_max};
    auto dec = eigensolve(build_hamiltonian(p, theta, basis),
                          cfg.n_excited + 1, theta);
    const double gap = dec.energies(1) - dec.energies(0);
    if (gap < 1e-9)
        throw GapCollapseError("adiabatic velocity: spectral gap collapsed");
    MatrixXcd dh = detail::hamiltonian_dtheta(p, theta, basis) * p.omega;
    const int n = basis.dim();
    Complex acc = 0.0;
    for (int m = 1; m <= cfg.n_excited; ++m) {
        Complex p0m = 0.0;
        for (int j = 0; j < n; ++j)
            p0m += std::conj(dec.vectors(j, 0)) * double(j - cfg.k_max) *
                   dec.vectors(j, m);
        Complex mdt = dec.vectors.col(m).dot(dh * dec.vectors.col(0)) /
                      (dec.energies(0) - dec.energies(m));
        acc += p0m * mdt / (dec.energies(0) - dec.energies(m));
    }
    return 2.0 * acc.imag() / p.m_e;
}

// Trapezoid integration of the adiabatic velocity over one cycle.  Eigensolves
// are shared between neighboring theta samples (the finite-difference step
// equals the grid spacing).
inline PumpCurve pump_curve(const ModelParams& p, const AdiabaticConfig& cfg) {
    cfg.validate();
    MomentumBasis basis{cfg.k_max};
    const int ng = cfg.theta_grid;
    const double d = two_pi / ng;

    std::vector<EigenDecomposition> decs(ng);
    for (int i = 0; i < ng; ++i)
        decs[i] = eigensolve(build_hamiltonian(p, i * d, basis),
                             cfg.n_excited + 1, i * d);

    std::vector<double> v(ng + 1);
    for (int i = 0; i <= ng; ++i) {
        const auto& dec = decs[i % ng];
        const auto& prev = decs[((i - 1) % ng + ng) % ng];
        const auto& next = decs[(i + 1) % ng];
        v[i] = detail::velocity_from_triplet(p, dec, prev.vectors.col(0),
                                             next.vectors.col(0), d,
                                             cfg.n_excited);
    }

    PumpCurve curve;
    curve.theta.resize(ng + 1);
    curve.phase.resize(ng + 1);
    const double dt = (p.omega != 0.0) ? d / p.omega : 0.0;
    double acc = 0.0;
    curve.theta[0] = 0.0;
    curve.phase[0] = 0.0;
    for (int i = 1; i <= ng; ++i) {
        acc += 0.5 * (v[i - 1] + v[i]) * dt;
        curve.theta[i] = i * d;
        curve.phase[i] = acc;
    }
    curve.chi = acc / two_pi;
    return curve;
}

// |psi_0|(phi, theta) on an (n_theta x n_phi) grid, each column normalized
// like wavefunction_on_grid.
inline std::vector<std::vector<double>> amplitude_map(const ModelParams& p,
                                                      const MomentumBasis& basis,
                                                      int n_theta, int n_phi) {
    std::vector<std::vector<double>> map(n_theta,
                                         std::vector<double>(n_phi));
    for (int i = 0; i < n_theta; ++i) {
        double theta = two_pi * i / n_theta;
        auto dec = eigensolve(build_hamiltonian(p, theta, basis), 1, theta);
        auto psi = wavefunction_on_grid(dec.vectors.col(0), basis, n_phi);
        for (int j = 0; j < n_phi; ++j) map[i][j] = std::abs(psi[j]);
    }
    return map;
}

}  // namespace phasepump
