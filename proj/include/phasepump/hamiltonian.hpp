#pragma once

// Phase-particle Hamiltonian in the truncated momentum basis |k>,
// k in {-k_max..k_max}, with instantaneous eigen-decompositions and
// phi-grid wave functions.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "phasepump/model.hpp"

namespace phasepump {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;

struct MomentumBasis {
    int k_max;
    int dim() const { return 2 * k_max + 1; }
    int index(int k) const { return k + k_max; }  // k in [-k_max, k_max]
    int k_of(int idx) const { return idx - k_max; }
};

struct HamiltonianMatrix {
    MomentumBasis basis;
    MatrixXcd entries;
};

struct EigenDecomposition {
    VectorXd energies;    // ascending
    MatrixXcd vectors;    // orthonormal columns in |k> basis
    double theta = 0.0;
};

// H = p^2/(2 m_e) - mu [ r cos(phi - theta) + (1-r)/2 cos(2 phi) ];
// cos(phi - theta) contributes -(mu r/2) e^{-i theta} on <k+1|H|k>.
inline HamiltonianMatrix build_hamiltonian(const ModelParams& p, double theta,
                                           const MomentumBasis& basis) {
    p.validate(true);
    if (basis.k_max < 2)
        throw std::invalid_argument("build_hamiltonian: k_max must be >= 2");
    const int n = basis.dim();
    MatrixXcd h = MatrixXcd::Zero(n, n);
    const Complex c1 = -0.5 * p.mu * p.r *
                       Complex(std::cos(theta), -std::sin(theta));
    const double c2 = -0.25 * p.mu * (1.0 - p.r);
    for (int i = 0; i < n; ++i) {
        double k = basis.k_of(i);
        h(i, i) = k * k / (2.0 * p.m_e);
        if (i + 1 < n) {
            h(i + 1, i) = c1;
            h(i, i + 1) = std::conj(c1);
        }
        if (i + 2 < n) {
            h(i + 2, i) = c2;
            h(i, i + 2) = c2;
        }
    }
    return {basis, std::move(h)};
}

// Raising operator e^{i phi}: |k> -> |k+1> (truncated).
inline MatrixXcd raise_matrix(const MomentumBasis& basis) {
    const int n = basis.dim();
    MatrixXcd s = MatrixXcd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) s(i + 1, i) = 1.0;
    return s;
}

// v = p/m_e, diagonal k/m_e in the momentum basis.
inline MatrixXcd velocity_matrix(const ModelParams& p,
                                 const MomentumBasis& basis) {
    if (p.m_e <= 0.0)
        throw std::invalid_argument("velocity_matrix: m_e must be positive");
    const int n = basis.dim();
    MatrixXcd v = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = basis.k_of(i) / p.m_e;
    return v;
}

// Independent construction via the commutator form
// (1/2)[e^{-i phi} H e^{i phi} - e^{i phi} H e^{-i phi}]; agrees with the
// diagonal k/m_e on rows |k| <= k_max - 2.
inline MatrixXcd velocity_matrix_commutator(const HamiltonianMatrix& hm) {
    MatrixXcd s = raise_matrix(hm.basis);
    MatrixXcd sd = s.adjoint();
    return 0.5 * (sd * hm.entries * s - s * hm.entries * sd);
}

struct EigensolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lowest n_states eigenpairs, ascending, with the global phase of each vector
// fixed so its largest-magnitude component is real positive.  Degenerate
// pairs (mu = 0) are ordered with +k first.
inline EigenDecomposition eigensolve(const HamiltonianMatrix& hm, int n_states,
                                     double theta = 0.0) {
    const int n = hm.basis.dim();
    if (n_states > n)
        throw std::invalid_argument("eigensolve: n_states exceeds dimension");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(hm.entries);
    if (solver.info() != Eigen::Success)
        throw EigensolveError("eigensolve: solver did not converge");

    EigenDecomposition out;
    out.theta = theta;
    out.energies = solver.eigenvalues().head(n_states);
    out.vectors = solver.eigenvectors().leftCols(n_states);

    // deterministic order inside degenerate blocks: descending <k>
    for (int i = 0; i + 1 < n_states; ++i) {
        if (out.energies(i + 1) - out.energies(i) < 1e-12) {
            auto mean_k = [&](int col) {
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    s += hm.basis.k_of(j) * std::norm(out.vectors(j, col));
                return s;
            };
            if (mean_k(i) < mean_k(i + 1)) {
                out.vectors.col(i).swap(out.vectors.col(i + 1));
                std::swap(out.energies(i), out.energies(i + 1));
            }
        }
    }
    // phase fixing
    for (int c = 0; c < n_states; ++c) {
        int imax = 0;
        double amax = 0.0;
        for (int j = 0; j < n; ++j) {
            double a = std::abs(out.vectors(j, c));
            if (a > amax) { amax = a; imax = j; }
        }
        Complex z = out.vectors(imax, c);
        out.vectors.col(c) *= std::conj(z) / std::abs(z);
    }
    return out;
}

// psi(phi_j) = (2 pi)^{-1/2} sum_k e^{i k phi_j} <k|psi> on a uniform grid
// over [0, 2 pi); discrete norm (2 pi / N) sum |psi|^2 equals the vector norm.
inline std::vector<Complex> wavefunction_on_grid(const VectorXcd& vec,
                                                 const MomentumBasis& basis,
                                                 int grid_size) {
    if (grid_size < 4 * basis.k_max)
        throw std::invalid_argument(
            "wavefunction_on_grid: grid_size below Nyquist margin");
    std::vector<Complex> psi(grid_size);
    const double norm = 1.0 / std::sqrt(two_pi);
    for (int j = 0; j < grid_size; ++j) {
        double phi = two_pi * j / grid_size;
        Complex s = 0.0;
        for (int i = 0; i < basis.dim(); ++i)
            s += vec(i) * Complex(std::cos(basis.k_of(i) * phi),
                                  std::sin(basis.k_of(i) * phi));
        psi[j] = norm * s;
    }
    return psi;
}

}  // namespace phasepump
