#pragma once

// Non-adiabatic Floquet eigenproblem in Sambe space: real symmetric
// (k, q)-block matrix, shift-invert Lanczos around an adiabatic energy
// estimate, physical-representative selection, time-averaged winding
// numbers, PT checks, and superposition dynamics.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "phasepump/adiabatic.hpp"
#include "phasepump/classical.hpp"
#include "phasepump/hamiltonian.hpp"

namespace phasepump {

struct SambeBasis {
    int k_max;
    int q_max;
    int nk() const { return 2 * k_max + 1; }
    int nq() const { return 2 * q_max + 1; }
    int dim() const { return nk() * nq(); }
    int index(int k, int q) const {
        return (q + q_max) * nk() + (k + k_max);
    }
};

struct FloquetState {
    double epsilon;          // quasi-energy (unfolded)
    SambeBasis basis;
    Eigen::VectorXd comps;   // <k|chi,q>, real after phase fixing
    double mean_k2 = 0.0;
    double mean_q2 = 0.0;
    double residual = 0.0;   // ||A x - eps x||

    double edge_weight_k() const {
        double w = 0.0;
        for (int q = -basis.q_max; q <= basis.q_max; ++q) {
            w += comps(basis.index(-basis.k_max, q)) *
                 comps(basis.index(-basis.k_max, q));
            w += comps(basis.index(basis.k_max, q)) *
                 comps(basis.index(basis.k_max, q));
        }
        return w;
    }
    double edge_weight_q() const {
        double w = 0.0;
        for (int k = -basis.k_max; k <= basis.k_max; ++k) {
            w += comps(basis.index(k, -basis.q_max)) *
                 comps(basis.index(k, -basis.q_max));
            w += comps(basis.index(k, basis.q_max)) *
                 comps(basis.index(k, basis.q_max));
        }
        return w;
    }
};

struct PtCheckResult {
    Complex lambda;
    double residual;
};

struct EdgeLeakageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sambe matrix: diagonal k^2/(2 m_e) - q Omega,
// couplings (k,q)<->(k+1,q+1) of -mu r/2 (e^{i phi} pairs with e^{-i Omega t})
// and (k,q)<->(k+2,q) of -mu (1-r)/4.  All entries real.
inline Eigen::SparseMatrix<double> build_sambe_matrix(const ModelParams& p,
                                                      const SambeBasis& b) {
    p.validate(true);
    if (b.k_max < 2 || b.q_max < 1)
        throw std::invalid_argument("build_sambe_matrix: cutoffs too small");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * b.dim());
    const double c1 = -0.5 * p.mu * p.r;
    const double c2 = -0.25 * p.mu * (1.0 - p.r);
    for (int q = -b.q_max; q <= b.q_max; ++q) {
        for (int k = -b.k_max; k <= b.k_max; ++k) {
            int i = b.index(k, q);
            trip.emplace_back(i, i, k * k / (2.0 * p.m_e) - q * p.omega);
            if (k + 1 <= b.k_max && q + 1 <= b.q_max) {
                int j = b.index(k + 1, q + 1);
                trip.emplace_back(i, j, c1);
                trip.emplace_back(j, i, c1);
            }
            if (k + 2 <= b.k_max) {
                int j = b.index(k + 2, q);
                trip.emplace_back(i, j, c2);
                trip.emplace_back(j, i, c2);
            }
        }
    }
    Eigen::SparseMatrix<double> a(b.dim(), b.dim());
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

namespace detail {

// Shift-invert Lanczos with full reorthogonalization; returns converged
// Ritz pairs of A nearest to sigma.
inline void shift_invert_lanczos(const Eigen::SparseMatrix<double>& a,
                                 double sigma, int n_want, int max_iter,
                                 std::vector<double>& eigs,
                                 std::vector<Eigen::VectorXd>& vecs,
                                 std::vector<double>& residuals) {
    const int n = a.rows();
    Eigen::SparseMatrix<double> shifted = a;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
    shifted.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(shifted);
    if (lu.info() != Eigen::Success)
        throw EigensolveError("floquet: shift factorization failed");

    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    v.normalize();

    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    basis.push_back(v);
    Eigen::VectorXd w;
    const int m_cap = std::min(max_iter, n);
    for (int j = 0; j < m_cap; ++j) {
        w = lu.solve(basis[j]);
        if (!w.allFinite())
            throw EigensolveError("floquet: singular shift");
        double a_j = basis[j].dot(w);
        alpha.push_back(a_j);
        w -= a_j * basis[j];
        if (j > 0) w -= beta[j - 1] * basis[j - 1];
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) w -= u.dot(w) * u;
        double b_j = w.norm();
        if (b_j < 1e-13) break;
        beta.push_back(b_j);
        basis.push_back(w / b_j);
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m && i < static_cast<int>(beta.size())) {
            tri(i, i + 1) = beta[i];
            tri(i + 1, i) = beta[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);

    // largest |nu| of (A - sigma)^{-1} are the eigenvalues nearest sigma
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return std::abs(es.eigenvalues()(x)) > std::abs(es.eigenvalues()(y));
    });

    eigs.clear();
    vecs.clear();
    residuals.clear();
    for (int idx : order) {
        if (static_cast<int>(eigs.size()) >= n_want) break;
        double nu = es.eigenvalues()(idx);
        if (std::abs(nu) < 1e-12) continue;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < m; ++i) x += es.eigenvectors()(i, idx) * basis[i];
        x.normalize();
        double eps = sigma + 1.0 / nu;
        double res = (a * x - eps * x).norm();
        if (res > 1e-8) continue;  // unconverged Ritz pair
        eigs.push_back(eps);
        vecs.push_back(std::move(x));
        residuals.push_back(res);
    }
}

inline FloquetState make_state(const SambeBasis& b, double eps,
                               Eigen::VectorXd x, double res) {
    // global sign: largest-magnitude component positive
    int imax = 0;
    for (int i = 1; i < x.size(); ++i)
        if (std::abs(x(i)) > std::abs(x(imax))) imax = i;
    if (x(imax) < 0.0) x = -x;
    FloquetState st{eps, b, std::move(x), 0.0, 0.0, res};
    for (int q = -b.q_max; q <= b.q_max; ++q)
        for (int k = -b.k_max; k <= b.k_max; ++k) {
            double w = st.comps(b.index(k, q)) * st.comps(b.index(k, q));
            st.mean_k2 += k * k * w;
            st.mean_q2 += q * q * w;
        }
    return st;
}

}  // namespace detail

// Converged Floquet states nearest to quasi-energy sigma, ordered by |eps -
// sigma|.
inline std::vector<FloquetState> solve_floquet(const ModelParams& p,
                                               const SambeBasis& basis,
                                               double sigma, int n_states = 24,
                                               int max_iter = 400) {
    auto a = build_sambe_matrix(p, basis);
    std::vector<double> eigs, residuals;
    std::vector<Eigen::VectorXd> vecs;
    try {
        detail::shift_invert_lanczos(a, sigma, n_states, max_iter, eigs, vecs,
                                     residuals);
    } catch (const EigensolveError&) {
        // sigma hit an eigenvalue exactly; nudge by a fraction of the spacing
        sigma += 0.37 * std::max(std::abs(p.omega), 1e-8);
        detail::shift_invert_lanczos(a, sigma, n_states, max_iter, eigs, vecs,
                                     residuals);
    }
    std::vector<FloquetState> out;
    for (std::size_t i = 0; i < eigs.size(); ++i)
        out.push_back(detail::make_state(basis, eigs[i], std::move(vecs[i]),
                                         residuals[i]));
    std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
        return std::abs(x.epsilon - sigma) < std::abs(y.epsilon - sigma);
    });
    return out;
}

// Physical representative: among the replica family near sigma, the state
// minimizing <q^2>; ties broken by smaller |eps|.  Verifies k-edge
// suppression below 1e-8.
inline FloquetState select_representative(std::vector<FloquetState> states) {
    if (states.empty())
        throw EigensolveError("select_representative: no converged states");
    std::sort(states.begin(), states.end(), [](const auto& x, const auto& y) {
        if (std::abs(x.mean_q2 - y.mean_q2) > 1e-6)
            return x.mean_q2 < y.mean_q2;
        return std::abs(x.epsilon) < std::abs(y.epsilon);
    });
    const auto& best = states.front();
    if (best.edge_weight_k() > 1e-8)
        throw EdgeLeakageError("floquet representative leaks at |k| = k_max");
    return best;
}

// Cycle-averaged instantaneous energy of adiabatic level n; the shift
// estimate for the unfolded quasi-energy.
inline double adiabatic_mean_energy(const ModelParams& p, int level,
                                    int k_max, int n_theta = 64) {
    MomentumBasis basis{k_max};
    double acc = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        double th = two_pi * i / n_theta;
        acc += eigensolve(build_hamiltonian(p, th, basis), level + 1)
                   .energies(level);
    }
    return acc / n_theta;
}

// Representative of adiabatic level n, growing q_max until the q edge is
// suppressed below 1e-8.
inline FloquetState floquet_representative(const ModelParams& p, int k_max,
                                           int level = 0, int q_max_init = 64,
                                           int q_max_cap = 512) {
    double sigma = adiabatic_mean_energy(p, level, k_max);
    for (int q_max = q_max_init; q_max <= q_max_cap; q_max *= 2) {
        SambeBasis basis{k_max, q_max};
        auto states = solve_floquet(p, basis, sigma);
        auto rep = select_representative(std::move(states));
        if (rep.edge_weight_q() < 1e-8) return rep;
    }
    throw EdgeLeakageError("floquet representative leaks in q at the cap");
}

// chi = <v_phi> / Omega = sum_{k,q} (k/m_e) |<k|chi,q>|^2 / Omega
inline WindingResult floquet_winding(const FloquetState& st,
                                     const ModelParams& p) {
    const auto& b = st.basis;
    double v = 0.0;
    for (int q = -b.q_max; q <= b.q_max; ++q)
        for (int k = -b.k_max; k <= b.k_max; ++k)
            v += (k / p.m_e) * st.comps(b.index(k, q)) *
                 st.comps(b.index(k, q));
    return {v / p.omega, "floquet", 1, st.residual};
}

struct OmegaWindingRow {
    double omega;
    double chi;
    double epsilon0;
    double edge_k;
    double edge_q;
};

inline std::vector<OmegaWindingRow> winding_vs_omega(
    const ModelParams& base, const std::vector<double>& omega_list,
    int k_max = 24) {
    std::vector<OmegaWindingRow> rows;
    for (double om : omega_list) {
        ModelParams p = base;
        p.omega = om;
        auto rep = floquet_representative(p, k_max);
        rows.push_back({om, floquet_winding(rep, p).chi, rep.epsilon,
                        rep.edge_weight_k(), rep.edge_weight_q()});
    }
    return rows;
}

// PT in component space is complex conjugation; lambda is the unit-magnitude
// factor minimizing ||conj(x) - lambda x||.
inline PtCheckResult pt_check(const VectorXcd& comps) {
    Complex s = 0.0;
    for (int i = 0; i < comps.size(); ++i) s += comps(i) * comps(i);
    s = std::conj(s);
    Complex lambda = (std::abs(s) > 1e-300) ? s / std::abs(s) : Complex(1.0);
    double res = (comps.conjugate() - lambda * comps).norm() / comps.norm();
    return {lambda, res};
}

inline PtCheckResult pt_check(const FloquetState& st) {
    return pt_check(VectorXcd(st.comps.cast<Complex>()));
}

// cycle-averaged <H> (coupling blocks only, no -q Omega term); the replica
// identity gives <H> = eps + sum_q q Omega ||chi_q||^2.
inline double average_energy(const FloquetState& st, const ModelParams& p) {
    const auto& b = st.basis;
    double acc = 0.0;
    const double c1 = -0.5 * p.mu * p.r;
    const double c2 = -0.25 * p.mu * (1.0 - p.r);
    for (int q = -b.q_max; q <= b.q_max; ++q) {
        for (int k = -b.k_max; k <= b.k_max; ++k) {
            double x = st.comps(b.index(k, q));
            acc += x * x * k * k / (2.0 * p.m_e);
            if (k + 1 <= b.k_max && q + 1 <= b.q_max)
                acc += 2.0 * c1 * x * st.comps(b.index(k + 1, q + 1));
            if (k + 2 <= b.k_max)
                acc += 2.0 * c2 * x * st.comps(b.index(k + 2, q));
        }
    }
    return acc;
}

// chi_n(theta) in the momentum basis: sum_q e^{-i q theta} |chi_n, q>
inline VectorXcd chi_at_theta(const FloquetState& st, double theta) {
    const auto& b = st.basis;
    VectorXcd out = VectorXcd::Zero(b.nk());
    for (int q = -b.q_max; q <= b.q_max; ++q) {
        Complex ph(std::cos(q * theta), -std::sin(q * theta));
        for (int k = -b.k_max; k <= b.k_max; ++k)
            out(k + b.k_max) += ph * st.comps(b.index(k, q));
    }
    return out;
}

// Relative phase beta maximizing the initial localization of
// (chi_0(0) + e^{i beta} chi_1(0)) / sqrt(2), measured by the inverse
// participation ratio on a phi grid.
inline double localizing_relative_phase(const FloquetState& s0,
                                        const FloquetState& s1,
                                        int n_phi = 256, int n_beta = 256) {
    MomentumBasis mb{s0.basis.k_max};
    auto psi0 = wavefunction_on_grid(chi_at_theta(s0, 0.0), mb, n_phi);
    auto psi1 = wavefunction_on_grid(chi_at_theta(s1, 0.0), mb, n_phi);
    double best_beta = 0.0, best_ipr = -1.0;
    for (int i = 0; i < n_beta; ++i) {
        double beta = two_pi * i / n_beta;
        Complex ph(std::cos(beta), std::sin(beta));
        double ipr = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            double w = std::norm(psi0[j] + ph * psi1[j]) / 2.0;
            ipr += w * w;
        }
        if (ipr > best_ipr) {
            best_ipr = ipr;
            best_beta = beta;
        }
    }
    return best_beta;
}

// Expected phase evolution of a two-state superposition
// psi(t) = sum c_n e^{-i eps_n t} chi_n(Omega t) over one cycle.
inline PumpCurve superposition_trajectory(const FloquetState& s0,
                                          const FloquetState& s1, Complex c0,
                                          Complex c1, const ModelParams& p,
                                          int n_samples = 4096) {
    const double T = two_pi / std::abs(p.omega);
    const int nk = s0.basis.nk();
    const int k_max = s0.basis.k_max;
    PumpCurve curve;
    curve.theta.resize(n_samples + 1);
    curve.phase.resize(n_samples + 1);
    double acc = 0.0;
    double v_prev = 0.0;
    for (int i = 0; i <= n_samples; ++i) {
        double t = T * i / n_samples;
        double th = p.omega * t;
        VectorXcd psi = c0 * Complex(std::cos(s0.epsilon * t),
                                     -std::sin(s0.epsilon * t)) *
                            chi_at_theta(s0, th) +
                        c1 * Complex(std::cos(s1.epsilon * t),
                                     -std::sin(s1.epsilon * t)) *
                            chi_at_theta(s1, th);
        double nrm = psi.squaredNorm();
        double v = 0.0;
        for (int j = 0; j < nk; ++j)
            v += (j - k_max) / p.m_e * std::norm(psi(j));
        v /= nrm;
        if (i > 0) acc += 0.5 * (v_prev + v) * (T / n_samples);
        v_prev = v;
        curve.theta[i] = th;
        curve.phase[i] = acc;
    }
    curve.chi = acc / two_pi;
    return curve;
}

// Dominant oscillation frequency of the velocity along a pump curve,
// from zero crossings of the moving-average-detrended velocity.  The beat
// phase integrates the instantaneous gap, so crossing counting recovers the
// cycle-averaged splitting; `guess` only sets the detrend window.
inline double beat_frequency(const PumpCurve& curve, double omega,
                             double guess) {
    const double T = two_pi / std::abs(omega);
    const int n = static_cast<int>(curve.phase.size()) - 1;
    const double dt = T / n;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = (curve.phase[i + 1] - curve.phase[i]) / dt;
    const int win = std::max(1, static_cast<int>(3.0 * two_pi / guess / dt));
    int crossings = 0;
    bool prev_neg = false, have_prev = false;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        int cnt = 0;
        for (int j = std::max(0, i - win); j <= std::min(n - 1, i + win); ++j) {
            s += v[j];
            ++cnt;
        }
        bool neg = (v[i] - s / cnt) < 0.0;
        if (have_prev && neg != prev_neg) ++crossings;
        prev_neg = neg;
        have_prev = true;
    }
    return std::numbers::pi * crossings / T;
}

}  // namespace phasepump
