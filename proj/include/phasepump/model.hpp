#pragma once

// Two-tone washboard potential and force field shared by the classical and
// quantum solvers.  All quantities are dimensionless; mu = 1 fixes the time
// unit in the classical model and hbar = 1 in the quantum one.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phasepump {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct ModelParams {
    double r = 0.5;      // two-tone mixing ratio in [0,1]
    double mu = 1.0;     // coupling scale
    double delta = 0.0;  // detuning
    double omega = 0.0;  // modulation angular frequency, sign = sweep direction
    double m_e = 1.0;    // phase-particle mass (quantum modules)

    double a1() const { return mu * r; }
    double a2() const { return mu * (1.0 - r) / 2.0; }

    void validate(bool quantum = false) const {
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("r out of [0,1]");
        if (mu <= 0.0) throw std::invalid_argument("mu must be positive");
        if (quantum && m_e <= 0.0)
            throw std::invalid_argument("m_e must be positive");
    }
};

struct PhasePoint {
    double phi = 0.0;    // unwrapped phase
    double theta = 0.0;  // normalized modulation time, theta = omega * t
};

// V(phi, theta) = -phi*Delta - A1*cos(phi - theta) - A2*cos(2*phi)
inline double potential(const ModelParams& p, double phi, double theta) {
    return -phi * p.delta - p.a1() * std::cos(phi - theta)
           - p.a2() * std::cos(2.0 * phi);
}

// f = -dV/dphi = Delta - A1*sin(phi - theta) - 2*A2*sin(2*phi)
inline double force(const ModelParams& p, double phi, double theta) {
    return p.delta - p.a1() * std::sin(phi - theta)
           - 2.0 * p.a2() * std::sin(2.0 * phi);
}

// df/dphi
inline double force_dphi(const ModelParams& p, double phi, double theta) {
    return -p.a1() * std::cos(phi - theta)
           - 4.0 * p.a2() * std::cos(2.0 * phi);
}

// df/dtheta
inline double force_dtheta(const ModelParams& p, double phi, double theta) {
    return p.a1() * std::cos(phi - theta);
}

// d2f/dphi2
inline double force_dphi2(const ModelParams& p, double phi, double theta) {
    return p.a1() * std::sin(phi - theta)
           + 8.0 * p.a2() * std::sin(2.0 * phi);
}

// d2f/(dphi dtheta)
inline double force_dphi_dtheta(const ModelParams& p, double phi, double theta) {
    return p.a1() * std::sin(phi - theta);
}

}  // namespace phasepump
