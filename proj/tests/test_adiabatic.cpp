#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phasepump/adiabatic.hpp"

using namespace phasepump;

static ModelParams quantum_params(double m_e, double r) {
    return ModelParams{.r = r, .mu = 1.0, .delta = 0.0,
                       .omega = two_pi * 2e-4, .m_e = m_e};
}

TEST_CASE("velocity vanishes for a static drive") {
    auto p = quantum_params(10.0, 0.55);
    p.omega = 0.0;
    AdiabaticConfig cfg{.k_max = 24};
    CHECK(instantaneous_velocity(p, 1.0, cfg) == 0.0);
}

TEST_CASE("finite-difference and matrix-element routes agree") {
    auto p = quantum_params(10.0, 0.55);
    AdiabaticConfig cfg{.theta_grid = 4096, .k_max = 24};
    for (double th : {0.3, 1.7, 3.9, 5.2}) {
        double v_fd = instantaneous_velocity(p, th, cfg);
        double v_me = instantaneous_velocity_matrix_element(p, th, cfg);
        CHECK(std::abs(v_fd - v_me) < 1e-6 * std::max(1.0, std::abs(v_me)));
    }
}

TEST_CASE("velocity is antisymmetric under drive reversal") {
    auto p = quantum_params(5.0, 0.55);
    AdiabaticConfig cfg{.k_max = 24};
    auto pm = p;
    pm.omega = -p.omega;
    for (double th : {0.8, 2.9}) {
        CHECK(instantaneous_velocity(p, th, cfg) ==
              doctest::Approx(-instantaneous_velocity(pm, th, cfg))
                  .epsilon(1e-10));
    }
}

TEST_CASE("gauge robustness of the aligned finite difference") {
    auto p = quantum_params(10.0, 0.55);
    MomentumBasis basis{24};
    const double d = two_pi / 2048;
    double th = 2.0;
    auto dec = eigensolve(build_hamiltonian(p, th, basis), 13, th);
    auto decm = eigensolve(build_hamiltonian(p, th - d, basis), 1);
    auto decp = eigensolve(build_hamiltonian(p, th + d, basis), 1);
    double v0 = detail::velocity_from_triplet(p, dec, decm.vectors.col(0),
                                              decp.vectors.col(0), d, 12);
    VectorXcd prev = decm.vectors.col(0) * Complex(std::cos(1.1),
                                                   std::sin(1.1));
    VectorXcd next = decp.vectors.col(0) * Complex(std::cos(-2.3),
                                                   std::sin(-2.3));
    double v1 = detail::velocity_from_triplet(p, dec, prev, next, d, 12);
    CHECK(std::abs(v0 - v1) < 1e-10);
}

TEST_CASE("pump winding numbers at the reference masses") {
    AdiabaticConfig cfg{.k_max = 40};
    auto c10 = pump_curve(quantum_params(10.0, 0.55), cfg);
    CHECK(c10.chi == doctest::Approx(1.00).epsilon(0.02));
    auto c1 = pump_curve(quantum_params(1.0, 0.55), cfg);
    CHECK(c1.chi == doctest::Approx(0.76).epsilon(0.03 / 0.76));
}

TEST_CASE("chi varies smoothly with r at m_e=1") {
    AdiabaticConfig cfg{.theta_grid = 1024, .k_max = 24};
    double prev = -1.0;
    for (double r : {0.50, 0.51, 0.52, 0.55, 0.58, 0.60}) {
        double chi = pump_curve(quantum_params(1.0, r), cfg).chi;
        if (prev >= 0.0) CHECK(std::abs(chi - prev) < 0.2);
        prev = chi;
    }
}

TEST_CASE("sum and grid convergence") {
    auto p = quantum_params(5.0, 0.55);
    AdiabaticConfig base{.n_excited = 12, .theta_grid = 2048, .k_max = 24};
    double chi = pump_curve(p, base).chi;
    AdiabaticConfig more_states = base;
    more_states.n_excited = 24;
    CHECK(std::abs(pump_curve(p, more_states).chi - chi) < 1e-3);
    AdiabaticConfig finer = base;
    finer.theta_grid = 4096;
    CHECK(std::abs(pump_curve(p, finer).chi - chi) < 1e-3);
}

TEST_CASE("heavy-mass limits of the adiabatic winding") {
    AdiabaticConfig cfg{.theta_grid = 1024, .k_max = 32};
    // above r_c the heavy-mass curve approaches the classical value 1
    CHECK(std::abs(pump_curve(quantum_params(10.0, 0.7), cfg).chi - 1.0) <
          0.05);
    // below r_c the adiabatic approximation assumes perfect tunneling, so
    // the winding stays near unity instead of dropping to the classical 0
    CHECK(pump_curve(quantum_params(10.0, 0.3), cfg).chi > 0.9);
}

TEST_CASE("amplitude maps: localization and flat limit") {
    MomentumBasis basis{24};
    auto loc = amplitude_map(quantum_params(10.0, 0.55), basis, 32, 128);
    double peak = 0.0, mean = 0.0;
    for (const auto& row : loc)
        for (double v : row) {
            peak = std::max(peak, v);
            mean += v / (32.0 * 128.0);
        }
    CHECK(peak > 2.5 * mean);

    auto spread = amplitude_map(quantum_params(1.0, 0.55), basis, 8, 128);
    // near theta = 3 pi / 2 the amplitude extends over the whole phase space
    const auto& row = spread[6];  // theta = 2 pi * 6/8 = 3 pi /2
    double rmin = 1e300, rmax = 0.0;
    for (double v : row) {
        rmin = std::min(rmin, v);
        rmax = std::max(rmax, v);
    }
    CHECK(rmin > 0.05 * rmax);

    auto pm = quantum_params(1.0, 0.5);
    pm.mu = 1e-300;
    auto flat = amplitude_map(pm, basis, 4, 128);
    for (const auto& r : flat)
        for (double v : r)
            CHECK(v == doctest::Approx(1.0 / std::sqrt(two_pi)).epsilon(1e-8));
}

TEST_CASE("gap collapse raises instead of regularizing") {
    // r = 0: two exactly degenerate wells, the ground doublet splits only
    // by tunneling; heavy mass drives the gap below threshold
    auto p = quantum_params(200.0, 0.0);
    AdiabaticConfig cfg{.k_max = 40};
    CHECK_THROWS_AS(instantaneous_velocity(p, 1.0, cfg), GapCollapseError);
}
