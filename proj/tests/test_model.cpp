#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phasepump/model.hpp"

using namespace phasepump;

TEST_CASE("derived two-tone amplitudes") {
    ModelParams p{.r = 0.3, .mu = 2.0};
    CHECK(p.a1() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(p.a2() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_THROWS_AS((ModelParams{.r = 1.5}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{.mu = -1.0}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{.m_e = 0.0}).validate(true),
                    std::invalid_argument);
}

TEST_CASE("potential values") {
    CHECK(potential(ModelParams{.r = 1.0}, 0.0, 0.0) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(potential(ModelParams{.r = 0.0}, M_PI / 2, 1.7) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(potential(ModelParams{.r = 0.5}, M_PI / 4, M_PI / 4) ==
          doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("force values") {
    ModelParams adler{.r = 1.0};
    CHECK(force(adler, 0.7, 0.7) == doctest::Approx(0.0).epsilon(1e-14));
    // Arnold-tongue root of the conventional Adler form
    ModelParams p{.r = 1.0, .delta = 0.5};
    double phi_star = std::asin(0.5);
    CHECK(force(p, phi_star, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(force_dphi(p, phi_star, 0.0) < 0.0);
}

TEST_CASE("force_dphi values") {
    CHECK(force_dphi(ModelParams{.r = 1.0}, 1.2, 1.2) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(force_dphi(ModelParams{.r = 0.0}, M_PI / 2, 0.0) ==
          doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gradient consistency on a 64x64 grid") {
    // finite-difference oracle: f = -dV/dphi, f' = df/dphi
    ModelParams ps[] = {{.r = 0.3, .mu = 1.0, .delta = 0.1},
                        {.r = 0.8, .mu = 1.5, .delta = -0.2},
                        {.r = 0.51, .mu = 1.0, .delta = 0.0}};
    const double h = 1e-6;
    for (const auto& p : ps) {
        for (int i = 0; i < 64; ++i) {
            for (int j = 0; j < 64; ++j) {
                double phi = two_pi * i / 64.0, th = two_pi * j / 64.0;
                double fd_force = -(potential(p, phi + h, th) -
                                    potential(p, phi - h, th)) /
                                  (2.0 * h);
                CHECK(std::abs(force(p, phi, th) - fd_force) < 1e-8);
                double fd_slope =
                    (force(p, phi + h, th) - force(p, phi - h, th)) / (2.0 * h);
                CHECK(std::abs(force_dphi(p, phi, th) - fd_slope) < 1e-8);
            }
        }
    }
}

TEST_CASE("periodicity and tilt") {
    ModelParams p{.r = 0.4, .delta = 0.3};
    for (double phi : {0.0, 1.0, 2.5}) {
        for (double th : {0.0, 0.9}) {
            CHECK(potential(p, phi + two_pi, th) - potential(p, phi, th) ==
                  doctest::Approx(-two_pi * p.delta).epsilon(1e-12));
            CHECK(force(p, phi + two_pi, th) ==
                  doctest::Approx(force(p, phi, th)).epsilon(1e-12));
            CHECK(force(p, phi, th + two_pi) ==
                  doctest::Approx(force(p, phi, th)).epsilon(1e-12));
        }
    }
}

TEST_CASE("mixing-ratio endpoints") {
    ModelParams r1{.r = 1.0, .mu = 1.3, .delta = 0.2};
    for (double phi : {0.1, 1.9, 4.0})
        for (double th : {0.0, 2.0})
            CHECK(force(r1, phi, th) ==
                  doctest::Approx(r1.delta - r1.mu * std::sin(phi - th))
                      .epsilon(1e-14));
    ModelParams r0{.r = 0.0};
    for (double phi : {0.3, 2.2})
        CHECK(force(r0, phi, 0.4) ==
              doctest::Approx(force(r0, phi, 5.1)).epsilon(1e-14));
}
