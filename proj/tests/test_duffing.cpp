#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phasepump/duffing.hpp"

using namespace phasepump;

namespace {

std::array<double, 4> seeded(double phi0, double omega2) {
    return {1.0, 0.0, std::cos(phi0), -omega2 * std::sin(phi0)};
}

DuffingParams static_params() {
    return DuffingParams{.kind = CouplingKind::static_linear,
                         .gamma1 = 0.01, .gamma2 = 0.01,
                         .a1 = 0.005, .a2 = 0.005,
                         .kappa1 = 0.002, .kappa2 = 0.002};
}

}  // namespace

TEST_CASE("synthetic trace demodulates to the seeded phase") {
    std::vector<double> t, u;
    for (int i = 0; i < 4000; ++i) {
        t.push_back(0.157 * i);
        u.push_back(std::cos(t.back() + 0.3));
    }
    auto d = extract_phase(t, u, 1.0);
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        CHECK(std::abs(d.phase[i] - 0.3) < 1e-3);
        CHECK(d.amplitude[i] == doctest::Approx(0.5).epsilon(1e-3));
    }
}

TEST_CASE("single oscillator reaches the rescaled limit cycle") {
    DuffingParams sg{.kind = CouplingKind::single, .gamma1 = 0.01,
                     .a1 = 0.005};
    auto rep = reduction_check(sg, {{1.0, 0.0, 0.0, 0.0}}, 3000.0, 800.0);
    // slow drift of the demodulated phase is the frequency shift
    CHECK(rep.d_fit == doctest::Approx(0.0075).epsilon(0.1));
    CHECK(std::abs(rep.d_fit - 0.0075) < 1e-3);
    CHECK(rep.residual_rel < 1e-4);

    // demodulating at the measured frequency removes the filter droop
    auto tr = simulate_duffing(sg, {1.0, 0.0, 0.0, 0.0}, 3000.0, 0.157);
    auto d = extract_phase(tr.t, tr.u1, 1.0 + rep.d_fit);
    double amp = 0.0;
    std::size_t n = 0;
    for (std::size_t i = d.t.size() / 2; i < d.t.size(); ++i, ++n)
        amp += d.amplitude[i];
    CHECK(amp / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("negative damping grows a small seed into the limit cycle") {
    DuffingParams sg{.kind = CouplingKind::single, .gamma1 = 0.01,
                     .a1 = 0.005};
    auto tr = simulate_duffing(sg, {0.01, 0.0, 0.0, 0.0}, 3000.0, 0.157);
    auto d = extract_phase(tr.t, tr.u1, 1.0075);
    CHECK(d.amplitude.front() < 0.05);
    CHECK(d.amplitude.back() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("static coupling locks at the stable fixed point") {
    auto tr = simulate_duffing(static_params(), seeded(1.0, 1.0), 6000.0,
                               0.157);
    auto pd = phase_difference(tr);
    for (std::size_t i = pd.t.size() * 3 / 4; i < pd.t.size(); ++i)
        CHECK(std::abs(pd.phi[i]) < 0.05);
}

TEST_CASE("detuning beyond the locking range drifts monotonically") {
    auto dp = static_params();
    dp.delta1 = dp.delta2 = 0.004;
    auto tr = simulate_duffing(dp, seeded(1.0, 1.0), 6000.0, 0.157);
    auto pd = phase_difference(tr);
    CHECK(pd.phi.back() - pd.phi.front() > 4.0 * std::numbers::pi);
    for (std::size_t i = 200; i < pd.t.size(); i += 200)
        CHECK(pd.phi[i] > pd.phi[i - 200]);
}

TEST_CASE("static reduction recovers the sine coupling") {
    auto rep = reduction_check(static_params(),
                               {seeded(2.5, 1.0), seeded(-2.5, 1.0)}, 4000.0,
                               300.0);
    CHECK(rep.s_pred == doctest::Approx(0.003).epsilon(1e-12));
    CHECK(rep.s_fit == doctest::Approx(rep.s_pred).epsilon(0.2));
    CHECK(std::abs(rep.d_fit) < 0.1 * rep.s_pred);
    CHECK(std::abs(rep.c_fit) < 0.1 * rep.s_pred);
    CHECK(rep.kind == CouplingKind::static_linear);
}

TEST_CASE("joint halving of the small parameters halves the residual") {
    auto full = static_params();
    auto rf = reduction_check(full, {seeded(2.5, 1.0), seeded(-2.5, 1.0)},
                              4000.0, 300.0);
    auto half = full;
    half.gamma1 *= 0.5;
    half.gamma2 *= 0.5;
    half.a1 *= 0.5;
    half.a2 *= 0.5;
    half.kappa1 *= 0.5;
    half.kappa2 *= 0.5;
    auto rh = reduction_check(half, {seeded(2.5, 1.0), seeded(-2.5, 1.0)},
                              8000.0, 600.0);
    CHECK(rf.residual_rel > 1e-5);
    CHECK(rh.residual_rel / rf.residual_rel == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("parametric coupling folds the pump phases into the coefficients") {
    DuffingParams dp{.kind = CouplingKind::parametric,
                     .omega1 = 1.0, .omega2 = 1.02,
                     .gamma1 = 0.01, .gamma2 = 0.01,
                     .a1 = 0.005, .a2 = 0.005,
                     .kappa1 = 0.002, .kappa2 = 0.002,
                     .theta1 = 0.0, .theta2 = 0.4};
    auto rep = reduction_check(dp, {seeded(2.5, 1.02), seeded(-2.5, 1.02)},
                               4000.0, 300.0);
    CHECK(rep.s_fit == doctest::Approx(rep.s_pred).epsilon(0.15));
    CHECK(rep.c_fit * rep.c_pred > 0.0);
    CHECK(std::abs(rep.c_fit - rep.c_pred) < 0.1 * rep.s_pred);
}

TEST_CASE("overtone coupling fits the second-harmonic force") {
    DuffingParams dp{.kind = CouplingKind::nonlinear_parametric,
                     .omega1 = 1.0, .omega2 = 1.02,
                     .gamma1 = 0.02, .gamma2 = 0.02,
                     .a1 = 0.005, .a2 = 0.005,
                     .lambda1 = 0.0005, .lambda2 = 0.001};
    auto rep = reduction_check(dp, {seeded(1.2, 1.02), seeded(-1.2, 1.02)},
                               9000.0, 800.0);
    CHECK(rep.s_fit == doctest::Approx(rep.s_pred).epsilon(0.2));
    CHECK(rep.c_fit == doctest::Approx(rep.c_pred).epsilon(0.2));
    CHECK(rep.d_fit == doctest::Approx(rep.d_pred).epsilon(0.2));
}

TEST_CASE("zero coupling fits only the noise floor") {
    auto dp = static_params();
    dp.kappa1 = dp.kappa2 = 0.0;
    dp.delta2 = 1e-4;
    auto rep = reduction_check(dp, {seeded(1.0, 1.0)}, 6000.0, 300.0);
    CHECK(std::abs(rep.s_fit) < 1e-4);
    CHECK(std::abs(rep.c_fit) < 1e-4);
}

TEST_CASE("parameter validation and warnings") {
    DuffingParams bad;
    bad.omega1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    DuffingParams hot = static_params();
    hot.gamma1 = 0.2;
    CHECK(!hot.validity_warnings().empty());
    CHECK(static_params().validity_warnings().empty());

    auto tr = simulate_duffing(hot, seeded(1.0, 1.0), 500.0, 0.157);
    CHECK(!tr.warnings.empty());

    CHECK_THROWS_AS(reduction_check(static_params(), {}, 100.0, 10.0),
                    std::invalid_argument);
    std::vector<double> t(100), u(100);
    for (int i = 0; i < 100; ++i) t[i] = 0.157 * i;
    CHECK_THROWS_AS(extract_phase(t, u, 1.0), DemodulationError);
}
