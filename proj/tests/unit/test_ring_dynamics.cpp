#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ringlab/equilibria.hpp"
#include "ringlab/ring_dynamics.hpp"

using namespace ringlab;
using doctest::Approx;

namespace {

ModelParams case1() {
    ModelParams p;
    p.alpha = 5.0;
    p.kappa = 1.5;
    p.chi = 1000.0;
    return p;
}

RingPairState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> s(0.05, 1.2), x(-0.5, 0.5);
    RingPairState q{s(rng), s(rng), x(rng), x(rng)};
    if (std::abs(q.s1 - q.s2) < 0.05) q.s2 += 0.2;
    return q;
}

}  // namespace

TEST_CASE("core constant") {
    CHECK(core_gamma() == Approx(oracle::core_gamma()).epsilon(1e-12));
    CHECK(core_gamma() == Approx(0.5579657578292062).epsilon(1e-12));
}

TEST_CASE("ring velocity against Biot-Savart") {
    ModelParams p = case1();
    SUBCASE("printed coupling is the plain mutual induction") {
        p.coupling = Coupling::printed;
        for (RingPairState q : {RingPairState{0.2, 1.0, 0.0, 0.3}, RingPairState{0.81, 0.09, 0.1, -0.2}}) {
            const auto v = ring_velocity(q, p);
            const auto o = oracle::ring_velocity(q, p);
            for (int k = 0; k < 4; ++k) CHECK(std::abs(v[k] - o[k]) < 1e-8 * std::max(1.0, std::abs(o[k])));
        }
    }
    SUBCASE("calibrated coupling flips the axial interaction when ring 1 is inner") {
        const RingPairState inner{0.09, 0.81, 0.1, -0.2}, outer{0.81, 0.09, 0.1, -0.2};
        const auto vi = ring_velocity(inner, p), oi = oracle::ring_velocity(inner, p, -1.0);
        const auto vo = ring_velocity(outer, p), oo = oracle::ring_velocity(outer, p, 1.0);
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(vi[k] - oi[k]) < 1e-8 * std::max(1.0, std::abs(oi[k])));
            CHECK(std::abs(vo[k] - oo[k]) < 1e-8 * std::max(1.0, std::abs(oo[k])));
        }
    }
    SUBCASE("rings at a common station do not change radius") {
        const auto v = ring_velocity({0.3, 0.7, 0.25, 0.25}, p);
        CHECK(v[0] == 0.0);
        CHECK(v[1] == 0.0);
    }
    SUBCASE("radial exchange conserves G at the right-hand-side level") {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 20; ++i) {
            const auto v = ring_velocity(random_state(rng), p);
            CHECK(std::abs(v[0] + p.kappa * v[1]) <= 1e-13 * (std::abs(v[0]) + 1));
        }
    }
}

TEST_CASE("type I equilibrium is a rest point") {
    const ModelParams p = case1();
    const auto c = resolve_equilibrium(p, EquilibriumType::I);
    CHECK(c.s1_hat == Approx(0.06).epsilon(0.15));
    CHECK(c.s2_hat == Approx(0.94).epsilon(0.15));
    for (double xi : {0.0, 0.7, -2.0}) {
        const auto v = ring_velocity({c.s1_hat, c.s2_hat, xi, xi}, p);
        for (double vk : v) CHECK(std::abs(vk) < 1e-8);
    }
}

TEST_CASE("hamiltonian") {
    ModelParams p = case1();
    std::mt19937_64 rng(11);
    SUBCASE("elliptic and quadrature forms agree") {
        for (int i = 0; i < 10; ++i) {
            const auto q = random_state(rng);
            const double a = hamiltonian(q, p), b = hamiltonian_integral_form(q, p);
            CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
        }
    }
    SUBCASE("printed field is the Hamiltonian gradient") {
        p.coupling = Coupling::printed;
        const RingPairState q{0.2, 1.0, 0.0, 0.3};
        const auto v = ring_velocity(q, p);
        const double h = 1e-6;
        auto H = [&](RingPairState r) { return hamiltonian(r, p); };
        const double dHdx1 = (H({q.s1, q.s2, q.x1 + h, q.x2}) - H({q.s1, q.s2, q.x1 - h, q.x2})) / (2 * h);
        const double dHds1 = (H({q.s1 + h, q.s2, q.x1, q.x2}) - H({q.s1 - h, q.s2, q.x1, q.x2})) / (2 * h);
        // ṡ_k ∝ ∂H/∂x_k and ẋ_k ∝ -∂H/∂s_k, with the same factor
        CHECK(v[0] / dHdx1 == Approx(-v[2] / dHds1).epsilon(1e-6));
    }
    SUBCASE("G is the weighted radius sum") {
        CHECK(invariant_G({1.0, 1.0, 0.0, 0.0}, p) == Approx(2.5));
    }
}

TEST_CASE("ring integration") {
    ModelParams p = case1();
    SUBCASE("equilibrium stays put") {
        const auto c = resolve_equilibrium(p, EquilibriumType::I);
        const auto tr = integrate_rings(c.ring_state(), p, 0.0, 1.0, IntegratorSpec{1e-3, 10});
        const auto& y = tr.path.back();
        CHECK(std::abs(y[0] - c.s1_hat) < 1e-9);
        CHECK(std::abs(y[1] - c.s2_hat) < 1e-9);
        CHECK(std::abs(y[2] - c.xi_hat) < 1e-9);
    }
    SUBCASE("printed coupling conserves H and G") {
        p.coupling = Coupling::printed;
        const RingPairState q{0.2, 1.0, 0.0, 0.3};
        const auto a = integrate_rings(q, p, 0.0, 2.0, IntegratorSpec{1e-3, 10});
        const auto b = integrate_rings(q, p, 0.0, 2.0, IntegratorSpec{5e-4, 10});
        CHECK(a.H_drift < 1e-6);
        CHECK(a.G_drift < 1e-12);
        CHECK(b.H_drift < a.H_drift);
    }
    SUBCASE("calibrated coupling still conserves G") {
        const auto tr = integrate_rings({0.2, 1.0, 0.0, 0.3}, p, 0.0, 2.0, IntegratorSpec{1e-3, 10});
        CHECK(tr.G_drift < 1e-12);
    }
}

TEST_CASE("azimuth history") {
    ModelParams p = case1();
    p.Omega = 2.0;
    std::vector<double> t, s, s_const;
    const int n = 3142;
    for (int i = 0; i <= n; ++i) {
        t.push_back(std::numbers::pi * i / n);
        s.push_back(std::pow(std::sin(t.back()), 2));
        s_const.push_back(0.4);
    }
    CHECK(azimuth_history(0.3, t, s, p).back() == Approx(0.3 + 2 * std::numbers::pi).epsilon(1e-12));
    p.b1 = 1.0;
    CHECK(azimuth_history(0.3, t, s_const, p).back() ==
          Approx(0.3 + 2.0 * 1.4 * std::numbers::pi).epsilon(1e-12));
    // ∫_0^π 2(1 + sin²τ) dτ = 3π
    CHECK(std::abs(azimuth_history(0.0, t, s, p).back() - 3 * std::numbers::pi) < 1e-6);
    CHECK_THROWS_AS(azimuth_history(0.0, t, {0.1}, p), DomainError);
}

TEST_CASE("parameter validation") {
    ModelParams p = case1();
    p.chi = -1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK(coupling_from_string("printed") == Coupling::printed);
    CHECK_THROWS(coupling_from_string("sideways"));
}
