#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ringlab/oscillation.hpp"

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

const EquilibriumConfig& config1() {
    static const EquilibriumConfig c = resolve_equilibrium(case1(), EquilibriumType::I);
    return c;
}

double period() { return 2 * std::numbers::pi / config1().nu; }

}  // namespace

TEST_CASE("analytic ring motion") {
    const ModelParams p = case1();
    const auto& c = config1();
    SUBCASE("zero amplitude is the equilibrium") {
        for (double t : {0.0, 0.3, 2.0}) {
            const auto r = ring_motion_analytic(t, c, p, {});
            CHECK(r.s1 == c.s1_hat);
            CHECK(r.s2 == c.s2_hat);
            CHECK(r.x1 == c.xi_hat);
            CHECK(r.x2 == c.xi_hat);
        }
    }
    SUBCASE("G is exactly the equilibrium value") {
        const OscillationSpec o{0.01, MotionMode::analytic, 0.0};
        for (double t : {0.0, 0.11, 0.5, 3.3})
            CHECK(invariant_G(ring_motion_analytic(t, c, p, o), p) == Approx(c.a_hat).epsilon(1e-15));
    }
    SUBCASE("amplitude bound") {
        CHECK(c.eps_star > 0.0);
        CHECK_NOTHROW(check_amplitude(c, 0.9 * c.eps_star));
        CHECK_THROWS_AS(check_amplitude(c, 1.1 * c.eps_star), DomainError);
        CHECK_THROWS_AS(ring_motion_analytic(0.0, c, p, {2 * c.eps_star}), DomainError);
    }
}

TEST_CASE("center manifold orbit") {
    const ModelParams p = case1();
    const auto& c = config1();
    const auto a = center_manifold_seed(c, p, 0.004);
    const auto b = center_manifold_seed(c, p, 0.002);
    CHECK(a.period == Approx(period()).epsilon(0.05));
    CHECK(a.ratio == Approx(c.A / c.B).epsilon(0.10));
    CHECK(b.diameter == Approx(0.5 * a.diameter).epsilon(0.10));
    CHECK(a.closure_gap < 1e-3);
    CHECK_THROWS_AS(center_manifold_seed(c, p, 0.0), DomainError);

    SUBCASE("integrated motion keeps G") {
        const RingMotion m(c, p, {0.004, MotionMode::integrated, 0.0});
        const double g0 = invariant_G(m(0.0), p);
        for (double t : {0.1, 0.5, 1.7}) CHECK(std::abs(invariant_G(m(t), p) - g0) < 1e-12 * g0);
    }
    SUBCASE("analytic and integrated radii differ at second order") {
        auto gap = [&](double mu) {
            const RingMotion an(c, p, {mu, MotionMode::analytic, 0.0});
            const RingMotion in(c, p, {mu, MotionMode::integrated, 0.0});
            double g = 0;
            for (int i = 0; i <= 64; ++i) {
                const double t = period() * i / 64.0;
                g = std::max({g, std::abs(an(t).s1 - in(t).s1), std::abs(an(t).s2 - in(t).s2)});
            }
            return g;
        };
        const double g1 = gap(0.004), g2 = gap(0.002);
        CHECK(g1 < 0.2 * 0.004);
        CHECK(g1 / g2 > 3.0);
    }
}

TEST_CASE("first-order stream perturbation") {
    const ModelParams p = case1();
    const auto& c = config1();
    SUBCASE("cos term vanishes on the ring station") {
        CHECK(h1_parts({0.3, c.xi_hat}, c, p).C == 0.0);
        const ParticleState q{0.3, 0.2};
        const auto h = h1_parts(q, c, p);
        CHECK(h1_perturbation(q, period() / 4, c, p) == Approx(h.S).epsilon(1e-12));
        CHECK(h1_perturbation(q, 0.0, c, p) == Approx(h.C).epsilon(1e-12));
    }
    SUBCASE("derivative of the full stream function in the amplitude") {
        const ParticleState q{0.35, 0.15};
        const double t = 0.21;
        const double h0 = stream_hamiltonian0(q, c, p), h1 = h1_perturbation(q, t, c, p);
        auto err = [&](double mu) {
            const auto rings = ring_motion_analytic(t, c, p, {mu, MotionMode::analytic, 0.0});
            return std::abs((stream_hamiltonian(q, rings, p) - h0) / mu - h1);
        };
        const double e1 = err(4e-3), e2 = err(2e-3), e3 = err(1e-3);
        CHECK(e2 < e1);
        CHECK(std::log2(e2 / e3) > 0.9);
    }
}

TEST_CASE("stagnation traces") {
    const ModelParams p = case1();
    const auto& c = config1();
    std::vector<double> t;
    for (int i = 0; i <= 40; ++i) t.push_back(2 * period() * i / 40.0);
    SUBCASE("zero amplitude") {
        for (const auto& s : stagnation_trace(c, p, {}, t)) {
            CHECK(s.x_plus == Approx(c.x_plus).epsilon(1e-12));
            CHECK(s.x_minus == Approx(c.x_minus).epsilon(1e-12));
        }
    }
    SUBCASE("oscillation at the ring frequency") {
        auto asym = [&](double mu) {
            double a = 0;
            for (const auto& s : stagnation_trace(c, p, {mu, MotionMode::analytic, 0.0}, t))
                a = std::max(a, std::abs((s.x_plus - c.xi_hat) - (c.xi_hat - s.x_minus)));
            return a;
        };
        const auto tr = stagnation_trace(c, p, {0.01, MotionMode::analytic, 0.0}, t);
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i + 20 < tr.size(); ++i) {
            CHECK(tr[i + 20].x_plus == Approx(tr[i].x_plus).epsilon(1e-9));
            lo = std::min(lo, tr[i].x_plus);
            hi = std::max(hi, tr[i].x_plus);
        }
        CHECK(hi - lo > 1e-3);
        CHECK(lo < c.x_plus);
        CHECK(hi > c.x_plus);
        CHECK(asym(0.01) > 0.0);
        CHECK(asym(0.0025) < asym(0.01));
    }
    SUBCASE("serial and parallel agree") {
        const auto a = stagnation_trace(c, p, {0.01, MotionMode::analytic, 0.0}, t, Execution::serial);
        const auto b = stagnation_trace(c, p, {0.01, MotionMode::analytic, 0.0}, t, Execution::parallel);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x_plus == b[i].x_plus);
    }
}

TEST_CASE("motion mode names") {
    CHECK(motion_mode_from_string("integrated") == MotionMode::integrated);
    CHECK_THROWS(motion_mode_from_string("frozen"));
}
