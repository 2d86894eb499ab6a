#include <cmath>

#include "doctest.h"
#include "ringlab/poincare.hpp"

using namespace ringlab;
using doctest::Approx;

namespace {

ModelParams params(double alpha) {
    ModelParams p;
    p.alpha = alpha;
    p.kappa = 1.5;
    p.chi = 1000.0;
    return p;
}

struct Setup {
    ModelParams p;
    EquilibriumConfig c;
    explicit Setup(double alpha) : p(params(alpha)), c(resolve_equilibrium(p, EquilibriumType::I)) {
        p.Omega = c.nu;
    }
    PoincareMap map(double mu, Execution ex = Execution::parallel) const {
        PoincareOptions o;
        o.exec = ex;
        return PoincareMap(c, p, {mu, MotionMode::analytic, 0.0}, o);
    }
};

const Setup& case1() {
    static const Setup s(5.0);
    return s;
}

const Setup& case2() {
    static const Setup s(20.0);
    return s;
}

}  // namespace

TEST_CASE("unperturbed map") {
    const auto& s = case2();
    const auto m = s.map(0.0);
    SUBCASE("axis saddles are fixed") {
        for (double x : {s.c.x_plus, s.c.x_minus}) {
            const auto q = m({0.0, x});
            CHECK(q.s == 0.0);
            CHECK(std::abs(q.x - x) < 1e-8);
        }
    }
    SUBCASE("stream function level is preserved") {
        for (ParticleState q : {ParticleState{0.01, 0.02}, ParticleState{0.02, -0.05}}) {
            const double h0 = stream_hamiltonian0(q, s.c, s.p);
            CHECK(std::abs(stream_hamiltonian0(m(q), s.c, s.p) - h0) < 1e-7);
        }
    }
}

TEST_CASE("perturbed map") {
    const auto& s = case2();
    const auto m = s.map(4e-4);
    SUBCASE("axis stays invariant") {
        ParticleState q{0.0, 0.05};
        for (int k = 0; k < 3; ++k) {
            q = m(q, k * m.period());
            CHECK(q.s == 0.0);
        }
    }
    SUBCASE("iterating equals one long integration") {
        const ParticleState q{0.015, 0.03};
        const auto a = m(m(q, 0.0), m.period());
        const auto b = m.flow(q, 0.0, 2 * m.period());
        // step placement differs between the two; agreement is to truncation error
        CHECK(std::abs(a.s - b.s) < 1e-7);
        CHECK(std::abs(a.x - b.x) < 1e-7);
    }
    SUBCASE("the map needs a positive frequency") {
        ModelParams bad = s.p;
        bad.Omega = -1.0;
        CHECK_THROWS(PoincareMap(s.c, bad, {0.0, MotionMode::analytic, 0.0}));
    }
}

TEST_CASE("area preservation") {
    const auto& s = case1();
    for (double mu : {0.0, 0.01}) {
        const auto m = s.map(mu);
        const auto j = map_jacobian(m, {0.35, 0.1}, 1e-5);
        CAPTURE(mu);
        CHECK(std::abs(j.det - 1.0) < 1e-4);
    }
}

TEST_CASE("perturbed fixed points") {
    const auto& s = case1();
    SUBCASE("zero amplitude recovers the saddles") {
        const auto fp = map_fixed_points(s.map(0.0));
        REQUIRE(fp.size() == 3);
        CHECK(std::abs(fp[0].point.x - s.c.x_plus) < 1e-8);
        CHECK(std::abs(fp[1].point.x - s.c.x_minus) < 1e-8);
        CHECK(std::abs(fp[2].point.s - s.c.s_hat) < 1e-8);
        CHECK(std::abs(fp[2].point.x - s.c.xi_hat) < 1e-8);
    }
    SUBCASE("saddles move continuously with the amplitude") {
        const auto a = map_fixed_points(s.map(0.01));
        const auto b = map_fixed_points(s.map(0.005));
        for (const auto& f : a) CHECK(f.residual < 1e-8);
        CHECK(a[1].point.x < a[0].point.x);
        const double da = std::abs(a[0].point.x - s.c.x_plus), db = std::abs(b[0].point.x - s.c.x_plus);
        CHECK(std::log2(da / db) > 0.8);
    }
}

TEST_CASE("seed ladder") {
    const auto& c = case1().c;
    const auto seeds = seed_ladder(c, 1.9, 30, 0.05);
    REQUIRE(seeds.size() == 30);
    for (const auto& q : seeds) {
        CHECK(q.x == c.xi_hat);
        CHECK(q.s > 0.0);
        CHECK(q.s < 1.9);
        CHECK(std::abs(std::sqrt(q.s) - c.r1_hat) > 0.05 - 1e-12);
        CHECK(std::abs(std::sqrt(q.s) - c.r2_hat) > 0.05 - 1e-12);
    }
    for (std::size_t i = 1; i < seeds.size(); ++i) CHECK(seeds[i].s > seeds[i - 1].s);
}

TEST_CASE("section clouds") {
    const auto& s = case2();
    const std::vector<ParticleState> seeds{{0.01, s.c.xi_hat}, {0.02, s.c.xi_hat}, {0.3, s.c.xi_hat}};
    const auto cloud = section(seeds, 4, s.map(0.0));
    REQUIRE(cloud.iterates.size() == 3);
    CHECK(cloud.iterates[0].size() == 5);
    CHECK(cloud.iterates[0][0].s == seeds[0].s);
    CHECK_FALSE(cloud.escaped[0]);
    // far above the bubble the flow carries particles out of the box
    CHECK(cloud.escaped[2]);
    CHECK(cloud.escape_index[2] > 0);
    const auto levels = level_statistics(cloud);
    CHECK(levels[0].spread < 1e-6);
    CHECK(levels[1].spread < 1e-6);
    for (const auto& l : levels) CHECK(l.stddev <= l.spread);

    const auto serial = section(seeds, 4, s.map(0.0, Execution::serial));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        REQUIRE(serial.iterates[i].size() == cloud.iterates[i].size());
        CHECK(serial.iterates[i].back().s == cloud.iterates[i].back().s);
        CHECK(serial.iterates[i].back().x == cloud.iterates[i].back().x);
    }
}
