#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "ringlab/numerics.hpp"

using namespace ringlab;
using doctest::Approx;

TEST_CASE("elliptic integrals") {
    SUBCASE("zero modulus") {
        const auto r = elliptic_KE(0.0);
        CHECK(r.K == Approx(std::numbers::pi / 2).epsilon(1e-15));
        CHECK(r.E == Approx(std::numbers::pi / 2).epsilon(1e-15));
    }
    SUBCASE("agree with boost and with quadrature of the definitions") {
        for (double l = 0.1; l < 0.95; l += 0.1) {
            const auto r = elliptic_KE(l);
            const auto b = oracle::elliptic(l);
            const auto q = oracle::elliptic_quadrature(l);
            CHECK(std::abs(r.K - b.K) < 1e-13 * b.K);
            CHECK(std::abs(r.E - b.E) < 1e-12 * b.E);
            CHECK(std::abs(r.K - q.K) < 1e-10 * q.K);
            CHECK(std::abs(r.E - q.E) < 1e-10 * q.E);
        }
    }
    SUBCASE("near unit modulus") {
        const auto r = elliptic_KE(1.0 - 1e-12);
        CHECK(std::isfinite(r.K));
        CHECK(r.K > 10.0);
        CHECK(std::abs(r.E - 1.0) < 1e-6);
    }
    SUBCASE("complement form keeps K - E accurate") {
        const double l = 1e-4, kp = std::sqrt(1 - l * l);
        const auto r = elliptic_KE_complement(l, kp);
        const auto b = oracle::elliptic(l);
        CHECK(std::abs(r.K_minus_E - (std::numbers::pi / 4) * l * l) < 1e-6 * l * l);
        CHECK(r.K == Approx(b.K).epsilon(1e-14));
    }
    CHECK_THROWS_AS(elliptic_KE(1.0), DomainError);
    CHECK_THROWS_AS(elliptic_KE(-0.1), DomainError);
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    const auto& g = gauss_legendre(12);
    double sum_w = 0, x4 = 0, x23 = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        sum_w += g.w[i];
        x4 += g.w[i] * std::pow(g.x[i], 4);
        x23 += g.w[i] * std::pow(g.x[i], 22);
    }
    CHECK(sum_w == Approx(2.0).epsilon(1e-14));
    CHECK(x4 == Approx(0.4).epsilon(1e-14));
    CHECK(x23 == Approx(2.0 / 23.0).epsilon(1e-13));
    CHECK(&gauss_legendre(12) == &g);
}

TEST_CASE("sigma kernels against adaptive quadrature") {
    const KernelPower powers[] = {KernelPower::half, KernelPower::three_halves,
                                  KernelPower::five_halves};
    const KernelWeight weights[] = {KernelWeight::one, KernelWeight::cos2, KernelWeight::lin_b,
                                    KernelWeight::lin_a};
    struct Geo {
        double ra, rb, dx;
    };
    for (Geo g : {Geo{0.3, 0.9, 0.2}, Geo{0.5, 0.52, 0.01}, Geo{1.0, 1.0, 1e-3}, Geo{0.05, 2.0, -1.0}})
        for (auto p : powers)
            for (auto w : weights) {
                const double v = sigma_kernel(g.ra, g.rb, g.dx, p, w);
                const double o = oracle::sigma_kernel(g.ra, g.rb, g.dx, p, w);
                CAPTURE(g.ra);
                CAPTURE(g.dx);
                CHECK(std::abs(v - o) <= 1e-9 * std::max(1.0, std::abs(o)));
            }
}

TEST_CASE("cos 2σ kernels") {
    SUBCASE("three-halves kernel is positive") {
        for (double dx : {0.0, 0.3, 2.0})
            CHECK(sigma_kernel(0.4, 0.7, dx, KernelPower::three_halves, KernelWeight::cos2) > 0.0);
    }
    SUBCASE("half kernel matches the closed elliptic form") {
        for (double dx : {0.05, 0.4, 1.5}) {
            const double ra = 0.4, rb = 0.9;
            const double rp = std::hypot(ra + rb, dx), rm = std::hypot(ra - rb, dx);
            const auto ke = oracle::elliptic((rp - rm) / (rp + rm));
            const double closed = (rp + rm) * (ke.K - ke.E) / (2 * ra * rb);
            CHECK(cos2_half_kernel(ra, rb, dx) == Approx(closed).epsilon(1e-12));
            CHECK(sigma_kernel(ra, rb, dx, KernelPower::half, KernelWeight::cos2) ==
                  Approx(closed).epsilon(1e-10));
        }
    }
    SUBCASE("coincident rings are a core hit") {
        CHECK_THROWS_AS(sigma_kernel(0.5, 0.5, 0.0, KernelPower::half, KernelWeight::one),
                        SingularityError);
    }
}

namespace {

using S1 = StateN<1>;
using S2 = StateN<2>;

double oscillator_energy_drift(double h) {
    auto f = [](double, const S2& y) { return S2{y[1], -y[0]}; };
    const auto tr = rk4_integrate<2>(f, S2{1.0, 0.0}, 0.0, 10.0, IntegratorSpec{h, 1e4});
    double d = 0;
    for (const auto& y : tr.y) d = std::max(d, std::abs(0.5 * (y[0] * y[0] + y[1] * y[1]) - 0.5));
    return d;
}

}  // namespace

TEST_CASE("rk4 integration") {
    SUBCASE("constant field") {
        auto f = [](double, const S1&) { return S1{0.0}; };
        const auto tr = rk4_integrate<1>(f, S1{3.0}, 0.0, 1.0, IntegratorSpec{1e-2, 10});
        for (const auto& y : tr.y) CHECK(y[0] == 3.0);
    }
    SUBCASE("exponential growth") {
        auto f = [](double, const S1& y) { return y; };
        const auto tr = rk4_integrate<1>(f, S1{1.0}, 0.0, 1.0, IntegratorSpec{1e-3, 10});
        CHECK(std::abs(tr.back()[0] - std::exp(1.0)) < 1e-8);
        CHECK(tr.t.back() == 1.0);
    }
    SUBCASE("fourth-order energy drift") {
        const double ratio = oscillator_energy_drift(0.02) / oscillator_energy_drift(0.01);
        CHECK(ratio == Approx(32.0).epsilon(0.15));  // energy error of RK4 is O(h^5) per unit time here
    }
    SUBCASE("stride keeps the end point") {
        auto f = [](double, const S1&) { return S1{1.0}; };
        const auto tr = rk4_integrate<1>(f, S1{0.0}, 0.0, 1.0, IntegratorSpec{0.1, 10}, 3);
        CHECK(tr.t.size() == 5);
        CHECK(tr.back()[0] == Approx(1.0));
    }
    SUBCASE("singularity stops the run and keeps the last good state") {
        auto f = [](double t, const S1&) {
            if (t > 0.5) throw SingularityError("hit");
            return S1{1.0};
        };
        const auto tr = rk4_integrate<1>(f, S1{0.0}, 0.0, 1.0, IntegratorSpec{0.1, 10});
        CHECK(tr.aborted);
        CHECK(tr.abort_time <= 0.5 + 1e-12);
    }
    SUBCASE("invalid spans") {
        auto f = [](double, const S1&) { return S1{0.0}; };
        CHECK_THROWS_AS(rk4_integrate<1>(f, S1{0.0}, 1.0, 0.0, IntegratorSpec{}), DomainError);
        CHECK_THROWS_AS(rk4_integrate<1>(f, S1{0.0}, 0.0, 1.0, IntegratorSpec{-1, 10}), DomainError);
    }
}

TEST_CASE("scalar roots") {
    auto f = [](double x) { return x * x - 2.0; };
    CHECK(std::abs(find_root(f, RootBracket{1.0, 2.0}).x - std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(find_root([](double x) { return x; }, 1.0, RootMethod::newton).x) < 1e-12);
    CHECK_THROWS(find_root(f, RootBracket{2.0, 3.0}));

    SUBCASE("picard iteration for the small radius root") {
        const double alpha = 5.0, chi = 1000.0, g = oracle::core_gamma();
        const auto r = find_root([&](double x) { return std::exp(2 * alpha * x + g) / chi; }, 1e-3,
                                 RootMethod::picard);
        // the small root of (ln(χr) − γ)/(2r) = α
        CHECK(std::abs((std::log(chi * r.x) - g) / (2 * r.x) - alpha) < 1e-10);
    }
}

TEST_CASE("cosine fit") {
    std::vector<std::pair<double, double>> pure, noisy, zero;
    for (int i = 0; i < 64; ++i) {
        const double t = 2 * std::numbers::pi * i / 64.0;
        pure.emplace_back(t, 3 * std::cos(2 * t));
        noisy.emplace_back(t, 3 * std::cos(2 * t) + 0.01 * std::sin(6 * t));
        zero.emplace_back(t, 0.0);
    }
    const auto a = fit_cosine(pure, 2.0);
    CHECK(a.C == Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(a.phase) < 1e-12);
    CHECK(a.rms_residual < 1e-12);
    const auto b = fit_cosine(noisy, 2.0);
    CHECK(b.C == Approx(3.0).epsilon(1e-3));
    CHECK(b.rms_residual == Approx(0.01 / std::sqrt(2.0)).epsilon(1e-3));
    CHECK(fit_cosine(zero, 2.0).C == 0.0);
}

TEST_CASE("hermite interpolation reproduces cubics") {
    auto p = [](double t) { return 1 + 2 * t - t * t + 0.5 * t * t * t; };
    auto dp = [](double t) { return 2 - 2 * t + 1.5 * t * t; };
    CHECK(hermite(0.0, 2.0, p(0), p(2), dp(0), dp(2), 0.7) == Approx(p(0.7)).epsilon(1e-14));
}
