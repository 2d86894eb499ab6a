#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "doctest.h"
#include "ringlab/equilibria.hpp"

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

bool within(double v, double ref, double rel) { return std::abs(v - ref) <= rel * std::abs(ref); }

double psi(double r, const ModelParams& p) { return (std::log(p.chi * r) - p.gamma_const) / (2 * r); }

}  // namespace

TEST_CASE("reduced radii") {
    const ModelParams p = params(5.0);
    const auto r = solve_reduced_radii(p);
    // r0 < r2a < r1a < rho < r1b < r2b
    CHECK(r.r0 < r.r2a);
    CHECK(r.r2a < r.r1a);
    CHECK(r.r1a < r.rho);
    CHECK(r.rho < r.r1b);
    CHECK(r.r1b < r.r2b);
    CHECK(std::abs(psi(r.r1a, p) - p.alpha) < 1e-12 * p.alpha);
    CHECK(std::abs(psi(r.r1b, p) - p.alpha) < 1e-12 * p.alpha);
    CHECK(std::abs(p.kappa * psi(r.r2a, p) - p.alpha) < 1e-12 * p.alpha);
    CHECK(std::abs(p.kappa * psi(r.r2b, p) - p.alpha) < 1e-12 * p.alpha);

    // bisection oracle on either side of the maximiser of ψ
    auto f = [&](double x) { return psi(x, p) - p.alpha; };
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto lo = boost::math::tools::bisect(f, 1.0001 * r.r0, r.rho, tol);
    const auto hi = boost::math::tools::bisect(f, r.rho, 10.0, tol);
    CHECK(std::abs(r.r1a - 0.5 * (lo.first + lo.second)) < 1e-10);
    CHECK(std::abs(r.r1b - 0.5 * (hi.first + hi.second)) < 1e-10);

    CHECK_THROWS_AS(solve_reduced_radii(params(1e6)), DomainError);
}

TEST_CASE("equilibrium types at alpha 5 match the reference values") {
    const ModelParams p = params(5.0);
    struct Ref {
        EquilibriumType t;
        double s1, s2, s_hat, x, tol;
    };
    for (Ref ref : {Ref{EquilibriumType::I, 0.06, 0.94, 0.24, 0.45, 0.15},
                    Ref{EquilibriumType::II, 0.33, 3e-6, 0.0006, 0.13, 0.20},
                    Ref{EquilibriumType::III, 3.2e-6, 0.89, 0.005, 0.063, 0.20},
                    Ref{EquilibriumType::IV, 5.9e-6, 3.5e-7, 9.6e-7, 0.015, 0.20}}) {
        const auto c = resolve_equilibrium(p, ref.t);
        CAPTURE(to_string(ref.t));
        CHECK(within(c.s1_hat, ref.s1, ref.tol));
        CHECK(within(c.s2_hat, ref.s2, ref.tol));
        CHECK(within(c.s_hat, ref.s_hat, ref.tol));
        CHECK(within(c.x_plus, ref.x, ref.tol));
        CHECK(c.radii_residual < 1e-10);
        for (double xi : {0.0, 0.37, -1.2}) {
            const auto v = ring_velocity({c.s1_hat, c.s2_hat, xi, xi}, p);
            for (double vk : v) CHECK(std::abs(vk) < 1e-8);
        }
    }
}

TEST_CASE("hairpin regime") {
    const auto c = resolve_equilibrium(params(0.1), EquilibriumType::I);
    CHECK(within(c.s1_hat, 895, 0.15));
    CHECK(within(c.s2_hat, 6914, 0.15));
    CHECK(within(c.s_hat, 3860, 0.15));
    CHECK(within(c.x_plus, 24, 0.15));
}

TEST_CASE("stagnation points and interior saddle") {
    const ModelParams p = params(5.0);
    const auto c = resolve_equilibrium(p, EquilibriumType::I, 0.3);
    CHECK(c.x_plus == c.xi_hat + c.eta);
    CHECK(c.x_minus == c.xi_hat - c.eta);
    CHECK(std::abs(axis_velocity(c.x_plus, c.r1_hat, c.r2_hat, c.xi_hat, p)) < 1e-10);
    CHECK(c.r1_hat < c.r_hat());
    CHECK(c.r_hat() < c.r2_hat);
    CHECK(std::abs(saddle_function(c.r_hat(), c.r1_hat, c.r2_hat, c.xi_hat, p)) < 1e-10);
    double prev = -INFINITY;
    for (int i = 1; i < 50; ++i) {
        const double r = c.r1_hat + (c.r2_hat - c.r1_hat) * i / 50.0;
        const double v = saddle_function(r, c.r1_hat, c.r2_hat, c.xi_hat, p);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("ring jacobian at type I") {
    const ModelParams p = params(5.0);
    const auto c = resolve_equilibrium(p, EquilibriumType::I);
    const auto jac = ring_jacobian(c.r1_hat, c.r2_hat, c.xi_hat, p);
    for (int i = 0; i < 4; ++i) {
        CHECK(jac.J[i][2] + jac.J[i][3] == Approx(0.0).scale(1.0));
    }
    CHECK(jac.J[2][2] == 0.0);
    CHECK(jac.J[2][3] == 0.0);
    CHECK(jac.J[3][2] == 0.0);
    CHECK(jac.J[3][3] == 0.0);
    CHECK(jac.center);

    int zero = 0, imag = 0;
    for (const auto& z : jac.eigenvalues) {
        if (std::abs(z) < 1e-8) ++zero;
        else if (std::abs(z.real()) < 1e-8 && std::abs(std::abs(z.imag()) - c.nu) < 1e-8 * c.nu) ++imag;
    }
    CHECK(zero == 2);
    CHECK(imag == 2);

    // central differences of the field in (s1, s2, x1, x2)
    const RingPairState q = c.ring_state();
    for (int j = 0; j < 4; ++j) {
        const double h = 1e-6;
        auto a = q.as_array(), b = q.as_array();
        a[j] += h;
        b[j] -= h;
        const auto va = ring_velocity(RingPairState::from_array(a), p);
        const auto vb = ring_velocity(RingPairState::from_array(b), p);
        for (int i = 0; i < 4; ++i) {
            const double fd = (va[i] - vb[i]) / (2 * h);
            CHECK(std::abs(fd - jac.J[i][j]) <= 1e-5 * std::max(1.0, std::abs(jac.J[i][j])));
        }
    }

    const auto cc = center_coefficients(jac, p);
    CHECK(cc.nu == Approx(cc.nu_eigen).epsilon(1e-8));
    CHECK(cc.A / cc.B == Approx(cc.ratio_eigen).epsilon(1e-6));
    CHECK(cc.nu * cc.nu == Approx(-jac.lambda_sq).epsilon(1e-12));
    CHECK(c.nu == Approx(9.014).epsilon(1e-3));
}

TEST_CASE("kinematic fixed points") {
    const ModelParams p = params(5.0);
    const auto c = resolve_equilibrium(p, EquilibriumType::I);
    const auto fps = classify_fixed_points(c, p);
    REQUIRE(fps.size() == 5);
    for (const auto& f : fps) {
        if (f.label == "p_plus" || f.label == "p_minus" || f.label == "q") {
            CHECK(f.kind == "saddle");
            CHECK(f.lambda_unstable > 0);
            CHECK(f.lambda_stable == Approx(-f.lambda_unstable));
        } else {
            CHECK(f.kind == "singular_center");
        }
        if (f.label == "p_plus") CHECK(f.tangent_slope <= 0.0);
    }
    // independent of the axial station
    const auto shifted = classify_fixed_points(resolve_equilibrium(p, EquilibriumType::I, 2.0), p);
    for (std::size_t i = 0; i < fps.size(); ++i)
        CHECK(shifted[i].lambda_unstable == Approx(fps[i].lambda_unstable).epsilon(1e-9));
}

TEST_CASE("type names") {
    CHECK(equilibrium_type_from_string("III") == EquilibriumType::III);
    CHECK_THROWS(equilibrium_type_from_string("V"));
}
