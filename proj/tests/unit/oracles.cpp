#include "oracles.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <numbers>

#include "ringlab/oscillation.hpp"

namespace oracle {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

template <class F>
double gk(F f, double a, double b, double tol = 1e-13, unsigned depth = 20) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol);
}

}  // namespace

KE elliptic(double lambda) {
    return {boost::math::ellint_1(lambda), boost::math::ellint_2(lambda)};
}

KE elliptic_quadrature(double lambda) {
    const double l2 = lambda * lambda;
    const double K = gk([&](double s) { return 1.0 / std::sqrt(1.0 - l2 * std::sin(s) * std::sin(s)); },
                        0.0, pi / 2);
    const double E = gk([&](double s) { return std::sqrt(1.0 - l2 * std::sin(s) * std::sin(s)); },
                        0.0, pi / 2);
    return {K, E};
}

double sigma_kernel(double ra, double rb, double dx, ringlab::KernelPower power,
                    ringlab::KernelWeight weight) {
    using ringlab::KernelWeight;
    const double pw = power == ringlab::KernelPower::half           ? 0.5
                      : power == ringlab::KernelPower::three_halves ? 1.5
                                                                    : 2.5;
    auto f = [&](double s) {
        const double sn = std::sin(s), c2 = std::cos(2.0 * s);
        const double delta = (ra - rb) * (ra - rb) + dx * dx + 4.0 * ra * rb * sn * sn;
        double w = 1.0;
        switch (weight) {
            case KernelWeight::one: w = 1.0; break;
            case KernelWeight::cos2: w = c2; break;
            case KernelWeight::lin_b: w = rb - ra * c2; break;
            case KernelWeight::lin_a: w = ra - rb * c2; break;
        }
        return w * std::pow(delta, -pw);
    };
    // the kernel peaks in a layer of width ~w at σ = 0 for close rings:
    // split geometrically so every panel is smooth on its own scale
    const double w = std::sqrt((ra - rb) * (ra - rb) + dx * dx) / std::sqrt(4.0 * ra * rb);
    double sum = 0.0, lo = 0.0;
    for (double hi = std::min(w, pi / 2); lo < pi / 2; hi = std::min(4.0 * hi, pi / 2)) {
        sum += gk(f, lo, hi, 1e-12, 12);
        lo = hi;
    }
    return sum;
}

double core_gamma() {
    return 0.5 * (1.0 + std::log(2.0) - boost::math::constants::euler<double>());
}

std::array<double, 2> ring_induced(double a, double z0, double G, double r, double z) {
    const double dz = z - z0;
    auto D = [&](double f) { return r * r + a * a - 2.0 * a * r * std::cos(f) + dz * dz; };
    const double ur =
        gk([&](double f) { return a * dz * std::cos(f) / std::pow(D(f), 1.5); }, 0.0, 2 * pi);
    const double uz =
        gk([&](double f) { return a * (a - r * std::cos(f)) / std::pow(D(f), 1.5); }, 0.0, 2 * pi);
    return {G / (4 * pi) * ur, G / (4 * pi) * uz};
}

std::array<double, 2> particle_velocity(const ringlab::ParticleState& q,
                                        const ringlab::RingPairState& rings,
                                        const ringlab::ModelParams& p) {
    const double r = std::sqrt(q.s);
    const auto a = ring_induced(std::sqrt(rings.s1), rings.x1, 2 * pi, r, q.x);
    const auto b = ring_induced(std::sqrt(rings.s2), rings.x2, 2 * pi * p.kappa, r, q.x);
    const double swirl = -p.alpha * (1.0 + p.a1 * q.s + p.a2 * q.s * q.s);
    return {2.0 * r * (a[0] + b[0]), a[1] + b[1] + swirl};
}

std::array<double, 4> ring_velocity(const ringlab::RingPairState& q, const ringlab::ModelParams& p,
                                    double axial_sign) {
    const double r1 = std::sqrt(q.s1), r2 = std::sqrt(q.s2);
    auto psi = [&](double r) { return (std::log(p.chi * r) - core_gamma()) / (2.0 * r); };
    const auto on1 = ring_induced(r2, q.x2, 2 * pi * p.kappa, r1, q.x1);
    const auto on2 = ring_induced(r1, q.x1, 2 * pi, r2, q.x2);
    const double sw1 = -p.alpha * (1.0 + p.a1 * q.s1 + p.a2 * q.s1 * q.s1);
    const double sw2 = -p.alpha * (1.0 + p.a1 * q.s2 + p.a2 * q.s2 * q.s2);
    return {2.0 * r1 * on1[0], 2.0 * r2 * on2[0], psi(r1) + sw1 + axial_sign * on1[1],
            p.kappa * psi(r2) + sw2 + axial_sign * on2[1]};
}

double melnikov_at_zero(const ringlab::SeparatrixTrace& trace, const ringlab::EquilibriumConfig& c,
                        const ringlab::ModelParams& p, double T) {
    const auto rings = c.ring_state();
    auto integrand = [&](double t) {
        const auto q = trace.at(t);
        const auto v = ringlab::particle_velocity(q, rings, p);
        const double hs = 1e-6 * std::max(q.s, 1e-3), hx = 1e-6;
        const double dHs =
            (ringlab::h1_perturbation({q.s + hs, q.x}, t, c, p) -
             ringlab::h1_perturbation({std::max(q.s - hs, 0.0), q.x}, t, c, p)) /
            (q.s + hs - std::max(q.s - hs, 0.0));
        const double dHx = (ringlab::h1_perturbation({q.s, q.x + hx}, t, c, p) -
                            ringlab::h1_perturbation({q.s, q.x - hx}, t, c, p)) /
                           (2 * hx);
        return v[0] * dHs + v[1] * dHx;
    };
    // difference quotients limit the attainable accuracy; keep the depth modest
    return gk(integrand, -T, 0.0, 1e-9, 8) + gk(integrand, 0.0, T, 1e-9, 8);
}

}  // namespace oracle
