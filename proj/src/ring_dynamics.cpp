#include "ringlab/ring_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ringlab {

const char* to_string(Coupling c) {
    switch (c) {
        case Coupling::printed: return "printed";
        case Coupling::reversed: return "reversed";
        case Coupling::calibrated: return "calibrated";
    }
    return "calibrated";
}

Coupling coupling_from_string(const std::string& s) {
    if (s == "printed") return Coupling::printed;
    if (s == "reversed") return Coupling::reversed;
    if (s == "calibrated") return Coupling::calibrated;
    throw ConfigError("unknown coupling convention '" + s + "'");
}

double core_gamma() {
    static const double value = [] {
        // ξ = e^u turns the integral into ∫ u exp(u - e^u) du over the line;
        // the integrand is below 1e-17 outside [-45, 4].
        const GaussRule& g = gauss_legendre(32);
        double integral = 0.0;
        for (double lo = -45.0; lo < 4.0; lo += 0.5) {
            const double c = lo + 0.25, h = 0.25;
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double u = c + h * g.x[i];
                integral += h * g.w[i] * u * std::exp(u - std::exp(u));
            }
        }
        return 0.5 * (1.0 + std::log(2.0) + integral);
    }();
    return value;
}

void ModelParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(kappa >= 1.0)) throw ConfigError("kappa must be at least 1");
    if (!(chi > 8.0)) throw ConfigError("chi must exceed 8");
    if (!(Omega > 0.0)) throw ConfigError("Omega must be positive");
    if (!std::isfinite(mu)) throw ConfigError("mu must be finite");
    quad.validate();
}

double self_induction(double r, const ModelParams& p) {
    return (std::log(p.chi * r) - p.gamma_const) / (2.0 * r);
}

double self_induction_dr(double r, const ModelParams& p) {
    return (1.0 + p.gamma_const - std::log(p.chi * r)) / (2.0 * r * r);
}

double interaction_sign(double r1, double r2, Coupling c) {
    switch (c) {
        case Coupling::printed: return 1.0;
        case Coupling::reversed: return -1.0;
        case Coupling::calibrated: return r1 >= r2 ? 1.0 : -1.0;
    }
    return 1.0;
}

namespace {

void require_positive(const RingPairState& q) {
    if (!(q.s1 > 0.0) || !(q.s2 > 0.0))
        throw SingularityError("ring radius collapsed to the axis");
}

}  // namespace

Vec4 ring_velocity(const RingPairState& q, const ModelParams& p) {
    require_positive(q);
    const double r1 = std::sqrt(q.s1), r2 = std::sqrt(q.s2);
    const double dx = q.x1 - q.x2;
    const auto k = sigma_integrate<3>(r1, r2, dx, p.quad, [&](const SigmaPoint& sp) {
        const double d32 = inv_pow(sp.delta, KernelPower::three_halves);
        return std::array<double, 3>{sp.cos2 * d32,
                                     ((r2 - r1) + 2.0 * r1 * sp.sin2) * d32,
                                     ((r1 - r2) + 2.0 * r2 * sp.sin2) * d32};
    });
    const double eps = interaction_sign(r1, r2, p.coupling);
    const double base = 4.0 * r1 * r2 * dx * k[0];
    Vec4 v;
    v[0] = p.kappa * base;
    v[1] = -base;
    v[2] = p.swirl_axial(q.s1) + self_induction(r1, p) + eps * 2.0 * p.kappa * r2 * k[1];
    v[3] = p.swirl_axial(q.s2) + p.kappa * self_induction(r2, p) + eps * 2.0 * r1 * k[2];
    return v;
}

namespace {

double hamiltonian_with(const RingPairState& q, const ModelParams& p, double interaction) {
    const double r1 = std::sqrt(q.s1), r2 = std::sqrt(q.s2);
    const double swirl = p.swirl_potential(q.s1) + p.kappa * p.swirl_potential(q.s2);
    const double one_g = 1.0 + p.gamma_const;
    const double self = r1 * (std::log(p.chi * r1) - one_g) +
                        p.kappa * p.kappa * r2 * (std::log(p.chi * r2) - one_g);
    return swirl - (self + 4.0 * p.kappa * r1 * r2 * interaction);
}

}  // namespace

double hamiltonian(const RingPairState& q, const ModelParams& p) {
    require_positive(q);
    const double r1 = std::sqrt(q.s1), r2 = std::sqrt(q.s2);
    return hamiltonian_with(q, p, cos2_half_kernel(r1, r2, q.x1 - q.x2, p.quad));
}

double hamiltonian_integral_form(const RingPairState& q, const ModelParams& p) {
    require_positive(q);
    const double r1 = std::sqrt(q.s1), r2 = std::sqrt(q.s2);
    const auto j = sigma_integrate<1>(r1, r2, q.x1 - q.x2, p.quad, [](const SigmaPoint& sp) {
        return std::array<double, 1>{sp.cos2 / std::sqrt(sp.delta)};
    });
    return hamiltonian_with(q, p, j[0]);
}

double invariant_G(const RingPairState& q, const ModelParams& p) {
    return q.s1 + p.kappa * q.s2;
}

RingTrajectory integrate_rings(const RingPairState& q0, const ModelParams& p, double t0,
                               double t1, const IntegratorSpec& spec, long stride) {
    auto field = [&p](double, const Vec4& y) {
        return ring_velocity(RingPairState::from_array(y), p);
    };
    RingTrajectory out;
    out.path = rk4_integrate<4>(field, q0.as_array(), t0, t1, spec, stride);
    const double H0 = hamiltonian(q0, p);
    const double G0 = invariant_G(q0, p);
    for (const auto& y : out.path.y) {
        const auto q = RingPairState::from_array(y);
        if (!(q.s1 > 0.0) || !(q.s2 > 0.0)) continue;
        out.H_drift = std::max(out.H_drift, std::abs(hamiltonian(q, p) - H0) / std::abs(H0));
        out.G_drift = std::max(out.G_drift, std::abs(invariant_G(q, p) - G0) / std::abs(G0));
    }
    return out;
}

std::vector<double> azimuth_history(double theta0, const std::vector<double>& t,
                                    const std::vector<double>& s, const ModelParams& p) {
    if (t.size() != s.size()) throw DomainError("azimuth_history: size mismatch");
    std::vector<double> theta(t.size());
    if (t.empty()) return theta;
    auto rate = [&p](double sv) { return p.Omega * (1.0 + p.b1 * sv + p.b2 * sv * sv); };
    theta[0] = theta0;
    for (std::size_t i = 1; i < t.size(); ++i)
        theta[i] = theta[i - 1] + 0.5 * (t[i] - t[i - 1]) * (rate(s[i - 1]) + rate(s[i]));
    return theta;
}

}  // namespace ringlab
