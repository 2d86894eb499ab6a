#include "ringlab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ringlab {

const char* to_string(MotionMode m) {
    return m == MotionMode::analytic ? "analytic" : "integrated";
}

MotionMode motion_mode_from_string(const std::string& s) {
    if (s == "analytic") return MotionMode::analytic;
    if (s == "integrated") return MotionMode::integrated;
    throw ConfigError("unknown ring motion mode '" + s + "'");
}

void check_amplitude(const EquilibriumConfig& c, double mu) {
    if (!std::isfinite(mu) || std::abs(mu) > c.eps_star)
        throw DomainError("oscillation amplitude |mu| = " + std::to_string(std::abs(mu)) +
                          " exceeds eps* = " + std::to_string(c.eps_star));
    if (mu != 0.0 && !c.ring_center)
        throw DomainError("ring equilibrium is not a center; no oscillating motion");
}

RingPairState ring_motion_analytic(double t, const EquilibriumConfig& c, const ModelParams& p,
                                   const OscillationSpec& spec) {
    check_amplitude(c, spec.mu);
    if (spec.mu == 0.0) return c.ring_state();
    const double th = c.nu * t + spec.phase;
    const double sn = std::sin(th), cs = std::cos(th);
    const double mu = spec.mu;
    return {c.s1_hat + mu * sn, c.s2_hat - mu / p.kappa * sn, c.xi_hat + c.x_gain * mu * cs,
            c.xi_hat + c.x_gain * (c.A / c.B) * mu * cs};
}

namespace {

struct TrialOrbit {
    Trajectory<4> path;
    double period = 0.0;
    double mean_offset = 0.0;   // drift-corrected time mean of x1 - ξ̂
};

// Integrates 1.5 linear periods and locates the next up-crossing of s1 = ŝ1.
TrialOrbit trial_orbit(const RingPairState& q0, const EquilibriumConfig& c, const ModelParams& p,
                       const IntegratorSpec& spec) {
    const double T_lin = 2.0 * std::numbers::pi / c.nu;
    IntegratorSpec is = spec;
    is.step = std::min(spec.step, T_lin / 200.0);
    auto field = [&p](double, const Vec4& y) {
        return ring_velocity(RingPairState::from_array(y), p);
    };
    TrialOrbit out;
    const auto full = rk4_integrate<4>(field, q0.as_array(), 0.0, 1.5 * T_lin, is, 1);
    if (full.aborted) throw ConvergenceError("center_manifold_seed: trial orbit hit a singularity");
    const std::size_t n = full.t.size();
    std::size_t k = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (full.t[i] < 0.5 * T_lin) continue;
        const double a = full.y[i][0] - c.s1_hat, b = full.y[i + 1][0] - c.s1_hat;
        if (a < 0.0 && b >= 0.0) {
            k = i;
            break;
        }
    }
    if (k == 0) throw ConvergenceError("center_manifold_seed: no return of s1 within 1.5 periods");
    // Refine the crossing with Hermite interpolation.
    const Vec4 d0 = field(0.0, full.y[k]), d1 = field(0.0, full.y[k + 1]);
    double lo = full.t[k], hi = full.t[k + 1];
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = hermite(full.t[k], full.t[k + 1], full.y[k][0], full.y[k + 1][0], d0[0],
                                 d1[0], mid) - c.s1_hat;
        (v < 0.0 ? lo : hi) = mid;
    }
    out.period = 0.5 * (lo + hi);
    // Re-run exactly one period so the stored orbit ends on the crossing.
    out.path = rk4_integrate<4>(field, q0.as_array(), 0.0, out.period, is, 1);
    const auto& y = out.path.y;
    const double drift = y.back()[2] - y.front()[2];
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        const double ta = out.path.t[i], tb = out.path.t[i + 1];
        const double fa = y[i][2] - drift * ta / out.period - c.xi_hat;
        const double fb = y[i + 1][2] - drift * tb / out.period - c.xi_hat;
        acc += 0.5 * (tb - ta) * (fa + fb);
    }
    out.mean_offset = acc / out.period;
    return out;
}

}  // namespace

CenterManifoldSeed center_manifold_seed(const EquilibriumConfig& c, const ModelParams& p,
                                        double mu, const IntegratorSpec& spec) {
    check_amplitude(c, mu);
    if (mu == 0.0) throw DomainError("center_manifold_seed: mu must be nonzero");
    const double psi1 = c.x_gain * mu;
    const double psi_lin = c.x_gain * (c.A / c.B) * mu;
    double lo = 0.5 * psi_lin, hi = 1.5 * psi_lin;
    if (lo > hi) std::swap(lo, hi);
    auto state_for = [&](double psi2) {
        return RingPairState{c.s1_hat, c.s2_hat, c.xi_hat + psi1, c.xi_hat + psi2};
    };
    const double g_lo = trial_orbit(state_for(lo), c, p, spec).mean_offset;
    const double g_hi = trial_orbit(state_for(hi), c, p, spec).mean_offset;
    if (!(g_lo * g_hi < 0.0))
        throw ConvergenceError("center_manifold_seed: no sign change of the mean axial offset "
                               "in the psi2 window");
    double flo = g_lo;
    int it = 0;
    TrialOrbit best;
    double psi2 = 0.5 * (lo + hi);
    for (; it < 200; ++it) {
        psi2 = 0.5 * (lo + hi);
        best = trial_orbit(state_for(psi2), c, p, spec);
        const double g = best.mean_offset;
        if (g == 0.0 || (hi - lo) < 1e-13 * std::abs(psi1) ||
            std::abs(g) < 1e-12 * std::abs(psi1))
            break;
        if ((g < 0.0) == (flo < 0.0)) {
            lo = psi2;
            flo = g;
        } else {
            hi = psi2;
        }
    }
    CenterManifoldSeed out;
    out.state = state_for(psi2);
    out.psi1 = psi1;
    out.psi2 = psi2;
    out.ratio = psi2 / psi1;
    out.period = best.period;
    out.iterations = it + 1;
    const auto& y = best.path.y;
    out.drift1 = y.back()[2] - y.front()[2];
    out.drift2 = y.back()[3] - y.front()[3];
    // Closure in the reduced coordinates (s1, s2, x1 - x2), scaled per component.
    double gap2 = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
        auto val = [&](const Vec4& v) { return comp < 2 ? v[comp] : v[2] - v[3]; };
        double m = 0.0, m2 = 0.0;
        for (const auto& v : y) {
            m += val(v);
            m2 += val(v) * val(v);
        }
        m /= y.size();
        const double sd = std::sqrt(std::max(m2 / y.size() - m * m, 1e-300));
        const double d = (val(y.back()) - val(y.front())) / sd;
        gap2 += d * d;
    }
    out.closure_gap = std::sqrt(gap2);
    double smin = y.front()[0], smax = smin;
    for (const auto& v : y) {
        smin = std::min(smin, v[0]);
        smax = std::max(smax, v[0]);
    }
    out.diameter = smax - smin;
    out.orbit = best.path;
    return out;
}

RingMotion::RingMotion(const EquilibriumConfig& c, const ModelParams& p,
                       const OscillationSpec& spec, const IntegratorSpec& ispec)
    : c_(c), p_(p), spec_(spec) {
    check_amplitude(c, spec.mu);
    if (spec.mode == MotionMode::integrated && spec.mu != 0.0) {
        seed_ = std::make_shared<CenterManifoldSeed>(center_manifold_seed(c, p, spec.mu, ispec));
        path_ = std::make_shared<RingPath>(seed_->orbit, p);
    }
}

RingPairState RingMotion::operator()(double t) const {
    if (!path_) return ring_motion_analytic(t, c_, p_, spec_);
    const double T = seed_->period;
    const double tt = t + spec_.phase / c_.nu;
    const double k = std::floor(tt / T);
    double tau = tt - k * T;
    tau = std::clamp(tau, 0.0, T);
    RingPairState q = (*path_)(tau);
    q.x1 += k * seed_->drift1;
    q.x2 += k * seed_->drift2;
    return q;
}

RingPairState ring_motion(double t, const EquilibriumConfig& c, const ModelParams& p,
                          const OscillationSpec& spec) {
    if (spec.mode == MotionMode::analytic) return ring_motion_analytic(t, c, p, spec);
    return RingMotion(c, p, spec)(t);
}

H1Parts h1_parts(const ParticleState& q, const EquilibriumConfig& c, const ModelParams& p) {
    H1Parts out;
    if (!(q.s > 0.0)) return out;
    const double r = std::sqrt(q.s);
    const double dx = q.x - c.xi_hat;
    const double rk[2] = {c.r1_hat, c.r2_hat};
    const double w[2] = {c.r1_hat, p.kappa * (c.A / c.B) * c.r2_hat};
    double S = 0.0, C = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double a = rk[k];
        const auto v = sigma_integrate<2>(r, a, dx, p.quad, [&](const SigmaPoint& sp) {
            const double d32 = inv_pow(sp.delta, KernelPower::three_halves);
            const double N = r * (r - a) + dx * dx + 2.0 * r * a * sp.sin2;
            return std::array<double, 2>{sp.cos2 * N * d32, sp.cos2 * d32};
        });
        const double sign = k == 0 ? -1.0 : 1.0;
        S += sign * v[0] / a;
        C += w[k] * v[1];
    }
    out.S = 2.0 * r * S;
    out.C = -4.0 * r * c.x_gain * dx * C;
    return out;
}

double h1_perturbation(const ParticleState& q, double t, const EquilibriumConfig& c,
                       const ModelParams& p) {
    const H1Parts h = h1_parts(q, c, p);
    return h.S * std::sin(c.nu * t) + h.C * std::cos(c.nu * t);
}

std::vector<StagnationSample> stagnation_trace(const EquilibriumConfig& c, const ModelParams& p,
                                               const OscillationSpec& spec,
                                               const std::vector<double>& t_grid,
                                               Execution exec) {
    const RingMotion motion(c, p, spec);
    std::vector<StagnationSample> out(t_grid.size());
    parallel_for(t_grid.size(), exec, [&](std::size_t i) {
        const double t = t_grid[i];
        const RingPairState q = motion(t);
        const double r1 = std::sqrt(q.s1), r2 = std::sqrt(q.s2);
        auto f = [&](double x) {
            double v = p.swirl_axial(0.0);
            for (int k = 0; k < 2; ++k) {
                const double rk = k == 0 ? r1 : r2;
                const double d = x - (k == 0 ? q.x1 : q.x2);
                const double D = rk * rk + d * d;
                v += std::numbers::pi * p.kappa_of(k + 1) * rk * rk / (D * std::sqrt(D));
            }
            return v;
        };
        const double right = std::max(q.x1, q.x2), left = std::min(q.x1, q.x2);
        const double reach = 20.0 * c.eta + 1.0;
        if (!(f(right) > 0.0) || !(f(left) > 0.0) || !(f(right + reach) < 0.0) ||
            !(f(left - reach) < 0.0))
            throw NoStagnationError("stagnation_trace: lost a stagnation point at t = " +
                                    std::to_string(t));
        const double tol = 1e-15 * (std::abs(c.xi_hat) + c.eta);
        const double xp = find_root(f, RootBracket{right, right + reach}, tol).x;
        const double xm = find_root(f, RootBracket{left - reach, left}, tol).x;
        const double centre = spec.mode == MotionMode::analytic ? c.xi_hat : 0.5 * (left + right);
        if (!(xm < centre && centre < xp))
            throw NoStagnationError("stagnation_trace: ordering x- < xi < x+ violated");
        out[i] = {t, xm, xp};
    });
    return out;
}

}  // namespace ringlab
