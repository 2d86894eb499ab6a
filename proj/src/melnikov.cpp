#include "ringlab/melnikov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ringlab {

ThetaValues theta_at(const ParticleState& q, const EquilibriumConfig& c, const ModelParams& p) {
    ThetaValues out;
    if (!(q.s > 0.0)) throw DomainError("theta_at: s must be positive");
    const double r = std::sqrt(q.s);
    const double dx = q.x - c.xi_hat;
    const double beta = c.x_gain;
    const double rk[2] = {c.r1_hat, c.r2_hat};
    const double w[2] = {c.r1_hat, p.kappa * (c.A / c.B) * c.r2_hat};
    for (int k = 0; k < 2; ++k) {
        const double a = rk[k];
        const auto v = sigma_integrate<4>(r, a, dx, p.quad, [&](const SigmaPoint& sp) {
            const double cc = sp.cos2;
            const double D = sp.delta;
            const double d52 = inv_pow(D, KernelPower::five_halves);
            const double N = r * (r - a) + dx * dx + 2.0 * r * a * sp.sin2;
            const double lin = r - a * cc;
            return std::array<double, 4>{
                cc * ((N + r * (2.0 * r - a * cc)) * D - 3.0 * r * N * lin) * d52,
                cc * (D - 3.0 * r * lin) * d52,
                cc * (2.0 * D - 3.0 * N) * d52,
                cc * (D - 3.0 * dx * dx) * d52};
        });
        const double sign = k == 0 ? -1.0 : 1.0;
        out.theta1 += sign * v[0] / (r * a);
        out.theta2 += -2.0 * beta * dx / r * w[k] * v[1];
        out.theta3 += dx * sign * v[2] / a;
        out.theta4 += -2.0 * beta * w[k] * v[3];
    }
    return out;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

template <class F>
double integrate(F&& f, double a, double b, double tol) {
    double err = 0.0;
    return GK::integrate(f, a, b, 15, tol, &err);
}

}  // namespace

MelnikovContext::MelnikovContext(const EquilibriumConfig& c, const ModelParams& p,
                                 const MelnikovOptions& opt)
    : c_(c), p_(p), opt_(opt) {
    if (!c.ring_center) throw DomainError("Melnikov analysis needs a center-type ring equilibrium");
    const auto fps = classify_fixed_points(c, p);
    const FixedPoint& pp = fps.front();
    const double lam = pp.lambda_unstable;
    const double T_req = opt.truncation_T > 0.0 ? opt.truncation_T : 12.0 / lam;
    // Seed close enough to p₊ that the traced half covers the window with margin.
    const double cover = 1.25 * T_req + 1.0 / lam;
    const double scale = std::max(c.eta, 1e-300);
    const double offset = std::max(scale * std::exp(-lam * cover), 1e-15 * std::max(1.0, std::abs(c.x_plus)));
    const double m = pp.tangent_slope;
    const double n = std::hypot(1.0, m);
    const ParticleState start{offset / n, c.x_plus + offset * m / n};
    const RingPairState rings = c.ring_state();

    auto field = [&](double, const Vec2& y) { return particle_velocity({y[0], y[1]}, rings, p); };
    bool crossed = false, escaped = false;
    auto stop = [&](double, const Vec2& y) {
        if (y[1] < c.xi_hat) crossed = true;
        if (y[0] > 100.0 * std::max(c.s1_hat, c.s2_hat) || y[1] > c.x_plus + 20.0 * c.eta)
            escaped = true;
        return crossed || escaped;
    };
    std::vector<double> ts{0.0};
    std::vector<ParticleState> qs{start};
    Vec2 y{start.s, start.x};
    double t = 0.0;
    const double max_time = std::max(opt.spec.max_time, 1.0);
    while (!crossed && !escaped && t < max_time) {
        const auto seg = rk4_integrate<2>(field, y, t, std::min(t + 5.0, max_time), opt.spec, 1, stop);
        for (std::size_t i = 1; i < seg.t.size(); ++i) {
            ts.push_back(seg.t[i]);
            qs.push_back({seg.y[i][0], seg.y[i][1]});
        }
        if (seg.aborted && seg.abort_reason != "stop condition")
            throw TraceError("upper separatrix hit a singularity: " + seg.abort_reason);
        y = seg.back();
        t = seg.t.back();
    }
    if (!crossed) throw TraceError("upper separatrix does not cross x = xi (no heteroclinic cycle)");

    // Crossing time by bisection on the Hermite interpolant of the last step.
    const std::size_t k = ts.size() - 2;
    const Vec2 d0 = field(0.0, {qs[k].s, qs[k].x}), d1 = field(0.0, {qs[k + 1].s, qs[k + 1].x});
    double lo = ts[k], hi = ts[k + 1];
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double x = hermite(ts[k], ts[k + 1], qs[k].x, qs[k + 1].x, d0[1], d1[1], mid);
        (x > c.xi_hat ? lo : hi) = mid;
    }
    const double tc = 0.5 * (lo + hi);
    const ParticleState mid{hermite(ts[k], ts[k + 1], qs[k].s, qs[k + 1].s, d0[0], d1[0], tc), c.xi_hat};

    // Assemble the symmetric trace.
    std::vector<double> half_t;
    std::vector<ParticleState> half_q;
    for (std::size_t i = 0; i <= k; ++i) {
        if (tc - ts[i] <= 1e-12) break;
        half_t.push_back(ts[i] - tc);
        half_q.push_back(qs[i]);
    }
    trace_.branch = Branch::upper;
    for (std::size_t i = 0; i < half_t.size(); ++i) {
        trace_.t.push_back(half_t[i]);
        trace_.samples.push_back(half_q[i]);
    }
    trace_.t.push_back(0.0);
    trace_.samples.push_back(mid);
    for (std::size_t i = half_t.size(); i-- > 0;) {
        trace_.t.push_back(-half_t[i]);
        trace_.samples.push_back({half_q[i].s, 2.0 * c.xi_hat - half_q[i].x});
    }
    trace_.velocity.resize(trace_.samples.size());
    for (std::size_t i = 0; i < trace_.samples.size(); ++i)
        trace_.velocity[i] = particle_velocity(trace_.samples[i], rings, p);
    trace_.complete = true;

    // Decay rate from the log-linear growth of the distance to p₊.
    {
        double dmax = 0.0;
        for (std::size_t i = 0; i < half_q.size(); ++i)
            dmax = std::max(dmax, std::hypot(half_q[i].s, half_q[i].x - c.x_plus));
        std::vector<double> tt, lv;
        for (std::size_t i = 0; i < half_q.size(); ++i) {
            const double d = std::hypot(half_q[i].s, half_q[i].x - c.x_plus);
            if (d < 1e-3 * dmax && d > 0.0) {
                tt.push_back(half_t[i]);
                lv.push_back(std::log(d));
            }
        }
        double mt = 0, ml = 0;
        for (std::size_t i = 0; i < tt.size(); ++i) {
            mt += tt[i];
            ml += lv[i];
        }
        mt /= tt.size();
        ml /= tt.size();
        double stt = 0, stl = 0;
        for (std::size_t i = 0; i < tt.size(); ++i) {
            stt += (tt[i] - mt) * (tt[i] - mt);
            stl += (tt[i] - mt) * (lv[i] - ml);
        }
        decay_rate_ = tt.size() > 4 && stt > 0.0 ? stl / stt : lam;
        trace_.decay_rate = trace_.decay_rate_front = trace_.decay_rate_back = decay_rate_;
    }

    T_ = opt.truncation_T > 0.0 ? opt.truncation_T : 12.0 / decay_rate_;
    if (T_ > -trace_.t.front())
        throw RangeError("Melnikov window exceeds the traced separatrix; reduce truncation_T");

    const double nu = c.nu;
    auto f = [&](double s) {
        const auto F = integrand_parts(s);
        return F[0] * std::sin(nu * s) + F[1] * std::cos(nu * s);
    };
    K_ = 2.0 * integrate(f, 0.0, T_, opt.rel_tol);
    // Moments {F1 sin, F1 cos, F2 sin, F2 cos} on [-T, 0] and [0, T].
    for (int h = 0; h < 2; ++h) {
        const double a = h == 0 ? -T_ : 0.0, b = h == 0 ? 0.0 : T_;
        for (int j = 0; j < 4; ++j) {
            auto g = [&, j](double s) {
                const auto F = integrand_parts(s);
                const double w = (j % 2 == 0) ? std::sin(nu * s) : std::cos(nu * s);
                return F[j / 2] * w;
            };
            moments_[h][j] = integrate(g, a, b, opt.rel_tol);
        }
    }
    const auto FT = integrand_parts(T_);
    // ∫_T^∞ e^{-ϰt} e^{iνt} dt has modulus e^{-ϰT} / |ϰ - iν|.
    tail_ = 2.0 * (std::abs(FT[0]) + std::abs(FT[1])) / std::hypot(decay_rate_, nu);
    if (tail_ > opt.tail_tolerance * std::abs(K_))
        throw TruncationError("Melnikov tail estimate " + std::to_string(tail_) +
                              " exceeds tolerance; increase truncation_T");
}

ThetaValues MelnikovContext::theta_profiles(double t) const {
    return theta_at(trace_.at(t), c_, p_);
}

std::array<double, 2> MelnikovContext::integrand_parts(double t) const {
    const ParticleState q = trace_.at(t);
    if (!(q.s > 0.0)) return {0.0, 0.0};
    const Vec2 v = particle_velocity(q, c_.ring_state(), p_);
    const ThetaValues th = theta_at(q, c_, p_);
    const double r2 = 2.0 * std::sqrt(q.s);
    return {v[0] * th.theta1 + r2 * v[1] * th.theta3, v[0] * th.theta2 + r2 * v[1] * th.theta4};
}

double MelnikovContext::melnikov(double tau) const { return K_ * std::cos(c_.nu * tau); }

double MelnikovContext::melnikov_full(double tau) const {
    // ∫ F1 sin ν(t+τ) + F2 cos ν(t+τ) expanded into half-line moments of
    // F1, F2 against sin νt, cos νt; no parity of Θ or φ_u is assumed.
    const auto& m = moments_;
    const double ct = std::cos(c_.nu * tau), st = std::sin(c_.nu * tau);
    double total = 0.0;
    for (int h = 0; h < 2; ++h)
        total += ct * (m[h][0] + m[h][3]) + st * (m[h][1] - m[h][2]);
    return total;
}

double melnikov(double tau, const EquilibriumConfig& c, const ModelParams& p,
                const MelnikovOptions& opt) {
    return MelnikovContext(c, p, opt).melnikov(tau);
}

MelnikovResult melnikov_sweep(const MelnikovContext& ctx, int n_tau, Execution exec) {
    if (n_tau < 16) throw ConfigError("melnikov_sweep: need at least 16 tau samples");
    const double nu = ctx.config().nu;
    const double period = 2.0 * std::numbers::pi / nu;
    MelnikovResult out;
    out.tau_grid.resize(n_tau);
    out.values.resize(n_tau);
    out.values_reduced.resize(n_tau);
    for (int i = 0; i < n_tau; ++i) out.tau_grid[i] = period * i / n_tau;
    parallel_for(static_cast<std::size_t>(n_tau), exec, [&](std::size_t i) {
        out.values[i] = ctx.melnikov_full(out.tau_grid[i]);
        out.values_reduced[i] = ctx.melnikov(out.tau_grid[i]);
    });
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < n_tau; ++i) samples.push_back({out.tau_grid[i], out.values[i]});
    const CosineFit fit = fit_cosine(samples, nu);
    out.C = fit.C;
    out.phase = fit.phase;
    out.rms_residual = fit.rms_residual;
    out.truncation_T = ctx.truncation_T();
    out.tail_estimate = ctx.tail_estimate();
    out.decay_rate = ctx.decay_rate();
    for (int i = 0; i < n_tau; ++i)
        out.max_form_gap = std::max(out.max_form_gap, std::abs(out.values[i] - out.values_reduced[i]));
    if (out.C != 0.0) out.max_form_gap /= std::abs(out.C);
    for (int i = 0; i < n_tau; ++i) {
        const int j = (i + 1) % n_tau;
        const double a = out.values[i], b = out.values[j];
        if (a == 0.0) {
            out.zeros.push_back(out.tau_grid[i]);
        } else if (a * b < 0.0) {
            const double tb = j == 0 ? period : out.tau_grid[j];
            out.zeros.push_back(out.tau_grid[i] + (tb - out.tau_grid[i]) * a / (a - b));
        }
    }
    out.form_violation = out.rms_residual > 0.05 * std::abs(out.C);
    return out;
}

MelnikovResult melnikov_sweep(const EquilibriumConfig& c, const ModelParams& p,
                              const MelnikovOptions& opt) {
    const MelnikovContext ctx(c, p, opt);
    return melnikov_sweep(ctx, opt.n_tau, opt.exec);
}

}  // namespace ringlab
