#include "ringlab/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ringlab {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

Vec2 particle_velocity(const ParticleState& q, const RingPairState& rings, const ModelParams& p) {
    const double rk[2] = {std::sqrt(rings.s1), std::sqrt(rings.s2)};
    const double xk[2] = {rings.x1, rings.x2};
    if (!(q.s > 0.0)) {
        // Axis limit: the r-factor kills ṡ and the σ-integral becomes elementary.
        double v = p.swirl_axial(0.0);
        for (int k = 0; k < 2; ++k) {
            const double d = q.x - xk[k];
            const double D = rk[k] * rk[k] + d * d;
            v += pi * p.kappa_of(k + 1) * rk[k] * rk[k] / (D * std::sqrt(D));
        }
        return {0.0, v};
    }
    const double r = std::sqrt(q.s);
    double sdot = 0.0, xdot = p.swirl_axial(q.s);
    for (int k = 0; k < 2; ++k) {
        const double dx = q.x - xk[k];
        const double a = rk[k];
        const auto w = sigma_integrate<2>(r, a, dx, p.quad, [&](const SigmaPoint& sp) {
            const double d32 = inv_pow(sp.delta, KernelPower::three_halves);
            return std::array<double, 2>{sp.cos2 * d32, ((a - r) + 2.0 * r * sp.sin2) * d32};
        });
        const double kk = p.kappa_of(k + 1);
        sdot += 4.0 * r * kk * a * dx * w[0];
        xdot += 2.0 * kk * a * w[1];
    }
    return {sdot, xdot};
}

double stream_hamiltonian(const ParticleState& q, const RingPairState& rings,
                          const ModelParams& p) {
    double h = p.swirl_potential(q.s);
    if (!(q.s > 0.0)) return h;
    const double r = std::sqrt(q.s);
    const double rk[2] = {std::sqrt(rings.s1), std::sqrt(rings.s2)};
    const double xk[2] = {rings.x1, rings.x2};
    for (int k = 0; k < 2; ++k)
        h -= 4.0 * r * p.kappa_of(k + 1) * rk[k] * cos2_half_kernel(r, rk[k], q.x - xk[k], p.quad);
    return h;
}

double stream_hamiltonian0(const ParticleState& q, const EquilibriumConfig& c,
                           const ModelParams& p) {
    return stream_hamiltonian(q, c.ring_state(), p);
}

double coupled_hamiltonian(const ParticleState& q, const RingPairState& rings,
                           const ModelParams& p) {
    return hamiltonian(rings, p) + stream_hamiltonian(q, rings, p);
}

double core_distance_sq(const ParticleState& q, const RingPairState& rings) {
    const double r = std::sqrt(std::max(q.s, 0.0));
    const double d1 = (r - std::sqrt(rings.s1)), e1 = q.x - rings.x1;
    const double d2 = (r - std::sqrt(rings.s2)), e2 = q.x - rings.x2;
    return std::min(d1 * d1 + e1 * e1, d2 * d2 + e2 * e2);
}

RingSource fixed_rings(const RingPairState& rings) {
    return [rings](double) { return rings; };
}

RingPath::RingPath(const Trajectory<4>& path, const ModelParams& p)
    : t_(path.t), y_(path.y) {
    if (t_.size() < 2) throw DomainError("RingPath: need at least two samples");
    dy_.reserve(y_.size());
    for (const auto& y : y_) dy_.push_back(ring_velocity(RingPairState::from_array(y), p));
}

RingPairState RingPath::operator()(double t) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(t_.back()));
    if (t < t_.front() - tol || t > t_.back() + tol)
        throw RangeError("RingPath: time outside the stored trajectory");
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    if (i + 1 >= t_.size()) i = t_.size() - 2;
    Vec4 out;
    for (int k = 0; k < 4; ++k)
        out[k] = hermite(t_[i], t_[i + 1], y_[i][k], y_[i + 1][k], dy_[i][k], dy_[i + 1][k], t);
    return RingPairState::from_array(out);
}

ParticleTrajectory advect_particle(const ParticleState& p0, const RingSource& rings,
                                   const ModelParams& p, double t0, double t1,
                                   const IntegratorSpec& spec, const AdvectionOptions& opt) {
    auto field = [&](double t, const Vec2& y) {
        return particle_velocity({y[0], y[1]}, rings(t), p);
    };
    bool hit = false;
    auto stop = [&](double t, const Vec2& y) {
        hit = core_distance_sq({y[0], y[1]}, rings(t)) < opt.core_stop_sq;
        return hit;
    };
    ParticleTrajectory out;
    if (core_distance_sq(p0, rings(t0)) < opt.core_stop_sq) {
        out.path.t = {t0};
        out.path.y = {Vec2{p0.s, p0.x}};
        out.path.aborted = true;
        out.path.abort_time = t0;
        out.path.abort_reason = "entered a ring core";
        out.near_core = true;
        return out;
    }
    out.path = rk4_integrate<2>(field, Vec2{p0.s, p0.x}, t0, t1, spec, opt.stride, stop);
    out.near_core = hit || (out.path.aborted && out.path.abort_reason != "stop condition");
    if (hit) out.path.abort_reason = "entered a ring core";
    return out;
}

Vec6 coupled_velocity(const Vec6& y, const ModelParams& p) {
    const RingPairState rings{y[0], y[1], y[2], y[3]};
    const Vec4 rv = ring_velocity(rings, p);
    const Vec2 pv = particle_velocity({y[4], y[5]}, rings, p);
    return {rv[0], rv[1], rv[2], rv[3], pv[0], pv[1]};
}

CoupledTrajectory advect_coupled(const ParticleState& p0, const RingPairState& rings0,
                                 const ModelParams& p, double t0, double t1,
                                 const IntegratorSpec& spec, long stride) {
    auto field = [&](double, const Vec6& y) { return coupled_velocity(y, p); };
    const Vec6 y0{rings0.s1, rings0.s2, rings0.x1, rings0.x2, p0.s, p0.x};
    CoupledTrajectory out;
    out.path = rk4_integrate<6>(field, y0, t0, t1, spec, stride);
    const double H0 = hamiltonian(rings0, p), G0 = invariant_G(rings0, p);
    for (const auto& y : out.path.y) {
        const RingPairState q{y[0], y[1], y[2], y[3]};
        out.H_drift = std::max(out.H_drift, std::abs(hamiltonian(q, p) - H0) / std::abs(H0));
        out.G_drift = std::max(out.G_drift, std::abs(invariant_G(q, p) - G0) / std::abs(G0));
    }
    return out;
}

const char* to_string(Branch b) {
    switch (b) {
        case Branch::upper: return "upper";
        case Branch::lower: return "lower";
        case Branch::homoclinic_plus: return "homoclinic_plus";
        case Branch::homoclinic_minus: return "homoclinic_minus";
    }
    return "upper";
}

ParticleState SeparatrixTrace::at(double time) const {
    if (t.size() < 2 || time < t.front() || time > t.back())
        throw RangeError("separatrix interpolation outside the traced interval");
    auto it = std::upper_bound(t.begin(), t.end(), time);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    if (i + 1 >= t.size()) i = t.size() - 2;
    return {hermite(t[i], t[i + 1], samples[i].s, samples[i + 1].s, velocity[i][0],
                    velocity[i + 1][0], time),
            hermite(t[i], t[i + 1], samples[i].x, samples[i + 1].x, velocity[i][1],
                    velocity[i + 1][1], time)};
}

namespace {

double dist(const ParticleState& a, const ParticleState& b) {
    return std::hypot(a.s - b.s, a.x - b.x);
}

struct Box {
    double s_max, x_lo, x_hi;
};

// Integrates from `start` until within capture radius of `target` (after
// having left the start by more than `departure`), leaving the box, hitting
// a core, or running out of time.
void run_trace(SeparatrixTrace& tr, const ParticleState& start, const ParticleState& target,
               double departure, const Box& box, const EquilibriumConfig& c,
               const ModelParams& p, const SeparatrixOptions& opt) {
    const RingPairState rings = c.ring_state();
    auto field = [&](double, const Vec2& y) { return particle_velocity({y[0], y[1]}, rings, p); };
    bool left = false, done = false, fail = false;
    auto stop = [&](double, const Vec2& y) {
        const ParticleState q{y[0], y[1]};
        if (!left && dist(q, start) > departure) left = true;
        if (left && dist(q, target) < opt.capture_radius) {
            done = true;
            return true;
        }
        if (q.s > box.s_max || q.x < box.x_lo || q.x > box.x_hi ||
            core_distance_sq(q, rings) < 1e-10) {
            fail = true;
            return true;
        }
        return false;
    };
    tr.t.assign(1, 0.0);
    tr.samples.assign(1, start);
    Vec2 y{start.s, start.x};
    double t = 0.0;
    const double chunk = 5.0;
    while (t < opt.max_time && !done && !fail) {
        const double t1 = std::min(t + chunk, opt.max_time);
        const auto seg = rk4_integrate<2>(field, y, t, t1, opt.spec, 1, stop);
        for (std::size_t i = 1; i < seg.t.size(); ++i) {
            tr.t.push_back(seg.t[i]);
            tr.samples.push_back({seg.y[i][0], seg.y[i][1]});
        }
        if (seg.aborted && seg.abort_reason != "stop condition") fail = true;
        y = seg.back();
        t = seg.t.back();
    }
    tr.complete = done;
    tr.miss_distance = dist(tr.samples.back(), target);
    tr.velocity.resize(tr.samples.size());
    for (std::size_t i = 0; i < tr.samples.size(); ++i)
        tr.velocity[i] = particle_velocity(tr.samples[i], rings, p);
}

struct LogFit {
    double rate = 0.0, r2 = 0.0;
};

LogFit log_linear_fit(const std::vector<double>& t, const std::vector<double>& v) {
    LogFit f;
    const std::size_t n = t.size();
    if (n < 5) return f;
    double mt = 0, mv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        mv += std::log(v[i]);
    }
    mt /= n;
    mv /= n;
    double stt = 0, stv = 0, svv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = t[i] - mt, b = std::log(v[i]) - mv;
        stt += a * a;
        stv += a * b;
        svv += b * b;
    }
    if (stt == 0.0 || svv == 0.0) return f;
    f.rate = stv / stt;
    f.r2 = stv * stv / (stt * svv);
    return f;
}

// End-segment decay fits on the distance to the fixed points at each end.
void fit_decay(SeparatrixTrace& tr, const ParticleState& from, const ParticleState& to) {
    double dmax = 0.0;
    for (const auto& q : tr.samples) dmax = std::max(dmax, std::min(dist(q, from), dist(q, to)));
    const double cut = 1e-3 * dmax;
    std::vector<double> tf, vf, tb, vb;
    const double tmid = 0.5 * (tr.t.front() + tr.t.back());
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const double df = dist(tr.samples[i], from), db = dist(tr.samples[i], to);
        if (tr.t[i] < tmid && df < cut && df > 0.0) {
            tf.push_back(tr.t[i]);
            vf.push_back(df);
        } else if (tr.t[i] > tmid && db < cut && db > 0.0) {
            tb.push_back(tr.t[i]);
            vb.push_back(db);
        }
    }
    const LogFit a = log_linear_fit(tf, vf), b = log_linear_fit(tb, vb);
    tr.decay_rate_front = std::abs(a.rate);
    tr.decay_rate_back = std::abs(b.rate);
    tr.decay_rate = 0.5 * (tr.decay_rate_front + tr.decay_rate_back);
    tr.decay_r2 = std::min(a.r2, b.r2);
}

void fill_levels(SeparatrixTrace& tr, double level, const EquilibriumConfig& c,
                 const ModelParams& p) {
    tr.level = level;
    tr.level_spread = 0.0;
    const RingPairState rings = c.ring_state();
    for (const auto& q : tr.samples)
        tr.level_spread = std::max(tr.level_spread, std::abs(stream_hamiltonian(q, rings, p) - level));
}

// Shift time so that t = 0 where x crosses ξ̂.
void centre_time(SeparatrixTrace& tr, double xi) {
    for (std::size_t i = 0; i + 1 < tr.samples.size(); ++i) {
        const double a = tr.samples[i].x - xi, b = tr.samples[i + 1].x - xi;
        if (a == 0.0 || a * b < 0.0) {
            double lo = tr.t[i], hi = tr.t[i + 1];
            for (int k = 0; k < 100; ++k) {
                const double mid = 0.5 * (lo + hi);
                if ((tr.at(mid).x - xi) * a > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double tc = 0.5 * (lo + hi);
            for (double& t : tr.t) t -= tc;
            return;
        }
    }
}

const FixedPoint& find_fixed(const std::vector<FixedPoint>& fps, const std::string& label) {
    for (const auto& f : fps)
        if (f.label == label) return f;
    throw DomainError("missing fixed point " + label);
}

}  // namespace

SeparatrixTrace trace_upper_branch(const EquilibriumConfig& c, const ModelParams& p,
                                   const SeparatrixOptions& opt) {
    const auto fps = classify_fixed_points(c, p);
    const FixedPoint& pp = find_fixed(fps, "p_plus");
    const double m = pp.tangent_slope;
    const double n = std::hypot(1.0, m);
    const ParticleState start{opt.seed_offset / n, c.x_plus + opt.seed_offset * m / n};
    const ParticleState target{0.0, c.x_minus};
    const Box box{50.0 * std::max(c.s2_hat, c.s1_hat), c.x_minus - 20.0 * c.eta,
                  c.x_plus + 20.0 * c.eta};
    SeparatrixTrace tr;
    tr.branch = Branch::upper;
    run_trace(tr, start, target, 10.0 * opt.capture_radius, box, c, p, opt);
    if (!tr.complete && !opt.allow_partial)
        throw TraceError("upper separatrix did not reconnect to p_minus (miss " +
                         std::to_string(tr.miss_distance) + ")");
    centre_time(tr, c.xi_hat);
    fit_decay(tr, {0.0, c.x_plus}, target);
    fill_levels(tr, stream_hamiltonian0({0.0, c.x_plus}, c, p), c, p);
    // s_u(-t) = s_u(t) on the common window.
    const double tmax = std::min(-tr.t.front(), tr.t.back());
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const double t = tr.t[i];
        if (t <= 0.0 || t > tmax) continue;
        tr.symmetry_residual =
            std::max(tr.symmetry_residual, std::abs(tr.samples[i].s - tr.at(-t).s));
    }
    return tr;
}

std::vector<SeparatrixTrace> trace_separatrices(const EquilibriumConfig& c, const ModelParams& p,
                                                const SeparatrixOptions& opt) {
    std::vector<SeparatrixTrace> out;
    out.push_back(trace_upper_branch(c, p, opt));

    {  // lower branch on the axis, p₋ → p₊
        SeparatrixTrace tr;
        tr.branch = Branch::lower;
        const ParticleState start{0.0, c.x_minus + opt.seed_offset};
        const ParticleState target{0.0, c.x_plus};
        const Box box{1.0, c.x_minus - c.eta, c.x_plus + c.eta};
        run_trace(tr, start, target, 10.0 * opt.capture_radius, box, c, p, opt);
        centre_time(tr, c.xi_hat);
        fit_decay(tr, {0.0, c.x_minus}, target);
        fill_levels(tr, 0.0, c, p);
        out.push_back(tr);
    }

    const auto fps = classify_fixed_points(c, p);
    const FixedPoint& q = find_fixed(fps, "q");
    const double m = q.tangent_slope;
    const double n = std::hypot(1.0, m);
    const ParticleState qs{c.s_hat, c.xi_hat};
    const double level = stream_hamiltonian0(qs, c, p);
    const double span = std::max(c.s1_hat, c.s2_hat);
    for (int sgn : {+1, -1}) {
        SeparatrixTrace tr;
        tr.branch = sgn > 0 ? Branch::homoclinic_plus : Branch::homoclinic_minus;
        const ParticleState start{c.s_hat + sgn * opt.seed_offset / n,
                                  c.xi_hat + sgn * opt.seed_offset * m / n};
        const Box box{10.0 * span, c.x_minus - 10.0 * c.eta, c.x_plus + 10.0 * c.eta};
        run_trace(tr, start, qs, 100.0 * opt.capture_radius, box, c, p, opt);
        fit_decay(tr, qs, qs);
        fill_levels(tr, level, c, p);
        out.push_back(tr);
    }
    return out;
}

Streamline trace_streamline(int id, const ParticleState& seed, const EquilibriumConfig& c,
                            const ModelParams& p, const PortraitOptions& opt) {
    const RingPairState rings = c.ring_state();
    const double s_scale = std::max(c.s1_hat, c.s2_hat), x_scale = c.eta;
    auto ndist = [&](const Vec2& y) {
        return std::hypot((y[0] - seed.s) / s_scale, (y[1] - seed.x) / x_scale);
    };
    bool away = false;
    std::string reason;
    auto field = [&](double, const Vec2& y) { return particle_velocity({y[0], y[1]}, rings, p); };
    auto stop = [&](double, const Vec2& y) {
        const double d = ndist(y);
        if (d > 5e-2) away = true;
        if (away && d < 5e-3) {
            reason = "closed";
            return true;
        }
        if (core_distance_sq({y[0], y[1]}, rings) < 1e-10) {
            reason = "entered a ring core";
            return true;
        }
        if (y[0] > 8.0 * s_scale || y[1] < c.x_minus - 6.0 * c.eta ||
            y[1] > c.x_plus + 6.0 * c.eta) {
            reason = "left the domain";
            return true;
        }
        return false;
    };
    const auto tr = rk4_integrate<2>(field, Vec2{seed.s, seed.x}, 0.0, opt.t_max, opt.spec,
                                     opt.stride, stop);
    Streamline sl;
    sl.seed_id = id;
    sl.seed = seed;
    sl.t = tr.t;
    sl.samples.reserve(tr.y.size());
    for (const auto& y : tr.y) sl.samples.push_back({y[0], y[1]});
    if (tr.aborted && tr.abort_reason != "stop condition") reason = tr.abort_reason;
    sl.truncated = reason == "entered a ring core" || (tr.aborted && reason.empty());
    sl.stop_reason = reason.empty() ? "time limit" : reason;
    return sl;
}

Portrait streamline_portrait(const EquilibriumConfig& c, const ModelParams& p,
                             const std::vector<ParticleState>& seeds,
                             const PortraitOptions& opt) {
    Portrait out;
    out.fixed_points = classify_fixed_points(c, p);
    out.streamlines.resize(seeds.size());
    parallel_for(seeds.size(), opt.exec, [&](std::size_t i) {
        out.streamlines[i] = trace_streamline(static_cast<int>(i), seeds[i], c, p, opt);
    });
    if (opt.with_separatrices) {
        SeparatrixOptions so = opt.separatrix;
        so.allow_partial = true;
        try {
            out.separatrices = trace_separatrices(c, p, so);
            for (const auto& s : out.separatrices)
                if (!s.complete)
                    out.warnings.push_back(std::string(to_string(s.branch)) +
                                           " separatrix does not reconnect");
        } catch (const Error& e) {
            out.warnings.push_back(std::string("separatrix tracing failed: ") + e.what());
        }
    }
    return out;
}

Portrait streamline_portrait(const EquilibriumConfig& c, const ModelParams& p,
                             const PortraitOptions& opt) {
    std::vector<ParticleState> seeds;
    const double x_lo = c.x_minus - c.eta, x_hi = c.x_plus + c.eta;
    const double s_hi = 4.0 * std::max(c.s1_hat, c.s2_hat);
    for (int j = 0; j < opt.ns; ++j)
        for (int i = 0; i < opt.nx; ++i)
            seeds.push_back({s_hi * (j + 0.5) / opt.ns, x_lo + (x_hi - x_lo) * (i + 0.5) / opt.nx});
    return streamline_portrait(c, p, seeds, opt);
}

}  // namespace ringlab
