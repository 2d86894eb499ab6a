#include "ringlab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

namespace ringlab {

EscapeBox default_escape_box(const EquilibriumConfig& c) {
    return {c.x_minus - 5.0 * c.eta, c.x_plus + 5.0 * c.eta, 0.0, 10.0 * c.s2_hat};
}

PoincareMap::PoincareMap(const EquilibriumConfig& c, const ModelParams& p,
                         const OscillationSpec& osc, const PoincareOptions& opt)
    : c_(c), p_(p), opt_(opt), motion_(c, p, osc, opt.spec),
      box_(opt.box ? *opt.box : default_escape_box(c)) {
    if (!(p.Omega > 0.0) || !std::isfinite(p.Omega))
        throw DomainError("Poincare map needs a positive swirl rate Omega");
    opt_.spec.validate();
    period_ = 2.0 * std::numbers::pi / p.Omega;
}

long PoincareMap::period_steps() const { return rk4_step_count(0.0, period_, opt_.spec.step); }

ParticleState PoincareMap::flow(const ParticleState& q, double t0, double span,
                                StepSchedule* record, const StepSchedule* replay) const {
    if (!(span > 0.0)) throw DomainError("Poincare map: span must be positive");
    const long n = rk4_step_count(t0, t0 + span, opt_.spec.step);
    return flow_steps(q, t0, span / static_cast<double>(n), n, record, replay);
}

ParticleState PoincareMap::flow_steps(const ParticleState& q, double t0, double h, long n,
                                      StepSchedule* record, const StepSchedule* replay) const {
    if (!(h > 0.0) || n < 1) throw DomainError("Poincare map: need a positive step and count");
    auto field = [&](double t, const Vec2& y) {
        return particle_velocity({y[0], y[1]}, motion_(t), p_);
    };
    // Angular rate about the nearest ring, in the meridian (r, x) plane.
    auto turn_rate = [&](double t, const Vec2& y, const Vec2& v) {
        const RingPairState rings = motion_(t);
        const double r = std::sqrt(std::max(y[0], 0.0));
        const double d1 = std::hypot(r - std::sqrt(rings.s1), y[1] - rings.x1);
        const double d2 = std::hypot(r - std::sqrt(rings.s2), y[1] - rings.x2);
        const double vr = r > 0.0 ? v[0] / (2.0 * r) : 0.0;
        return std::hypot(vr, v[1]) / std::min(d1, d2);
    };
    if (replay && replay->size() != static_cast<std::size_t>(n))
        throw ConfigError("Poincare map: replayed schedule does not match the step count");
    if (record) record->assign(static_cast<std::size_t>(n), 1);
    Vec2 y{q.s, q.x};
    double t = t0;
    auto fail = [&](const std::string& why) -> EscapeError {
        return EscapeError("Poincare map: " + why, t - t0, {y[0], y[1]});
    };
    for (long i = 0; i < n; ++i) {
        t = t0 + static_cast<double>(i) * h;
        try {
            int m = 1;
            const Vec2 k1 = field(t, y);   // also the first stage of the first substep
            if (replay) {
                m = (*replay)[static_cast<std::size_t>(i)];
            } else if (opt_.max_turn > 0.0) {
                const double w = turn_rate(t, y, k1);
                m = static_cast<int>(std::clamp(std::ceil(h * w / opt_.max_turn), 1.0,
                                                static_cast<double>(std::max(opt_.max_substeps, 1))));
            }
            if (record) (*record)[static_cast<std::size_t>(i)] = m;
            const double hs = h / m;
            y = rk4_step<2>(field, t, y, hs, k1);
            for (int j = 1; j < m; ++j) y = rk4_step<2>(field, t + j * hs, y, hs);
        } catch (const SingularityError& e) {
            throw fail(e.what());
        }
        if (!std::isfinite(y[0]) || !std::isfinite(y[1])) throw fail("non-finite state");
        if (core_distance_sq({y[0], y[1]}, motion_(t + h)) < opt_.core_stop_sq)
            throw fail("entered a ring core");
    }
    // The axis is invariant; keep roundoff from pushing s below it.
    return {std::max(y[0], 0.0), y[1]};
}

ParticleState PoincareMap::operator()(const ParticleState& q, double t0) const {
    return flow(q, t0, period_);
}

ParticleState poincare_map(const ParticleState& p0, const EquilibriumConfig& c,
                           const ModelParams& p, const OscillationSpec& osc,
                           const PoincareOptions& opt) {
    return PoincareMap(c, p, osc, opt)(p0);
}

SectionCloud section(const std::vector<ParticleState>& seeds, int n_iterations,
                     const PoincareMap& map) {
    if (n_iterations < 1) throw ConfigError("section: n_iterations must be at least 1");
    const std::size_t n = seeds.size();
    SectionCloud cloud;
    cloud.seeds = seeds;
    cloud.iterates.resize(n);
    cloud.escaped.assign(n, false);
    cloud.escape_index.assign(n, -1);
    cloud.failure.resize(n);
    cloud.params = map.params();
    cloud.config = map.config();
    cloud.oscillation = map.oscillation();
    cloud.period = map.period();
    cloud.box = map.box();
    std::vector<char> escaped(n, 0);
    parallel_for(n, map.options().exec, [&](std::size_t i) {
        auto& its = cloud.iterates[i];
        its.reserve(static_cast<std::size_t>(n_iterations) + 1);
        ParticleState q = seeds[i];
        if (q.s < 0.0) {
            cloud.failure[i] = "seed has s < 0";
            return;
        }
        its.push_back(q);
        if (!cloud.box.contains(q)) {
            escaped[i] = 1;
            cloud.escape_index[i] = 0;
            return;
        }
        for (int k = 0; k < n_iterations; ++k) {
            try {
                q = map(q, k * map.period());
            } catch (const EscapeError& e) {
                cloud.failure[i] = e.what();
                return;
            }
            if (!cloud.box.contains(q)) {
                escaped[i] = 1;
                cloud.escape_index[i] = k + 1;
                return;
            }
            its.push_back(q);
        }
    });
    for (std::size_t i = 0; i < n; ++i) cloud.escaped[i] = escaped[i] != 0;
    return cloud;
}

SectionCloud section(const std::vector<ParticleState>& seeds, int n_iterations,
                     const EquilibriumConfig& c, const ModelParams& p,
                     const OscillationSpec& osc, const PoincareOptions& opt) {
    return section(seeds, n_iterations, PoincareMap(c, p, osc, opt));
}

std::vector<ParticleState> seed_ladder(const EquilibriumConfig& c, double s_top, int n,
                                       double core_exclusion) {
    if (n < 1 || !(s_top > 0.0)) throw ConfigError("seed_ladder: need n >= 1 and s_top > 0");
    // Admissible s-intervals, then n points evenly spread over their total length.
    std::vector<std::pair<double, double>> cut;
    if (core_exclusion > 0.0) {
        for (double rk : {c.r1_hat, c.r2_hat}) {
            const double lo = std::max(rk - core_exclusion, 0.0);
            cut.push_back({lo * lo, (rk + core_exclusion) * (rk + core_exclusion)});
        }
        std::sort(cut.begin(), cut.end());
        if (cut.size() == 2 && cut[1].first <= cut[0].second) {
            cut[0].second = std::max(cut[0].second, cut[1].second);
            cut.pop_back();
        }
    }
    std::vector<std::pair<double, double>> keep;
    double a = 0.0;
    for (const auto& [lo, hi] : cut) {
        if (lo > a) keep.push_back({a, std::min(lo, s_top)});
        a = std::max(a, hi);
        if (a >= s_top) break;
    }
    if (a < s_top) keep.push_back({a, s_top});
    double total = 0.0;
    for (const auto& [lo, hi] : keep) total += std::max(hi - lo, 0.0);
    if (!(total > 0.0)) throw ConfigError("seed_ladder: core exclusion covers the whole segment");
    std::vector<ParticleState> out;
    for (int i = 1; i <= n; ++i) {
        double u = total * i / (n + 1.0);
        for (const auto& [lo, hi] : keep) {
            const double len = std::max(hi - lo, 0.0);
            if (u <= len) {
                out.push_back({lo + u, c.xi_hat});
                break;
            }
            u -= len;
        }
    }
    return out;
}

std::vector<LevelStats> level_statistics(const SectionCloud& cloud) {
    std::vector<LevelStats> out(cloud.iterates.size());
    for (std::size_t i = 0; i < cloud.iterates.size(); ++i) {
        const auto& its = cloud.iterates[i];
        if (its.empty()) continue;
        std::vector<double> h(its.size());
        for (std::size_t k = 0; k < its.size(); ++k)
            h[k] = stream_hamiltonian0(its[k], cloud.config, cloud.params);
        const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
        const double nk = static_cast<double>(h.size());
        const double m = std::accumulate(h.begin(), h.end(), 0.0) / nk;
        double m2 = 0.0;   // two passes: the spreads are far below the level itself
        for (double v : h) m2 += (v - m) * (v - m);
        out[i].mean = m;
        out[i].spread = *hi - *lo;
        out[i].stddev = std::sqrt(m2 / nk);
    }
    return out;
}

MapJacobian map_jacobian(const PoincareMap& map, const ParticleState& q, double h, double t0) {
    if (!(h > 0.0)) throw ConfigError("map_jacobian: step must be positive");
    if (q.s <= h) throw DomainError("map_jacobian: point too close to the axis for the step");
    PoincareMap::StepSchedule sched;
    map.flow(q, t0, map.period(), &sched);
    auto at = [&](double s, double x) { return map.flow({s, x}, t0, map.period(), nullptr, &sched); };
    auto central = [&](double k) {
        const ParticleState sp = at(q.s + k, q.x), sm = at(q.s - k, q.x);
        const ParticleState xp = at(q.s, q.x + k), xm = at(q.s, q.x - k);
        return std::array<double, 4>{(sp.s - sm.s) / (2 * k), (xp.s - xm.s) / (2 * k),
                                     (sp.x - sm.x) / (2 * k), (xp.x - xm.x) / (2 * k)};
    };
    // Richardson extrapolation removes the O(h²) term. Where the map
    // stretches strongly det is a cancellation of large products, so the step
    // is refined until two successive estimates agree.
    MapJacobian out;
    auto b = central(h);
    for (int round = 0; round < 6; ++round) {
        const auto a = b;
        b = central(0.5 * h);
        MapJacobian cur;
        for (int i = 0; i < 4; ++i) cur.J[i] = (4.0 * b[i] - a[i]) / 3.0;
        cur.det = cur.J[0] * cur.J[3] - cur.J[1] * cur.J[2];
        if (round > 0) {
            cur.det_error = std::abs(cur.det - out.det);
            out = cur;
            if (out.det_error < 1e-7) break;
        } else {
            out = cur;
            out.det_error = std::numeric_limits<double>::infinity();
        }
        h *= 0.25;
        if (q.s <= h) break;
        b = central(h);
    }
    return out;
}

namespace {

// Newton on Π − id by multiple shooting: the period is cut into M segments so
// each segment stretches by O(e) even when the fixed point is strongly
// hyperbolic. Unknowns are the states at the segment starts (x only on the
// axis, which the flow leaves invariant).
MapFixedPoint shooting_fixed_point(const PoincareMap& map, const std::string& label,
                                   const ParticleState& seed, bool axis, int M, double tol) {
    const int d = axis ? 1 : 2;
    // Segments are runs of the period's own RK4 steps, so their composition
    // is exactly the one-period map.
    const long nsteps = map.period_steps();
    const double hstep = map.period_step();
    M = static_cast<int>(std::min<long>(M, nsteps));
    std::vector<long> first(M + 1);
    for (int k = 0; k <= M; ++k) first[k] = nsteps * k / M;
    const int n = d * M;
    auto seg = [&](const ParticleState& q, int k, PoincareMap::StepSchedule* rec,
                   const PoincareMap::StepSchedule* rep) {
        return map.flow_steps(q, first[k] * hstep, hstep, first[k + 1] - first[k], rec, rep);
    };
    const double scale = std::max({map.config().eta, map.config().s_hat, 1e-12});
    const double h = 1e-7 * scale;
    auto node = [&](const Eigen::VectorXd& z, int k) {
        return axis ? ParticleState{0.0, z[k]} : ParticleState{z[2 * k], z[2 * k + 1]};
    };
    auto put = [&](Eigen::VectorXd& v, int k, const ParticleState& q, double sign) {
        if (axis) {
            v[k] += sign * q.x;
        } else {
            v[2 * k] += sign * q.s;
            v[2 * k + 1] += sign * q.x;
        }
    };
    auto residual = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < M; ++k) {
            put(r, k, seg(node(z, k), k, nullptr, nullptr), 1.0);
            put(r, k, node(z, (k + 1) % M), -1.0);
        }
        return r;
    };
    Eigen::VectorXd z(n);
    for (int k = 0; k < M; ++k) {
        if (axis) {
            z[k] = seed.x;
        } else {
            z[2 * k] = seed.s;
            z[2 * k + 1] = seed.x;
        }
    }
    Eigen::VectorXd r;
    try {
        r = residual(z);
    } catch (const EscapeError& e) {
        throw ConvergenceError("map_fixed_points: seed for " + label + " fails: " + e.what());
    }
    int it = 0;
    // Node errors are amplified by up to e^{λT} over the full period, so the
    // segments are converged to roundoff rather than to `tol`.
    for (; it < 40 && r.lpNorm<Eigen::Infinity>() > 1e-15 * scale; ++it) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k < M; ++k) {
            const ParticleState q = node(z, k);
            PoincareMap::StepSchedule sched;
            seg(q, k, &sched, nullptr);
            for (int a = 0; a < d; ++a) {
                ParticleState qp = q, qm = q;
                const bool along_x = axis || a == 1;
                (along_x ? qp.x : qp.s) += h;
                (along_x ? qm.x : qm.s) -= h;
                const ParticleState fp = seg(qp, k, nullptr, &sched);
                const ParticleState fm = seg(qm, k, nullptr, &sched);
                if (axis) {
                    J(k, k) = (fp.x - fm.x) / (2 * h);
                } else {
                    J(2 * k, 2 * k + a) = (fp.s - fm.s) / (2 * h);
                    J(2 * k + 1, 2 * k + a) = (fp.x - fm.x) / (2 * h);
                }
            }
            const int k1 = (k + 1) % M;
            for (int a = 0; a < d; ++a) J(d * k + a, d * k1 + a) -= 1.0;
        }
        const Eigen::VectorXd step = J.partialPivLu().solve(-r);
        if (!step.allFinite()) break;
        double lam = 1.0;
        bool accepted = false;
        for (; lam > 1e-4; lam *= 0.5) {
            const Eigen::VectorXd zn = z + lam * step;
            bool ok = true;
            for (int k = 0; k < M && !axis; ++k) ok = ok && zn[2 * k] > 0.0;
            if (!ok) continue;
            try {
                const Eigen::VectorXd rn = residual(zn);
                if (rn.norm() < r.norm()) {
                    z = zn;
                    r = rn;
                    accepted = true;
                    break;
                }
            } catch (const EscapeError&) {
            }
        }
        if (!accepted) break;
    }
    const ParticleState p0 = node(z, 0);
    const ParticleState p1 = map(p0);
    const double res = std::hypot(p1.s - p0.s, p1.x - p0.x);
    if (!(res < tol))
        throw ConvergenceError("map_fixed_points: Newton failed for " + label + " (residual " +
                                   std::to_string(res) + ")",
                               it);
    return {label, p0, res, it};
}

}  // namespace

std::vector<MapFixedPoint> map_fixed_points(const PoincareMap& map, double tol) {
    const auto& c = map.config();
    check_amplitude(c, map.oscillation().mu);
    const auto fps = classify_fixed_points(c, map.params());
    double lam = 0.0;
    for (const auto& f : fps)
        if (f.kind == "saddle") lam = std::max(lam, f.lambda_unstable);
    const int M = std::clamp(static_cast<int>(std::ceil(lam * map.period())), 4, 64);
    std::vector<MapFixedPoint> out;
    out.push_back(shooting_fixed_point(map, "p_plus", {0.0, c.x_plus}, true, M, tol));
    out.push_back(shooting_fixed_point(map, "p_minus", {0.0, c.x_minus}, true, M, tol));
    out.push_back(shooting_fixed_point(map, "q", {c.s_hat, c.xi_hat}, false, M, tol));
    return out;
}

}  // namespace ringlab
