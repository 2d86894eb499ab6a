#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>

#include "CLI11.hpp"
#include "ringlab/cli.hpp"
#include "ringlab/melnikov.hpp"
#include "ringlab/parallel.hpp"
#include "ringlab/poincare.hpp"

namespace ringlab {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 1;
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const NoStagnationError*>(&e))
        return 2;
    return 3;
}

namespace {

using io::CsvTable;
using io::Json;
using io::format_number;
namespace fs = std::filesystem;
constexpr double two_pi = 2.0 * std::numbers::pi;

// Drift thresholds behind the "degraded" status.
constexpr double g_drift_limit = 1e-10;
constexpr double h_drift_limit = 1e-6;
constexpr double level_spread_limit = 1e-6;
constexpr double symmetry_limit = 1e-5;
constexpr double det_limit = 1e-4;

struct Context {
    const RunConfig& cfg;
    fs::path dir;
    ModelParams model;
    EquilibriumConfig eq;
    std::vector<std::string> files;
    Json invariants = Json::object();
    Json results = Json::object();
    Json numerics = Json::object();
    std::vector<std::string> warnings;
    std::vector<std::string> degraded;

    explicit Context(const RunConfig& c) : cfg(c), dir(c.output_dir), model(c.model) {}
    void emit(const std::string& name, const std::string& content) {
        io::write_atomic(dir / name, content);
        files.push_back(name);
    }
    void check(bool ok, const std::string& why) {
        if (!ok) degraded.push_back(why);
    }
};

// Unstable rate of the axis saddles p±, the time scale of the bubble.
double axis_rate(const std::vector<FixedPoint>& fps) {
    for (const auto& f : fps)
        if (f.label == "p_plus" && std::isfinite(f.lambda_unstable)) return f.lambda_unstable;
    return 0.0;
}

std::string fixed_points_csv(const std::vector<FixedPoint>& fps) {
    CsvTable t({"label", "kind", "s", "x", "lambda_unstable", "lambda_stable", "tangent_slope"});
    for (const auto& f : fps)
        t.add_row({f.label, f.kind, format_number(f.s), format_number(f.x),
                   format_number(f.lambda_unstable), format_number(f.lambda_stable),
                   format_number(f.tangent_slope)});
    return t.str();
}

Json fixed_points_json(const std::vector<FixedPoint>& fps) {
    Json a = Json::array();
    for (const auto& f : fps) a.push_back(io::to_json(f));
    return a;
}

Json separatrix_json(const SeparatrixTrace& s) {
    return Json{{"branch", to_string(s.branch)},
                {"complete", s.complete},
                {"samples", s.t.size()},
                {"miss_distance", s.miss_distance},
                {"decay_rate", s.decay_rate},
                {"decay_r2", s.decay_r2},
                {"level", s.level},
                {"level_spread", s.level_spread},
                {"symmetry_residual", s.symmetry_residual}};
}

void add_separatrix_rows(CsvTable& t, const SeparatrixTrace& s) {
    for (std::size_t i = 0; i < s.t.size(); ++i)
        t.add_row({to_string(s.branch), format_number(s.t[i]), format_number(s.samples[i].s),
                   format_number(s.samples[i].x)});
}

// Separatrix options scaled to the slowest saddle of the configuration.
SeparatrixOptions scaled_separatrix_options(double lam) {
    SeparatrixOptions so;
    if (lam > 0.0) {
        so.spec.step = 1.2e-3 / lam;
        so.max_time = 400.0 / lam;
        so.spec.max_time = std::max(so.spec.max_time, 2.0 * so.max_time);
    }
    return so;
}

void check_separatrix(Context& ctx, const SeparatrixTrace& up) {
    ctx.invariants["separatrix_level_spread"] = up.level_spread;
    ctx.invariants["separatrix_symmetry_residual"] = up.symmetry_residual;
    ctx.check(up.level_spread <= level_spread_limit, "separatrix level spread above 1e-6");
    ctx.check(up.symmetry_residual <= symmetry_limit, "separatrix symmetry residual above 1e-5");
}

// ---------------------------------------------------------------------------

void run_equilibria(Context& ctx) {
    const auto& c = ctx.eq;
    const auto fps = classify_fixed_points(c, ctx.model);
    ctx.emit("fixed_points.csv", fixed_points_csv(fps));

    const Vec4 v = ring_velocity(c.ring_state(), ctx.model);
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    ctx.invariants["radii_residual"] = c.radii_residual;
    ctx.invariants["ring_velocity_residual"] = vmax;
    ctx.check(c.radii_residual <= 1e-8, "radii residual above 1e-8");

    const auto jac = ring_jacobian(c.r1_hat, c.r2_hat, c.xi_hat, ctx.model);
    Json eig = Json::array();
    for (const auto& z : jac.eigenvalues) eig.push_back(Json::array({z.real(), z.imag()}));
    ctx.results["fixed_points"] = fixed_points_json(fps);
    ctx.results["ring_jacobian"] = Json{{"eigenvalues", eig},
                                        {"lambda_sq", jac.lambda_sq},
                                        {"center", jac.center}};
    if (c.ring_center) {
        ctx.results["oscillation_period"] = two_pi / c.nu;
        ctx.results["amplitude_ratio"] = c.A / c.B;
    }
}

void run_portrait(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto fps = classify_fixed_points(ctx.eq, ctx.model);
    const double lam = axis_rate(fps);

    PortraitOptions po;
    if (cfg.seeds > 0) po.nx = po.ns = cfg.seeds;
    if (lam > 0.0) {
        po.t_max = 60.0 / lam;
        po.spec.step = 0.015 / lam;
        po.spec.max_time = std::max(po.spec.max_time, 2.0 * po.t_max);
    }
    if (cfg.step_given) po.spec.step = cfg.integrator.step;
    po.stride = std::max(1L, std::lround(po.t_max / po.spec.step / 400.0));
    po.separatrix = scaled_separatrix_options(lam);
    if (cfg.step_given) po.separatrix.spec.step = cfg.integrator.step;
    ctx.numerics["portrait"] = Json{{"nx", po.nx},         {"ns", po.ns},
                                    {"t_max", po.t_max},   {"step", po.spec.step},
                                    {"stride", po.stride}, {"separatrix_step", po.separatrix.spec.step}};

    const Portrait pr = streamline_portrait(ctx.eq, ctx.model, po);

    CsvTable sl({"seed_id", "t", "s", "x"});
    std::size_t truncated = 0;
    for (const auto& s : pr.streamlines) {
        truncated += s.truncated ? 1 : 0;
        for (std::size_t i = 0; i < s.t.size(); ++i)
            sl.add_row({std::to_string(s.seed_id), format_number(s.t[i]),
                        format_number(s.samples[i].s), format_number(s.samples[i].x)});
    }
    ctx.emit("streamlines.csv", sl.str());

    CsvTable st({"branch", "t", "s", "x"});
    Json seps = Json::array();
    for (const auto& s : pr.separatrices) {
        add_separatrix_rows(st, s);
        seps.push_back(separatrix_json(s));
        if (s.branch == Branch::upper && s.complete) check_separatrix(ctx, s);
    }
    ctx.emit("separatrices.csv", st.str());
    ctx.emit("fixed_points.csv", fixed_points_csv(pr.fixed_points));

    for (const auto& w : pr.warnings) ctx.warnings.push_back(w);
    ctx.results["fixed_points"] = fixed_points_json(pr.fixed_points);
    ctx.results["streamlines"] = pr.streamlines.size();
    ctx.results["truncated_streamlines"] = truncated;
    ctx.results["separatrices"] = seps;
}

// Sample times over `periods` ring periods (or unit time without a center).
std::vector<double> sample_grid(const Context& ctx) {
    const double base = ctx.eq.ring_center ? two_pi / ctx.eq.nu : 1.0;
    const double span = ctx.cfg.periods * base;
    std::vector<double> t(ctx.cfg.samples);
    for (int i = 0; i < ctx.cfg.samples; ++i) t[i] = span * i / (ctx.cfg.samples - 1);
    return t;
}

void emit_stagnation(Context& ctx, const std::vector<double>& t, const OscillationSpec& osc) {
    const auto tr = stagnation_trace(ctx.eq, ctx.model, osc, t);
    CsvTable tab({"t", "x_minus", "x_plus"});
    double lo = INFINITY, hi = -INFINITY, asym = 0.0, sep_min = INFINITY;
    for (const auto& s : tr) {
        tab.add_row(std::vector<double>{s.t, s.x_minus, s.x_plus});
        lo = std::min(lo, s.x_minus);
        hi = std::max(hi, s.x_plus);
        sep_min = std::min(sep_min, s.x_plus - s.x_minus);
        asym = std::max(asym, std::abs(s.x_plus + s.x_minus - 2.0 * ctx.eq.xi_hat));
    }
    ctx.emit("stagnation.csv", tab.str());
    ctx.results["stagnation"] = Json{{"x_minus_min", lo},
                                     {"x_plus_max", hi},
                                     {"min_separation", sep_min},
                                     {"max_asymmetry", asym}};
}

void emit_rings(Context& ctx, const std::vector<double>& t, const OscillationSpec& osc) {
    const auto& cfg = ctx.cfg;
    IntegratorSpec ispec = cfg.integrator;
    const RingMotion motion(ctx.eq, ctx.model, osc, ispec);
    CsvTable tab({"t", "s1", "s2", "x1", "x2"});
    std::vector<RingPairState> st;
    for (double ti : t) {
        st.push_back(motion(ti));
        tab.add_row(std::vector<double>{ti, st.back().s1, st.back().s2, st.back().x1, st.back().x2});
    }
    ctx.emit("rings.csv", tab.str());

    // Direct integration of the ring system from the same initial state,
    // segment by segment so that it lands on the sample times.
    const double H0 = hamiltonian(st.front(), ctx.model), G0 = invariant_G(st.front(), ctx.model);
    double gap = 0.0, h_drift = 0.0, g_drift = 0.0;
    RingPairState y = st.front();
    for (std::size_t k = 1; k < t.size(); ++k) {
        const auto seg = integrate_rings(y, ctx.model, t[k - 1], t[k], ispec, 1L << 40);
        const auto& b = seg.path.back();
        y = {b[0], b[1], b[2], b[3]};
        gap = std::max({gap, std::abs(y.s1 - st[k].s1), std::abs(y.s2 - st[k].s2),
                        std::abs(y.x1 - st[k].x1), std::abs(y.x2 - st[k].x2)});
        h_drift = std::max(h_drift, std::abs(hamiltonian(y, ctx.model) - H0) / std::abs(H0));
        g_drift = std::max(g_drift, std::abs(invariant_G(y, ctx.model) - G0) / std::abs(G0));
    }
    ctx.invariants["H_drift"] = h_drift;
    ctx.invariants["G_drift"] = g_drift;
    ctx.invariants["motion_vs_integration_gap"] = gap;
    ctx.check(g_drift <= g_drift_limit, "G drift above 1e-10");
    if (ctx.model.coupling == Coupling::printed)
        ctx.check(h_drift <= h_drift_limit, "H drift above 1e-6");
    if (const auto* seed = motion.seed()) {
        ctx.results["center_manifold"] = Json{{"period", seed->period},
                                              {"closure_gap", seed->closure_gap},
                                              {"ratio", seed->ratio},
                                              {"psi1", seed->psi1},
                                              {"drift1", seed->drift1},
                                              {"drift2", seed->drift2},
                                              {"iterations", seed->iterations}};
    }
}

OscillationSpec checked_oscillation(const Context& ctx) {
    OscillationSpec osc = ctx.cfg.oscillation;
    if (osc.mu != 0.0) {
        if (!ctx.eq.ring_center)
            throw DomainError("ring oscillation needs a Type with a ring center");
        check_amplitude(ctx.eq, osc.mu);
    }
    return osc;
}

void run_rings(Context& ctx) {
    const auto osc = checked_oscillation(ctx);
    const auto t = sample_grid(ctx);
    emit_rings(ctx, t, osc);
    emit_stagnation(ctx, t, osc);
    try {
        SeparatrixOptions so = scaled_separatrix_options(
            axis_rate(classify_fixed_points(ctx.eq, ctx.model)));
        const auto up = trace_upper_branch(ctx.eq, ctx.model, so);
        CsvTable tab({"branch", "t", "s", "x"});
        add_separatrix_rows(tab, up);
        ctx.emit("separatrix.csv", tab.str());
        ctx.results["separatrix"] = separatrix_json(up);
        check_separatrix(ctx, up);
    } catch (const Error& e) {
        ctx.warnings.push_back(std::string("unperturbed separatrix unavailable: ") + e.what());
    }
}

void run_stagnation(Context& ctx) {
    const auto osc = checked_oscillation(ctx);
    const auto t = sample_grid(ctx);
    emit_stagnation(ctx, t, osc);
    emit_rings(ctx, t, osc);
}

void run_melnikov(Context& ctx) {
    MelnikovOptions mo;
    mo.n_tau = ctx.cfg.tau_samples;
    if (ctx.cfg.step_given) mo.spec.step = ctx.cfg.integrator.step;
    const MelnikovContext mc(ctx.eq, ctx.model, mo);
    const auto r = melnikov_sweep(mc, mo.n_tau);

    CsvTable tab({"tau", "M_full", "M_reduced"});
    for (std::size_t i = 0; i < r.tau_grid.size(); ++i)
        tab.add_row(std::vector<double>{r.tau_grid[i], r.values[i], r.values_reduced[i]});
    ctx.emit("melnikov.csv", tab.str());

    CsvTable th({"t", "s", "x", "theta1", "theta2", "theta3", "theta4", "F1", "F2"});
    const double T = mc.truncation_T();
    const int n = 401;
    for (int i = 0; i < n; ++i) {
        const double t = -T + 2.0 * T * i / (n - 1);
        const auto q = mc.trace().at(t);
        const auto v = mc.theta_profiles(t);
        const auto f = mc.integrand_parts(t);
        th.add_row(std::vector<double>{t, q.s, q.x, v.theta1, v.theta2, v.theta3, v.theta4, f[0],
                                       f[1]});
    }
    ctx.emit("theta.csv", th.str());

    const double rel = r.C != 0.0 ? r.rms_residual / std::abs(r.C) : INFINITY;
    ctx.invariants["melnikov_relative_residual"] = rel;
    ctx.invariants["melnikov_max_form_gap"] = r.max_form_gap;
    ctx.check(!r.form_violation, "Melnikov cosine-form residual above 5% of |C|");

    Json zeros = Json::array(), zeros_scaled = Json::array();
    for (double z : r.zeros) {
        zeros.push_back(z);
        zeros_scaled.push_back(z * ctx.eq.nu / std::numbers::pi);
    }
    ctx.results["C"] = r.C;
    ctx.results["phase"] = r.phase;
    ctx.results["rms_residual"] = r.rms_residual;
    ctx.results["relative_residual"] = rel;
    ctx.results["zeros"] = zeros;
    ctx.results["zeros_over_pi_by_nu"] = zeros_scaled;
    ctx.results["half_line_integral"] = mc.half_line_integral();
    ctx.results["truncation_T"] = r.truncation_T;
    ctx.results["tail_estimate"] = r.tail_estimate;
    ctx.results["decay_rate"] = r.decay_rate;
    ctx.results["max_form_gap"] = r.max_form_gap;
    ctx.results["form_violation"] = r.form_violation;
}

void run_poincare(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto osc = checked_oscillation(ctx);
    if (!(ctx.model.Omega > 0.0))
        throw ConfigError("no ring frequency for this type; pass --omega");

    PoincareOptions po;
    po.spec.step = cfg.step_given ? cfg.integrator.step : cfg.long_run ? 1e-5 : 1e-4;
    const int n_seeds = cfg.seeds > 0 ? cfg.seeds : 30;
    const int n_iter = cfg.iterations > 0 ? cfg.iterations : cfg.long_run ? 3000 : 200;

    const auto& c = ctx.eq;
    double s_top = 0.0;
    try {
        const auto so = scaled_separatrix_options(
            axis_rate(classify_fixed_points(c, ctx.model)));
        const auto up = trace_upper_branch(c, ctx.model, so);
        s_top = 1.5 * up.at(0.0).s;
    } catch (const Error& e) {
        s_top = 1.5 * std::max(c.s1_hat, c.s2_hat);
        ctx.warnings.push_back(std::string("seed ladder height from ring radii: ") + e.what());
    }
    const double excl =
        cfg.core_exclusion >= 0.0 ? cfg.core_exclusion : 0.05 * std::max(c.r1_hat, c.r2_hat);
    const auto seeds = seed_ladder(c, s_top, n_seeds, excl);

    const PoincareMap map(c, ctx.model, osc, po);
    ctx.numerics["poincare"] = Json{{"step", map.period_step()},
                                    {"steps_per_period", map.period_steps()},
                                    {"period", map.period()},
                                    {"max_turn", po.max_turn},
                                    {"max_substeps", po.max_substeps},
                                    {"seeds", seeds.size()},
                                    {"iterations", n_iter},
                                    {"seed_ladder_top", s_top},
                                    {"core_exclusion", excl},
                                    {"long_run", cfg.long_run}};
    const auto box = map.box();
    ctx.numerics["escape_box"] =
        Json{{"x_lo", box.x_lo}, {"x_hi", box.x_hi}, {"s_lo", box.s_lo}, {"s_hi", box.s_hi}};

    const SectionCloud cloud = section(seeds, n_iter, map);
    const auto levels = level_statistics(cloud);

    CsvTable pts({"seed_id", "iterate_index", "s", "x", "escaped"});
    CsvTable per({"seed_id", "s0", "x0", "iterates", "escaped", "escape_index", "level_mean",
                  "level_spread", "level_stddev", "failure"});
    double max_spread = 0.0;
    std::size_t n_escaped = 0, n_failed = 0;
    for (std::size_t i = 0; i < cloud.seeds.size(); ++i) {
        const auto& it = cloud.iterates[i];
        const std::string esc = cloud.escaped[i] ? "1" : "0";
        for (std::size_t k = 0; k < it.size(); ++k)
            pts.add_row({std::to_string(i), std::to_string(k), format_number(it[k].s),
                         format_number(it[k].x), esc});
        per.add_row({std::to_string(i), format_number(cloud.seeds[i].s),
                     format_number(cloud.seeds[i].x), std::to_string(it.size()), esc,
                     std::to_string(cloud.escape_index[i]), format_number(levels[i].mean),
                     format_number(levels[i].spread), format_number(levels[i].stddev),
                     cloud.failure[i]});
        n_escaped += cloud.escaped[i] ? 1 : 0;
        n_failed += cloud.failure[i].empty() ? 0 : 1;
        if (!cloud.escaped[i] && cloud.failure[i].empty())
            max_spread = std::max(max_spread, levels[i].spread);
    }
    ctx.emit("cloud.csv", pts.str());
    ctx.emit("seeds.csv", per.str());

    ctx.invariants["max_level_spread"] = max_spread;
    if (osc.mu == 0.0)
        ctx.check(max_spread <= level_spread_limit, "level spread above 1e-6 at mu = 0");
    if (n_failed) ctx.warnings.push_back(std::to_string(n_failed) + " seeds failed in the map");

    // Area preservation at two bounded seeds (lowest and middle of the ladder).
    Json dets = Json::array();
    std::vector<std::size_t> bounded;
    for (std::size_t i = 0; i < cloud.seeds.size(); ++i)
        if (!cloud.escaped[i] && cloud.failure[i].empty()) bounded.push_back(i);
    double det_dev = 0.0;
    for (std::size_t pick : {std::size_t{0}, bounded.size() / 2}) {
        if (pick >= bounded.size()) continue;
        const auto q = cloud.seeds[bounded[pick]];
        try {
            const auto jac = map_jacobian(map, q, 1e-5 * std::max(1.0, std::abs(q.s)));
            det_dev = std::max(det_dev, std::abs(jac.det - 1.0));
            dets.push_back(Json{{"seed_id", bounded[pick]},
                                {"s", q.s},
                                {"x", q.x},
                                {"det", jac.det},
                                {"det_error", jac.det_error}});
        } catch (const Error& e) {
            ctx.warnings.push_back(std::string("map Jacobian failed: ") + e.what());
        }
        if (bounded.size() < 2) break;
    }
    ctx.invariants["max_det_deviation"] = det_dev;
    ctx.check(det_dev <= det_limit, "|det DP - 1| above 1e-4");

    Json fixed = Json::array();
    try {
        for (const auto& f : map_fixed_points(map))
            fixed.push_back(Json{{"label", f.label},
                                 {"s", f.point.s},
                                 {"x", f.point.x},
                                 {"residual", f.residual},
                                 {"iterations", f.iterations}});
    } catch (const Error& e) {
        ctx.warnings.push_back(std::string("map fixed points: ") + e.what());
    }

    ctx.results["seeds"] = cloud.seeds.size();
    ctx.results["escaped"] = n_escaped;
    ctx.results["failed"] = n_failed;
    ctx.results["max_level_spread"] = max_spread;
    ctx.results["determinants"] = dets;
    ctx.results["map_fixed_points"] = fixed;
}

Json error_record(const RunConfig& cfg, const std::exception& e, int code) {
    const auto* re = dynamic_cast<const Error*>(&e);
    return Json{{"schema_version", io::schema_version},
                {"tool", "ringlab"},
                {"command", to_string(cfg.command)},
                {"case", cfg.case_name},
                {"status", "error"},
                {"exit_code", code},
                {"error", Json{{"kind", re ? re->kind() : "runtime"}, {"message", e.what()}}}};
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    Context ctx(cfg);
    try {
        cfg.validate();
        ctx.model.mu = cfg.oscillation.mu;
        ctx.eq = resolve_equilibrium(ctx.model, cfg.type);
        if (!cfg.omega_given) ctx.model.Omega = ctx.eq.ring_center ? ctx.eq.nu : NAN;
        ctx.numerics["integrator"] = io::to_json(cfg.integrator);
        ctx.numerics["quadrature"] = io::to_json(ctx.model.quad);

        switch (cfg.command) {
            case Command::equilibria: run_equilibria(ctx); break;
            case Command::portrait: run_portrait(ctx); break;
            case Command::rings: run_rings(ctx); break;
            case Command::stagnation: run_stagnation(ctx); break;
            case Command::melnikov: run_melnikov(ctx); break;
            case Command::poincare: run_poincare(ctx); break;
        }

        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        Json m;
        m["schema_version"] = io::schema_version;
        m["tool"] = "ringlab";
        m["command"] = to_string(cfg.command);
        m["case"] = cfg.case_name;
        m["status"] = ctx.degraded.empty() ? "ok" : "degraded";
        m["degraded_reasons"] = ctx.degraded;
        m["model"] = io::to_json(ctx.model);
        m["omega_source"] = cfg.omega_given ? "given" : "nu";
        m["equilibrium"] = io::to_json(ctx.eq);
        m["oscillation"] = io::to_json(cfg.oscillation);
        m["numerics"] = ctx.numerics;
        m["outputs"] = ctx.files;
        m["invariants"] = ctx.invariants;
        m["results"] = ctx.results;
        m["warnings"] = ctx.warnings;
        m["runtime"] = Json{{"seconds", secs}, {"threads", thread_cap()}};
        io::write_atomic(ctx.dir / "manifest.json", m.dump(2) + "\n");
        ctx.files.push_back("manifest.json");
        out.manifest = std::move(m);
        out.files = ctx.files;
        out.exit_code = 0;
    } catch (const std::exception& e) {
        out.exit_code = exit_code_for(e);
        out.manifest = error_record(cfg, e, out.exit_code);
        out.files = ctx.files;
        try {
            io::write_atomic(ctx.dir / "error.json", out.manifest.dump(2) + "\n");
            out.files.push_back("error.json");
        } catch (const std::exception&) {
            // output directory itself unusable; the record still goes to stderr
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct Flags {
    std::string command, case_name, type, coupling, mode, out;
    double alpha = 0, kappa = 0, chi = 0, mu = 0, omega = 0, step = 0, periods = 0;
    double core_exclusion = 0;
    int quad_order = 0, seeds = 0, iterations = 0, tau_samples = 0, samples = 0;
    bool long_run = false;
};

void bind(CLI::App& app, Flags& f) {
    std::string cmds;
    for (Command c : {Command::equilibria, Command::portrait, Command::rings,
                      Command::stagnation, Command::melnikov, Command::poincare})
        cmds += std::string(cmds.empty() ? "" : "|") + to_string(c);
    std::string cases;
    for (const auto& n : preset_names()) cases += (cases.empty() ? "" : "|") + n;

    app.add_option("command", f.command, cmds);
    app.add_option("--case", f.case_name, "preset: " + cases);
    app.add_option("--alpha", f.alpha, "swirl-to-ring strength ratio α");
    app.add_option("--kappa", f.kappa, "circulation ratio κ");
    app.add_option("--chi", f.chi, "core-size parameter χ");
    app.add_option("--type", f.type, "equilibrium type I|II|III|IV");
    app.add_option("--mu", f.mu, "oscillation amplitude μ");
    app.add_option("--omega", f.omega, "map frequency Ω (default ν)");
    app.add_option("--step", f.step, "RK4 step bound");
    app.add_option("--quad-order", f.quad_order, "Gauss-Legendre order of the ring integrals");
    app.add_option("--seeds", f.seeds, "seed count (portrait: grid side)");
    app.add_option("--iterations", f.iterations, "Poincaré map iterations per seed");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--coupling", f.coupling, "calibrated|printed|reversed");
    app.add_option("--mode", f.mode, "ring motion: analytic|integrated");
    app.add_option("--tau-samples", f.tau_samples, "Melnikov τ grid size");
    app.add_option("--periods", f.periods, "span of ring/stagnation runs in ring periods");
    app.add_option("--samples", f.samples, "output samples of ring/stagnation runs");
    app.add_option("--core-exclusion", f.core_exclusion, "seed-ladder distance kept from cores");
    app.add_flag("--long-run", f.long_run, "step 1e-5 and 3000 iterations (Poincaré)");
}

RunConfig to_config(const CLI::App& app, const Flags& f) {
    auto given = [&app](const char* name) { return app.count(name) > 0; };
    RunConfig cfg;
    if (given("--case")) cfg = preset_case(f.case_name);
    if (given("command")) cfg.command = command_from_string(f.command);
    else if (!given("--case")) throw ConfigError("a command or --case is required");
    if (given("--alpha")) cfg.model.alpha = f.alpha;
    if (given("--kappa")) cfg.model.kappa = f.kappa;
    if (given("--chi")) cfg.model.chi = f.chi;
    if (given("--type")) cfg.type = equilibrium_type_from_string(f.type);
    if (given("--mu")) cfg.oscillation.mu = f.mu;
    if (given("--omega")) {
        cfg.model.Omega = f.omega;
        cfg.omega_given = true;
    }
    if (given("--step")) {
        cfg.integrator.step = f.step;
        cfg.step_given = true;
    }
    if (given("--quad-order")) cfg.model.quad.order = f.quad_order;
    if (given("--seeds")) cfg.seeds = f.seeds;
    if (given("--iterations")) cfg.iterations = f.iterations;
    if (given("--out")) cfg.output_dir = f.out;
    if (given("--coupling")) cfg.model.coupling = coupling_from_string(f.coupling);
    if (given("--mode")) cfg.oscillation.mode = motion_mode_from_string(f.mode);
    if (given("--tau-samples")) cfg.tau_samples = f.tau_samples;
    if (given("--periods")) cfg.periods = f.periods;
    if (given("--samples")) cfg.samples = f.samples;
    if (given("--core-exclusion")) cfg.core_exclusion = f.core_exclusion;
    if (f.long_run) cfg.long_run = true;
    cfg.validate();
    return cfg;
}

}  // namespace

RunConfig parse_command_line(int argc, const char* const* argv) {
    CLI::App app{"ringlab"};
    Flags f;
    bind(app, f);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    return to_config(app, f);
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"ringlab: coaxial vortex rings with swirl, from equilibria to Poincaré sections"};
    Flags f;
    bind(app, f);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    RunConfig cfg;
    try {
        cfg = to_config(app, f);
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << error_record(cfg, e, code).dump() << "\n";
        return code;
    }
    const RunOutcome r = run(cfg);
    if (r.exit_code != 0) {
        std::cerr << r.manifest.dump() << "\n";
        return r.exit_code;
    }
    std::cout << "ringlab " << to_string(cfg.command) << ": "
              << r.manifest["status"].get<std::string>() << ", " << r.files.size()
              << " files in " << cfg.output_dir << "\n";
    for (const auto& w : r.manifest["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
    for (const auto& w : r.manifest["degraded_reasons"])
        std::cout << "  degraded: " << w.get<std::string>() << "\n";
    return 0;
}

}  // namespace ringlab
