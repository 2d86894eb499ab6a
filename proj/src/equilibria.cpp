#include "ringlab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace ringlab {

const char* to_string(EquilibriumType t) {
    switch (t) {
        case EquilibriumType::I: return "I";
        case EquilibriumType::II: return "II";
        case EquilibriumType::III: return "III";
        case EquilibriumType::IV: return "IV";
    }
    return "I";
}

EquilibriumType equilibrium_type_from_string(const std::string& s) {
    if (s == "I") return EquilibriumType::I;
    if (s == "II") return EquilibriumType::II;
    if (s == "III") return EquilibriumType::III;
    if (s == "IV") return EquilibriumType::IV;
    throw ConfigError("unknown equilibrium type '" + s + "'");
}

namespace {

constexpr double pi = std::numbers::pi;

double r0_of(const ModelParams& p) { return std::exp(p.gamma_const) / p.chi; }
double rho_of(const ModelParams& p) { return std::exp(p.gamma_const + 1.0) / p.chi; }

// ψ_k(r) = α has a small root (< ρ) and a large root (> ρ). Small roots come
// from r = χ⁻¹ exp(2αr/κ_k + γ), large ones from r = κ_k (ln χr - γ) / (2α).
double reduced_root(const ModelParams& p, double kk, bool large, int& iters) {
    const double a = p.alpha, g = p.gamma_const, chi = p.chi;
    auto map = [&](double r) {
        return large ? kk * (std::log(chi * r) - g) / (2.0 * a)
                     : std::exp(2.0 * a * r / kk + g) / chi;
    };
    const double seed = large ? std::max(kk / a, 2.0 * rho_of(p)) : 1.0 / chi;
    const RootResult picard = find_root(map, seed, RootMethod::picard, 1e-15, 10000);
    iters += picard.iterations;
    // Newton polish on the defining equation.
    auto f = [&](double r) { return kk * (std::log(chi * r) - g) - 2.0 * a * r; };
    auto df = [&](double r) { return kk / r - 2.0 * a; };
    double r = picard.x;
    for (int i = 0; i < 5; ++i) {
        const double d = df(r);
        if (d == 0.0) break;
        r -= f(r) / d;
    }
    return r;
}

ReducedRoots reduced_roots_unchecked(const ModelParams& p) {
    ReducedRoots out{};
    out.r0 = r0_of(p);
    out.rho = rho_of(p);
    out.r1a = reduced_root(p, 1.0, false, out.iterations);
    out.r1b = reduced_root(p, 1.0, true, out.iterations);
    out.r2a = reduced_root(p, p.kappa, false, out.iterations);
    out.r2b = reduced_root(p, p.kappa, true, out.iterations);
    return out;
}

struct Interaction {
    double T1, T2;  // signed axial interaction terms of Ψ1, Ψ2 at x1 = x2
};

Interaction interaction_terms(double r1, double r2, const ModelParams& p) {
    const auto w = sigma_integrate<2>(r1, r2, 0.0, p.quad, [&](const SigmaPoint& sp) {
        const double d32 = inv_pow(sp.delta, KernelPower::three_halves);
        return std::array<double, 2>{((r2 - r1) + 2.0 * r1 * sp.sin2) * d32,
                                     ((r1 - r2) + 2.0 * r2 * sp.sin2) * d32};
    });
    const double eps = interaction_sign(r1, r2, p.coupling);
    return {eps * 2.0 * p.kappa * r2 * w[0], eps * 2.0 * r1 * w[1]};
}

std::array<double, 2> scaled_residual(double r1, double r2, const ModelParams& p) {
    const Interaction t = interaction_terms(r1, r2, p);
    const double sw1 = p.swirl_axial(r1 * r1), sw2 = p.swirl_axial(r2 * r2);
    const double f1 = self_induction(r1, p), f2 = p.kappa * self_induction(r2, p);
    return {(sw1 + f1 + t.T1) / (std::abs(sw1) + std::abs(f1) + std::abs(t.T1)),
            (sw2 + f2 + t.T2) / (std::abs(sw2) + std::abs(f2) + std::abs(t.T2))};
}

struct Branches {
    bool large1, large2;
};

Branches branches_of(EquilibriumType t) {
    switch (t) {
        case EquilibriumType::I: return {true, true};
        case EquilibriumType::II: return {true, false};
        case EquilibriumType::III: return {false, true};
        case EquilibriumType::IV: return {false, false};
    }
    return {true, true};
}

bool in_region(double r1, double r2, Branches b, double rho) {
    return (r1 > rho) == b.large1 && (r2 > rho) == b.large2;
}

// Coupled Picard map: each radius is updated from its own equation with the
// interaction frozen at the previous iterate.
bool coupled_picard(const ModelParams& p, Branches b, double& r1, double& r2, int& iters) {
    const double g = p.gamma_const, chi = p.chi, kk = p.kappa;
    for (int it = 0; it < 2000; ++it) {
        ++iters;
        const Interaction t = interaction_terms(r1, r2, p);
        const double a1 = -p.swirl_axial(r1 * r1) - t.T1;  // α(..) - T1
        const double a2 = -p.swirl_axial(r2 * r2) - t.T2;
        const double n1 = b.large1 ? (std::log(chi * r1) - g) / (2.0 * a1)
                                   : std::exp(2.0 * r1 * a1 + g) / chi;
        const double n2 = b.large2 ? kk * (std::log(chi * r2) - g) / (2.0 * a2)
                                   : std::exp(2.0 * r2 * a2 / kk + g) / chi;
        if (!std::isfinite(n1) || !std::isfinite(n2) || n1 <= 0.0 || n2 <= 0.0) return false;
        const double change = std::max(std::abs(n1 - r1) / n1, std::abs(n2 - r2) / n2);
        r1 = n1;
        r2 = n2;
        if (change < 1e-14) return true;
    }
    return false;
}

// Damped Newton in (ln r1, ln r2) on the scaled residuals.
bool log_newton(const ModelParams& p, double& r1, double& r2, int& iters, int max_iter = 100) {
    double u1 = std::log(r1), u2 = std::log(r2);
    auto res = [&](double a, double b) { return scaled_residual(std::exp(a), std::exp(b), p); };
    auto norm = [](const std::array<double, 2>& f) { return std::max(std::abs(f[0]), std::abs(f[1])); };
    std::array<double, 2> f = res(u1, u2);
    for (int it = 0; it < max_iter; ++it) {
        ++iters;
        if (norm(f) < 1e-14) break;
        const double h = 1e-7;
        const auto a = res(u1 + h, u2), bb = res(u1 - h, u2);
        const auto c = res(u1, u2 + h), d = res(u1, u2 - h);
        const double j00 = (a[0] - bb[0]) / (2 * h), j10 = (a[1] - bb[1]) / (2 * h);
        const double j01 = (c[0] - d[0]) / (2 * h), j11 = (c[1] - d[1]) / (2 * h);
        const double det = j00 * j11 - j01 * j10;
        if (!std::isfinite(det) || det == 0.0) return false;
        double d1 = (f[0] * j11 - f[1] * j01) / det, d2 = (j00 * f[1] - j10 * f[0]) / det;
        const double m = std::max(std::abs(d1), std::abs(d2));
        if (m > 0.5) {
            d1 *= 0.5 / m;
            d2 *= 0.5 / m;
        }
        double lam = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            const double n1 = u1 - lam * d1, n2 = u2 - lam * d2;
            try {
                const auto fn = res(n1, n2);
                if (std::isfinite(fn[0]) && std::isfinite(fn[1]) && norm(fn) < norm(f)) {
                    u1 = n1;
                    u2 = n2;
                    f = fn;
                    accepted = true;
                    break;
                }
            } catch (const SingularityError&) {
            }
            lam *= 0.5;
        }
        if (!accepted) break;
        if (lam * m < 1e-15) break;
    }
    r1 = std::exp(u1);
    r2 = std::exp(u2);
    return norm(f) < 1e-11;
}

}  // namespace

ReducedRoots solve_reduced_radii(const ModelParams& p) {
    p.validate();
    const double rho = rho_of(p);
    if (!(p.alpha > 1.0) || !(p.alpha < 1.0 / rho))
        throw DomainError("solve_reduced_radii: alpha must lie in (1, 1/rho)");
    return reduced_roots_unchecked(p);
}

std::array<double, 2> radii_residual(double r1, double r2, const ModelParams& p) {
    const Interaction t = interaction_terms(r1, r2, p);
    return {p.swirl_axial(r1 * r1) + self_induction(r1, p) + t.T1,
            p.swirl_axial(r2 * r2) + p.kappa * self_induction(r2, p) + t.T2};
}

RadiiSolution solve_radii(const ModelParams& p, EquilibriumType type) {
    p.validate();
    const double rho = rho_of(p);
    // The hairpin regime (α ≤ 1) still has all four reduced roots, so only
    // the upper end of the band is enforced here.
    if (!(p.alpha < 1.0 / rho)) throw DomainError("solve_radii: alpha must be below 1/rho");
    const ReducedRoots rr = reduced_roots_unchecked(p);
    const Branches br = branches_of(type);

    double r1 = 0, r2 = 0;
    switch (type) {
        case EquilibriumType::I: r1 = rr.r1b; r2 = rr.r2b; break;
        case EquilibriumType::II: r1 = rr.r1b; r2 = rr.r2a; break;
        case EquilibriumType::III: r1 = 0.001; r2 = 1.0; break;
        case EquilibriumType::IV: r1 = rr.r1a; r2 = rr.r2a; break;
    }
    int iters = 0;
    RadiiSolution out{};
    bool ok = false;
    try {
        ok = coupled_picard(p, br, r1, r2, iters) && in_region(r1, r2, br, rho);
    } catch (const SingularityError&) {
        ok = false;
    }
    if (ok) {
        out.method = "picard";
        int polish = 0;
        log_newton(p, r1, r2, polish, 10);
        iters += polish;
    } else {
        // Grid of seeds over the type's region, tried in order of residual.
        const double small_lo = std::log(0.01 * rr.r0), small_hi = std::log(rho);
        const double large_lo = std::log(rho), large_hi = std::log(4.0 * rr.r2b);
        const double lo1 = br.large1 ? large_lo : small_lo, hi1 = br.large1 ? large_hi : small_hi;
        const double lo2 = br.large2 ? large_lo : small_lo, hi2 = br.large2 ? large_hi : small_hi;
        const int n = 24;
        std::vector<std::pair<double, std::pair<double, double>>> seeds;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double u1 = lo1 + (hi1 - lo1) * (i + 0.5) / n;
                const double u2 = lo2 + (hi2 - lo2) * (j + 0.5) / n;
                try {
                    const auto f = scaled_residual(std::exp(u1), std::exp(u2), p);
                    seeds.push_back({std::max(std::abs(f[0]), std::abs(f[1])), {u1, u2}});
                } catch (const SingularityError&) {
                }
            }
        std::sort(seeds.begin(), seeds.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& s : seeds) {
            double a = std::exp(s.second.first), b = std::exp(s.second.second);
            bool conv = false;
            try {
                conv = log_newton(p, a, b, iters);
            } catch (const SingularityError&) {
                conv = false;
            }
            if (conv && in_region(a, b, br, rho)) {
                r1 = a;
                r2 = b;
                ok = true;
                break;
            }
        }
        if (!ok)
            throw ConvergenceError(std::string("solve_radii: no Type ") + to_string(type) +
                                       " solution found (Picard and Newton-grid failed)",
                                   iters);
        out.method = "newton-grid";
    }
    const auto f = scaled_residual(r1, r2, p);
    out.r1 = r1;
    out.r2 = r2;
    out.iterations = iters;
    out.residual = std::max(std::abs(f[0]), std::abs(f[1]));
    if (!(out.residual < 1e-10))
        throw ConvergenceError("solve_radii: residual " + std::to_string(out.residual) +
                                   " above 1e-10",
                               iters);
    return out;
}

double axis_velocity(double x, double r1, double r2, double xi, const ModelParams& p) {
    const double d = x - xi;
    const double D1 = r1 * r1 + d * d, D2 = r2 * r2 + d * d;
    return p.swirl_axial(0.0) +
           pi * (r1 * r1 / (D1 * std::sqrt(D1)) + p.kappa * r2 * r2 / (D2 * std::sqrt(D2)));
}

StagnationPoints stagnation_offset(double r1, double r2, double xi, const ModelParams& p) {
    auto f = [&](double eta) { return axis_velocity(xi + eta, r1, r2, xi, p); };
    if (!(f(0.0) > 0.0))
        throw NoStagnationError("stagnation_offset: axial velocity at the ring plane is not "
                                "positive; no recirculation bubble");
    double hi = std::max(r1, r2);
    int guard = 0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw NoStagnationError("stagnation_offset: no sign change");
    }
    const RootResult root = find_root(f, RootBracket{0.0, hi}, 1e-15 * hi, 400);
    return {root.x, xi + root.x, xi - root.x};
}

double saddle_function(double r, double r1, double r2, double xi, const ModelParams& p) {
    (void)xi;
    double sum = 0.0;
    for (int k = 1; k <= 2; ++k) {
        const double rk = k == 1 ? r1 : r2;
        const auto w = sigma_integrate<1>(r, rk, 0.0, p.quad, [&](const SigmaPoint& sp) {
            return std::array<double, 1>{(rk - r * sp.cos2) *
                                         inv_pow(sp.delta, KernelPower::three_halves)};
        });
        sum += p.kappa_of(k) * rk * w[0];
    }
    return p.swirl_axial(r * r) + 2.0 * sum;
}

double interior_saddle(double r1, double r2, double xi, const ModelParams& p) {
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    const double inset = 1e-6 * (hi - lo);
    auto f = [&](double r) { return saddle_function(r, r1, r2, xi, p); };
    const double a = lo + inset, b = hi - inset;
    const double fa = f(a), fb = f(b);
    if (!(fa * fb < 0.0))
        throw ConvergenceError("interior_saddle: no sign change between the ring radii");
    const RootResult root = find_root(f, RootBracket{a, b}, 1e-15 * hi, 400);
    return root.x;
}

namespace {

struct JacobianBlocks {
    double c;                      // 4 r1 r2 ∫cos2σ Δ^{-3/2}
    double q11, q12, q21, q22;     // ∂Ψ_i/∂s_j
};

JacobianBlocks jacobian_blocks(double r1, double r2, const ModelParams& p) {
    // Outputs: I3, W_b, W_a, ∂r1 W_b, ∂r2 W_b, ∂r1 W_a, ∂r2 W_a
    const auto k = sigma_integrate<7>(r1, r2, 0.0, p.quad, [&](const SigmaPoint& sp) {
        const double c = sp.cos2;
        const double d32 = inv_pow(sp.delta, KernelPower::three_halves);
        const double d52 = d32 / sp.delta;
        const double lb = r2 - r1 * c, la = r1 - r2 * c;
        return std::array<double, 7>{c * d32,
                                     lb * d32,
                                     la * d32,
                                     -c * d32 - 3.0 * lb * la * d52,
                                     d32 - 3.0 * lb * lb * d52,
                                     d32 - 3.0 * la * la * d52,
                                     -c * d32 - 3.0 * la * lb * d52};
    });
    const double eps = interaction_sign(r1, r2, p.coupling);
    const double kk = p.kappa;
    const double s1 = r1 * r1, s2 = r2 * r2;
    JacobianBlocks b{};
    b.c = 4.0 * r1 * r2 * k[0];
    const double dr1T1 = 2.0 * kk * r2 * k[3];
    const double dr2T1 = 2.0 * kk * k[1] + 2.0 * kk * r2 * k[4];
    const double dr1T2 = 2.0 * k[2] + 2.0 * r1 * k[5];
    const double dr2T2 = 2.0 * r1 * k[6];
    b.q11 = -p.alpha * (p.a1 + 2.0 * p.a2 * s1) + self_induction_dr(r1, p) / (2.0 * r1) +
            eps * dr1T1 / (2.0 * r1);
    b.q12 = eps * dr2T1 / (2.0 * r2);
    b.q21 = eps * dr1T2 / (2.0 * r1);
    b.q22 = -p.alpha * (p.a1 + 2.0 * p.a2 * s2) + kk * self_induction_dr(r2, p) / (2.0 * r2) +
            eps * dr2T2 / (2.0 * r2);
    return b;
}

}  // namespace

JacobianResult ring_jacobian(double r1, double r2, double xi, const ModelParams& p) {
    (void)xi;
    const JacobianBlocks b = jacobian_blocks(r1, r2, p);
    const double kk = p.kappa;
    JacobianResult out;
    out.J = {{{0.0, 0.0, kk * b.c, -kk * b.c},
              {0.0, 0.0, -b.c, b.c},
              {b.q11, b.q12, 0.0, 0.0},
              {b.q21, b.q22, 0.0, 0.0}}};
    out.lambda_sq = b.c * (kk * (b.q11 - b.q21) - (b.q12 - b.q22));
    out.center = out.lambda_sq < 0.0;
    out.nu = std::sqrt(std::abs(out.lambda_sq));

    // J = [[0, P], [Q, 0]] with P of rank one: λ² runs over the spectrum of
    // PQ, i.e. {0, tr PQ}. The double zero is a Jordan block, which a generic
    // eigensolver only resolves to sqrt(machine epsilon).
    const std::complex<double> root = std::sqrt(std::complex<double>(out.lambda_sq, 0.0));
    std::array<std::complex<double>, 4> ev{0.0, 0.0, -root, root};
    std::sort(ev.begin() + 2, ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    out.eigenvalues = ev;
    return out;
}

CenterCoefficients center_coefficients(const JacobianResult& jac, const ModelParams& p) {
    const double kk = p.kappa;
    const auto& J = jac.J;
    const double c = J[1][3];
    const double q11 = J[2][0], q12 = J[2][1];
    CenterCoefficients out;
    const double X = -c * (q12 - kk * q11);
    out.B = X;
    out.A = -jac.lambda_sq + X;   // ν² + X for a center
    out.nu = jac.nu;

    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = J[i][j];
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, true);
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(best))) best = i;
    const std::complex<double> lam = es.eigenvalues()(best);
    out.nu_eigen = jac.center ? std::abs(lam.imag()) : std::abs(lam.real());
    const Eigen::Vector4cd v = es.eigenvectors().col(best);
    out.ratio_eigen = std::abs(v(2)) > 0.0 ? (v(3) / v(2)).real() : std::nan("");

    if (!jac.center) {
        out.x_gain = std::nan("");
        out.note = "ring equilibrium is a saddle (real eigenvalue pair); no oscillation";
        out.agrees = std::abs(out.nu - out.nu_eigen) <= 1e-6 * out.nu;
        return out;
    }
    if (out.B == 0.0) {
        out.note = "B = 0; A/B taken from the eigenvector";
        out.x_gain = (q12 - kk * q11) / (kk * out.nu);
        out.agrees = std::abs(out.nu - out.nu_eigen) <= 1e-6 * out.nu;
        return out;
    }
    out.x_gain = (q12 - kk * q11) / (kk * out.nu);
    const double ratio = out.A / out.B;
    out.agrees = std::abs(out.nu - out.nu_eigen) <= 1e-6 * out.nu &&
                 std::abs(ratio - out.ratio_eigen) <= 1e-6 * std::max(1.0, std::abs(ratio));
    if (!out.agrees) out.note = "closed-form and eigenvector paths disagree";
    return out;
}

double EquilibriumConfig::r_hat() const { return std::sqrt(s_hat); }

EquilibriumConfig resolve_equilibrium(const ModelParams& p, EquilibriumType type, double xi) {
    const RadiiSolution rs = solve_radii(p, type);
    EquilibriumConfig c;
    c.type = type;
    c.r1_hat = rs.r1;
    c.r2_hat = rs.r2;
    c.s1_hat = rs.r1 * rs.r1;
    c.s2_hat = rs.r2 * rs.r2;
    c.xi_hat = xi;
    c.radii_method = rs.method;
    c.radii_residual = rs.residual;
    const StagnationPoints sp = stagnation_offset(rs.r1, rs.r2, xi, p);
    c.eta = sp.eta;
    c.x_plus = sp.x_plus;
    c.x_minus = sp.x_minus;
    const double rhat = interior_saddle(rs.r1, rs.r2, xi, p);
    c.s_hat = rhat * rhat;
    const JacobianResult jac = ring_jacobian(rs.r1, rs.r2, xi, p);
    const CenterCoefficients cc = center_coefficients(jac, p);
    c.ring_center = jac.center;
    c.nu = cc.nu;
    c.A = cc.A;
    c.B = cc.B;
    c.x_gain = cc.x_gain;
    c.eps_star = 0.5 * std::min(std::abs(c.s_hat - c.s1_hat), std::abs(c.s2_hat - c.s_hat));
    c.a_hat = c.s1_hat + p.kappa * c.s2_hat;
    return c;
}

std::vector<FixedPoint> classify_fixed_points(const EquilibriumConfig& c, const ModelParams& p) {
    std::vector<FixedPoint> out;
    const double r1 = c.r1_hat, r2 = c.r2_hat;
    for (int sgn : {+1, -1}) {
        const double d = sgn * c.eta;
        double a = 0.0, b = 0.0;
        for (int k = 1; k <= 2; ++k) {
            const double rk = k == 1 ? r1 : r2;
            const double D = rk * rk + d * d;
            a += p.kappa_of(k) * rk * rk / std::pow(D, 2.5);
            b += p.kappa_of(k) * rk * rk * (rk * rk - 4.0 * d * d) / std::pow(D, 3.5);
        }
        FixedPoint fp;
        fp.label = sgn > 0 ? "p_plus" : "p_minus";
        fp.kind = "saddle";
        fp.s = 0.0;
        fp.x = c.xi_hat + d;
        const double dsPhi = 3.0 * pi * d * a;
        const double dxPsi = -dsPhi;
        const double dsPsi = 0.75 * pi * b - p.alpha * p.a1;
        fp.linearisation = {dsPhi, 0.0, dsPsi, dxPsi};
        fp.lambda_unstable = std::abs(dsPhi);
        fp.lambda_stable = -std::abs(dsPhi);
        fp.tangent_slope = dsPsi / (dsPhi - dxPsi);
        out.push_back(fp);
    }
    {
        const double r = c.r_hat();
        double dxPhi = 0.0, drx = 0.0;
        for (int k = 1; k <= 2; ++k) {
            const double rk = k == 1 ? r1 : r2;
            const auto w = sigma_integrate<2>(r, rk, 0.0, p.quad, [&](const SigmaPoint& sp) {
                const double cc = sp.cos2;
                const double d32 = inv_pow(sp.delta, KernelPower::three_halves);
                const double d52 = d32 / sp.delta;
                return std::array<double, 2>{
                    cc * d32, -cc * d32 - 3.0 * (rk - r * cc) * (r - rk * cc) * d52};
            });
            dxPhi += 4.0 * r * p.kappa_of(k) * rk * w[0];
            drx += p.kappa_of(k) * rk * w[1];
        }
        const double dsPsi = -p.alpha * (p.a1 + 2.0 * p.a2 * c.s_hat) + drx / r;
        FixedPoint fp;
        fp.label = "q";
        fp.kind = dxPhi * dsPsi > 0.0 ? "saddle" : "center";
        fp.s = c.s_hat;
        fp.x = c.xi_hat;
        fp.linearisation = {0.0, dxPhi, dsPsi, 0.0};
        const double l = std::sqrt(std::abs(dxPhi * dsPsi));
        fp.lambda_unstable = l;
        fp.lambda_stable = -l;
        fp.tangent_slope = dxPhi != 0.0 ? l / dxPhi : 0.0;  // dx/ds of the unstable direction
        out.push_back(fp);
    }
    for (int k = 1; k <= 2; ++k) {
        FixedPoint fp;
        fp.label = k == 1 ? "q1" : "q2";
        fp.kind = "singular_center";
        fp.s = k == 1 ? c.s1_hat : c.s2_hat;
        fp.x = c.xi_hat;
        out.push_back(fp);
    }
    return out;
}

}  // namespace ringlab
