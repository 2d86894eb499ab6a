#include "ringlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace ringlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
}  // namespace

void QuadratureSpec::validate() const {
    if (order < 8) throw DomainError("quadrature order must be at least 8");
    if (!(split_threshold > 0.0)) throw DomainError("split_threshold must be positive");
    if (!(singular_threshold > 0.0)) throw DomainError("singular_threshold must be positive");
}

void IntegratorSpec::validate() const {
    if (!(max_time > 0.0) || !std::isfinite(max_time))
        throw DomainError("max_time must be positive and finite");
    if (!(step > 0.0) || step > max_time)
        throw DomainError("integrator step must lie in (0, max_time]");
}

// ---------------------------------------------------------------------------

EllipticKEc elliptic_KE_complement(double lambda, double kprime) {
    if (!(lambda >= 0.0) || !(lambda < 1.0) || !(kprime > 0.0))
        throw DomainError("elliptic_KE: modulus must lie in [0, 1)");
    double a = 1.0, b = kprime, c = lambda;
    double weight = 0.5;
    double sum = weight * c * c;
    for (int it = 0; it < 64; ++it) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        // c_{n+1} = (a_n - b_n)/2 without the cancellation; a and b can stall an ulp apart
        c = c * c / (4.0 * an);
        a = an;
        b = bn;
        weight *= 2.0;
        sum += weight * c * c;
        if (std::abs(c) <= 1e-17 * a) break;
    }
    const double K = kPi / (2.0 * a);
    const double kme = K * sum;
    return {K, K - kme, kme};
}

EllipticKE elliptic_KE(double lambda) {
    if (!(lambda >= 0.0) || !(lambda < 1.0))
        throw DomainError("elliptic_KE: modulus must lie in [0, 1)");
    const double kp = std::sqrt((1.0 - lambda) * (1.0 + lambda));
    const auto r = elliptic_KE_complement(lambda, kp);
    return {r.K, r.E};
}

// ---------------------------------------------------------------------------

namespace {

GaussRule build_gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // one more evaluation at the converged node for the weight
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[static_cast<std::size_t>(i)] = -z;
        r.x[static_cast<std::size_t>(n - 1 - i)] = z;
        r.w[static_cast<std::size_t>(i)] = w;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

struct SigmaRule {
    std::vector<double> s2, w;
};

struct RuleCache {
    std::mutex mu;
    std::map<int, std::unique_ptr<GaussRule>> gauss;
    std::map<int, std::unique_ptr<SigmaRule>> sigma;
};

RuleCache& cache() {
    static RuleCache c;
    return c;
}

const SigmaRule& sigma_rule(int n) {
    thread_local int last_n = -1;
    thread_local const SigmaRule* last = nullptr;
    if (n == last_n) return *last;
    const GaussRule& g = gauss_legendre(n);
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto& slot = c.sigma[n];
    if (!slot) {
        auto r = std::make_unique<SigmaRule>();
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double s = 0.25 * kPi * (g.x[i] + 1.0);
            const double sn = std::sin(s);
            r->s2.push_back(sn * sn);
            r->w.push_back(0.25 * kPi * g.w[i]);
        }
        slot = std::move(r);
    }
    last_n = n;
    last = slot.get();
    return *last;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto& slot = c.gauss[n];
    if (!slot) slot = std::make_unique<GaussRule>(build_gauss_legendre(n));
    return *slot;
}

namespace detail {

void sigma_panels(double ra, double rb, double dx, const QuadratureSpec& q,
                  SigmaPanels& out) {
    if (!(ra > 0.0) || !(rb > 0.0))
        throw DomainError("sigma kernel: radii must be positive");
    const double d2 = (ra - rb) * (ra - rb) + dx * dx;
    const double g = 4.0 * ra * rb;
    if (!(d2 >= q.singular_threshold * (d2 + g))) {
        std::ostringstream os;
        os << "sigma kernel: coincident ring coordinates (min Delta = " << d2 << ")";
        throw SingularityError(os.str());
    }
    if (d2 >= q.split_threshold * (d2 + g)) {
        const SigmaRule& r = sigma_rule(q.order);
        out.s2 = r.s2.data();
        out.w = r.w.data();
        out.n = r.s2.size();
        return;
    }
    // Peak of width ~w at σ = 0: geometrically graded panels [0,w],[w,3w],...
    const double width = std::sqrt(d2 / g);
    const int m = std::max(16, q.order / 4);
    const GaussRule& gr = gauss_legendre(m);
    std::vector<double> edges{0.0};
    double b = width;
    while (b < kHalfPi * 0.75) {
        edges.push_back(b);
        b *= 3.0;
    }
    edges.push_back(kHalfPi);
    out.own_s2.clear();
    out.own_w.clear();
    out.own_s2.reserve(edges.size() * static_cast<std::size_t>(m));
    out.own_w.reserve(edges.size() * static_cast<std::size_t>(m));
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], hi = edges[p + 1];
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gr.x.size(); ++i) {
            const double s = c + h * gr.x[i];
            const double sn = std::sin(s);
            out.own_s2.push_back(sn * sn);
            out.own_w.push_back(h * gr.w[i]);
        }
    }
    out.s2 = out.own_s2.data();
    out.w = out.own_w.data();
    out.n = out.own_s2.size();
}

}  // namespace detail

double sigma_kernel(double ra, double rb, double dx, KernelPower power,
                    KernelWeight weight, const QuadratureSpec& q) {
    if (power == KernelPower::half && weight == KernelWeight::cos2)
        return cos2_half_kernel(ra, rb, dx, q);
    const auto v = sigma_integrate<1>(ra, rb, dx, q, [&](const SigmaPoint& p) {
        double w = 1.0;
        switch (weight) {
            case KernelWeight::one: w = 1.0; break;
            case KernelWeight::cos2: w = p.cos2; break;
            case KernelWeight::lin_b: w = (rb - ra) + 2.0 * ra * p.sin2; break;
            case KernelWeight::lin_a: w = (ra - rb) + 2.0 * rb * p.sin2; break;
        }
        return std::array<double, 1>{w * inv_pow(p.delta, power)};
    });
    return v[0];
}

double cos2_half_kernel(double ra, double rb, double dx, const QuadratureSpec& q) {
    if (!(ra > 0.0) || !(rb > 0.0))
        throw DomainError("sigma kernel: radii must be positive");
    const double dm2 = (ra - rb) * (ra - rb) + dx * dx;
    if (!(dm2 >= q.singular_threshold * (dm2 + 4.0 * ra * rb)))
        throw SingularityError("sigma kernel: coincident ring coordinates");
    const double rp = std::sqrt((ra + rb) * (ra + rb) + dx * dx);
    const double rm = std::sqrt(dm2);
    const double sum = rp + rm;
    const double lambda = (rp - rm) / sum;
    const double kprime = 2.0 * std::sqrt(rp * rm) / sum;
    const auto ke = elliptic_KE_complement(lambda, kprime);
    return sum * ke.K_minus_E / (2.0 * ra * rb);
}

// ---------------------------------------------------------------------------

long rk4_step_count(double t0, double t1, double step) {
    const double span = t1 - t0;
    const double raw = span / step;
    long n = static_cast<long>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::max(1L, n);
}

// ---------------------------------------------------------------------------

RootResult find_root(const ScalarFn& f, RootBracket bracket, double xtol, int max_iter) {
    double lo = bracket.lo, hi = bracket.hi;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream os;
        os << "bisection: no sign change on [" << lo << ", " << hi << "] (f = " << flo
           << ", " << fhi << ")";
        throw ConvergenceError(os.str(), 0);
    }
    int it = 0;
    double mid = 0.5 * (lo + hi), fmid = 0.0;
    for (; it < max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        if (hi - lo <= xtol || mid == lo || mid == hi) break;
        fmid = f(mid);
        if (fmid == 0.0) return {mid, 0.0, it + 1};
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    if (it >= max_iter) throw ConvergenceError("bisection: iteration cap reached", it);
    const double x = std::abs(flo) < std::abs(fhi) ? lo : hi;
    return {x, std::min(std::abs(flo), std::abs(fhi)), it};
}

RootResult find_root(const ScalarFn& f, double seed, RootMethod method, double tol,
                     int max_iter, const ScalarFn& derivative) {
    if (method == RootMethod::bisection)
        throw DomainError("find_root: bisection needs a bracket");
    double x = seed;
    if (method == RootMethod::picard) {
        for (int it = 1; it <= max_iter; ++it) {
            const double next = f(x);
            if (!std::isfinite(next)) throw ConvergenceError("picard: iterate diverged", it);
            const double change = std::abs(next - x);
            x = next;
            if (change < tol) return {x, std::abs(f(x) - x), it};
        }
        throw ConvergenceError("picard: iteration cap reached", max_iter);
    }
    for (int it = 1; it <= max_iter; ++it) {
        const double fx = f(x);
        if (!std::isfinite(fx)) throw ConvergenceError("newton: residual not finite", it);
        if (std::abs(fx) < tol) return {x, std::abs(fx), it - 1};
        double d;
        if (derivative) {
            d = derivative(x);
        } else {
            const double h = 1e-7 * std::max(1.0, std::abs(x));
            d = (f(x + h) - f(x - h)) / (2.0 * h);
        }
        if (!(std::abs(d) > 0.0) || !std::isfinite(d))
            throw ConvergenceError("newton: vanishing derivative", it);
        const double step = fx / d;
        x -= step;
        if (std::abs(step) < tol) return {x, std::abs(f(x)), it};
    }
    throw ConvergenceError("newton: iteration cap reached", max_iter);
}

// ---------------------------------------------------------------------------

CosineFit fit_cosine(const std::vector<std::pair<double, double>>& samples, double nu) {
    if (samples.size() < 8) throw FitError("fit_cosine: need at least 8 samples");
    double cc = 0, ss = 0, cs = 0, vc = 0, vs = 0;
    for (const auto& [tau, v] : samples) {
        const double c = std::cos(nu * tau), s = std::sin(nu * tau);
        cc += c * c;
        ss += s * s;
        cs += c * s;
        vc += v * c;
        vs += v * s;
    }
    const double det = cc * ss - cs * cs;
    if (!(std::abs(det) > 1e-12 * std::max(1.0, cc * ss)))
        throw FitError("fit_cosine: degenerate sample set");
    const double a = (vc * ss - vs * cs) / det;
    const double b = (vs * cc - vc * cs) / det;
    double C = std::hypot(a, b);
    double phase = (C == 0.0) ? 0.0 : std::atan2(-b, a);
    if (phase > 0.5 * kPi) {
        phase -= kPi;
        C = -C;
    } else if (phase <= -0.5 * kPi) {
        phase += kPi;
        C = -C;
    }
    double rss = 0.0;
    for (const auto& [tau, v] : samples) {
        const double r = v - (a * std::cos(nu * tau) + b * std::sin(nu * tau));
        rss += r * r;
    }
    return {C, phase, std::sqrt(rss / static_cast<double>(samples.size()))};
}

double hermite(double t0, double t1, double y0, double y1, double d0, double d1, double t) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

}  // namespace ringlab
