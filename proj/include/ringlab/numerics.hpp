#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ringlab/errors.hpp"

namespace ringlab {

// ---------------------------------------------------------------------------
// Specs

struct QuadratureSpec {
    int order = 96;                  // Gauss-Legendre nodes on the unsplit σ-interval
    double split_threshold = 0.1;    // subdivide when min Δ / max Δ falls below this
    double singular_threshold = 1e-14;  // min Δ / max Δ below this is a core hit
    void validate() const;
};

struct IntegratorSpec {
    double step = 1e-4;      // upper bound; the actual step divides the span evenly
    double max_time = 1e4;
    void validate() const;
};

// ---------------------------------------------------------------------------
// Complete elliptic integrals (modulus convention, F(λ) = ∫ dσ / sqrt(1 - λ² sin²σ))

struct EllipticKE {
    double K;
    double E;
};

EllipticKE elliptic_KE(double lambda);

// Same integrals parameterised by the complementary modulus k' = sqrt(1-λ²);
// also returns K-E without cancellation.
struct EllipticKEc {
    double K;
    double E;
    double K_minus_E;
};
EllipticKEc elliptic_KE_complement(double lambda, double kprime);

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Cached, thread safe; the reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

// ---------------------------------------------------------------------------
// σ-kernels: ∫_0^{π/2} w(σ) Δ(σ)^{-p} dσ with Δ = (ra-rb)² + dx² + 4 ra rb sin²σ

enum class KernelPower { half, three_halves, five_halves };
enum class KernelWeight {
    one,
    cos2,   // cos 2σ
    lin_b,  // rb - ra cos 2σ
    lin_a,  // ra - rb cos 2σ
};

struct SigmaPoint {
    double sin2;   // sin²σ
    double cos2;   // cos 2σ
    double delta;  // Δ(σ)
};

namespace detail {

struct SigmaPanels {
    // Mapped nodes/weights over [0, π/2]; either a cached single panel or a
    // geometric grading towards σ = 0.
    const double* s2 = nullptr;
    const double* w = nullptr;
    std::size_t n = 0;
    std::vector<double> own_s2, own_w;
};

void sigma_panels(double ra, double rb, double dx, const QuadratureSpec& q,
                  SigmaPanels& out);

}  // namespace detail

// Multi-output σ-integral. `integrand(const SigmaPoint&)` returns
// std::array<double, N>; all outputs share one node set.
template <std::size_t N, class F>
std::array<double, N> sigma_integrate(double ra, double rb, double dx,
                                      const QuadratureSpec& q, F&& integrand) {
    detail::SigmaPanels panels;
    detail::sigma_panels(ra, rb, dx, q, panels);
    const double d2 = (ra - rb) * (ra - rb) + dx * dx;
    const double g = 4.0 * ra * rb;
    std::array<double, N> acc{};
    for (std::size_t i = 0; i < panels.n; ++i) {
        const double s2 = panels.s2[i];
        SigmaPoint p{s2, 1.0 - 2.0 * s2, d2 + g * s2};
        const auto v = integrand(p);
        for (std::size_t k = 0; k < N; ++k) acc[k] += panels.w[i] * v[k];
    }
    return acc;
}

double sigma_kernel(double ra, double rb, double dx, KernelPower power,
                    KernelWeight weight, const QuadratureSpec& q = {});

// ∫ cos2σ Δ^{-1/2} through the closed elliptic form
// (r+ + r-)(K - E) / (2 ra rb), r±² = (ra ± rb)² + dx².
double cos2_half_kernel(double ra, double rb, double dx,
                        const QuadratureSpec& q = {});

inline double inv_pow(double delta, KernelPower p) {
    const double inv_sqrt = 1.0 / std::sqrt(delta);
    switch (p) {
        case KernelPower::half: return inv_sqrt;
        case KernelPower::three_halves: return inv_sqrt / delta;
        case KernelPower::five_halves: return inv_sqrt / (delta * delta);
    }
    return inv_sqrt;
}

// ---------------------------------------------------------------------------
// Fixed-step classical RK4

template <std::size_t N>
using StateN = std::array<double, N>;

template <std::size_t N>
struct Trajectory {
    std::vector<double> t;
    std::vector<StateN<N>> y;
    bool aborted = false;      // singularity or stop predicate
    double abort_time = std::numeric_limits<double>::quiet_NaN();
    std::string abort_reason;

    const StateN<N>& back() const { return y.back(); }
};

struct NeverStop {
    template <class S>
    bool operator()(double, const S&) const { return false; }
};

// One step with k1 = f(t, y) already evaluated.
template <std::size_t N, class Field>
StateN<N> rk4_step(Field& f, double t, const StateN<N>& y, double h, const StateN<N>& k1) {
    StateN<N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const StateN<N> k2 = f(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const StateN<N> k3 = f(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    const StateN<N> k4 = f(t + h, tmp);
    StateN<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <std::size_t N, class Field>
StateN<N> rk4_step(Field& f, double t, const StateN<N>& y, double h) {
    return rk4_step<N>(f, t, y, h, f(t, y));
}

// Number of equal steps covering [t0, t1] with step no larger than `step`.
long rk4_step_count(double t0, double t1, double step);

// Integrates ẏ = f(t, y) on [t0, t1]. Every `stride`-th state is stored
// (plus the final one). A SingularityError raised by the field, or `stop`
// returning true, ends the run early and keeps the last good state.
template <std::size_t N, class Field, class Stop = NeverStop>
Trajectory<N> rk4_integrate(Field&& f, const StateN<N>& y0, double t0, double t1,
                            const IntegratorSpec& spec, long stride = 1,
                            Stop&& stop = Stop{}) {
    spec.validate();
    if (!(t1 > t0)) throw DomainError("rk4_integrate: t1 must exceed t0");
    if (t1 - t0 > spec.max_time) throw DomainError("rk4_integrate: span exceeds max_time");
    if (stride < 1) stride = 1;
    const long n = rk4_step_count(t0, t1, spec.step);
    const double h = (t1 - t0) / static_cast<double>(n);
    Trajectory<N> out;
    out.t.reserve(static_cast<std::size_t>(n / stride + 2));
    out.y.reserve(static_cast<std::size_t>(n / stride + 2));
    out.t.push_back(t0);
    out.y.push_back(y0);
    StateN<N> y = y0;
    for (long i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        StateN<N> next;
        try {
            next = rk4_step<N>(f, t, y, h);
        } catch (const SingularityError& e) {
            out.aborted = true;
            out.abort_time = t;
            out.abort_reason = e.what();
            if (out.t.back() != t) {
                out.t.push_back(t);
                out.y.push_back(y);
            }
            return out;
        }
        y = next;
        const double tn = (i + 1 == n) ? t1 : t0 + static_cast<double>(i + 1) * h;
        const bool halt = stop(tn, y);
        if ((i + 1) % stride == 0 || i + 1 == n || halt) {
            out.t.push_back(tn);
            out.y.push_back(y);
        }
        if (halt) {
            out.aborted = true;
            out.abort_time = tn;
            out.abort_reason = "stop condition";
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scalar roots

struct RootResult {
    double x;
    double residual;
    int iterations;
};

enum class RootMethod { bisection, newton, picard };

struct RootBracket {
    double lo;
    double hi;
};

using ScalarFn = std::function<double(double)>;

// Bisection on a sign-changing bracket; stops when the bracket is narrower
// than xtol or the residual is exactly zero.
RootResult find_root(const ScalarFn& f, RootBracket bracket, double xtol = 1e-12,
                     int max_iter = 400);

// Newton (f is the residual; derivative by central differences unless given)
// or Picard (f is the iteration map x -> g(x)).
RootResult find_root(const ScalarFn& f, double seed, RootMethod method,
                     double tol = 1e-12, int max_iter = 10000,
                     const ScalarFn& derivative = {});

// ---------------------------------------------------------------------------
// Cosine fit  v ≈ C cos(ντ + φ), φ ∈ (-π/2, π/2], C signed

struct CosineFit {
    double C;
    double phase;
    double rms_residual;
};

CosineFit fit_cosine(const std::vector<std::pair<double, double>>& samples, double nu);

// ---------------------------------------------------------------------------
// Small helpers

// Cubic Hermite interpolation on a sampled curve with known derivatives.
double hermite(double t0, double t1, double y0, double y1, double d0, double d1, double t);

}  // namespace ringlab
