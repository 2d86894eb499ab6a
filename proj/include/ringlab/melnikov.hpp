#pragma once

#include <vector>

#include "ringlab/equilibria.hpp"
#include "ringlab/kinematics.hpp"
#include "ringlab/parallel.hpp"

namespace ringlab {

struct ThetaValues {
    double theta1 = 0, theta2 = 0, theta3 = 0, theta4 = 0;
};

// Θ1 = ∂s S, Θ2 = ∂s C, Θ3 = ∂x S / 2r, Θ4 = ∂x C / 2r at a point, where
// 𝓗₁ = S sin νt + C cos νt.
ThetaValues theta_at(const ParticleState& q, const EquilibriumConfig& c, const ModelParams& p);

struct MelnikovOptions {
    double truncation_T = 0.0;   // 0: 12 / measured decay rate
    double rel_tol = 1e-10;      // adaptive quadrature tolerance
    double tail_tolerance = 1e-3;  // relative to |C|
    int n_tau = 32;
    Execution exec = Execution::parallel;
    IntegratorSpec spec{};
};

// Upper branch φ_u prepared for the Melnikov integrals: the p₊ half is
// integrated along the unstable manifold and the p₋ half is its mirror image
// (s_u(-t) = s_u(t), x_u(-t) - ξ̂ = ξ̂ - x_u(t)).
class MelnikovContext {
public:
    MelnikovContext(const EquilibriumConfig& c, const ModelParams& p,
                    const MelnikovOptions& opt = {});

    const SeparatrixTrace& trace() const { return trace_; }
    double decay_rate() const { return decay_rate_; }
    double truncation_T() const { return T_; }
    double half_line_integral() const { return K_; }   // M(τ) = K cos ντ
    double tail_estimate() const { return tail_; }
    const EquilibriumConfig& config() const { return c_; }
    const ModelParams& params() const { return p_; }

    ThetaValues theta_profiles(double t) const;
    // F1 = ṡΘ1 + 2rẋΘ3, F2 = ṡΘ2 + 2rẋΘ4 along φ_u.
    std::array<double, 2> integrand_parts(double t) const;

    // Half-line cosine form.
    double melnikov(double tau) const;
    // Full-line form ∫ {ṡ ∂s𝓗₁ + ẋ ∂x𝓗₁}(φ_u(t), t + τ) dt over [-T, T].
    double melnikov_full(double tau) const;

private:
    EquilibriumConfig c_;
    ModelParams p_;
    MelnikovOptions opt_;
    SeparatrixTrace trace_;
    double decay_rate_ = 0, T_ = 0, K_ = 0, tail_ = 0;
    std::array<std::array<double, 4>, 2> moments_{};
};

struct MelnikovResult {
    std::vector<double> tau_grid;
    std::vector<double> values;          // full-line form
    std::vector<double> values_reduced;  // half-line cosine form
    double C = 0, phase = 0, rms_residual = 0;
    double truncation_T = 0, tail_estimate = 0, decay_rate = 0;
    double max_form_gap = 0;             // max |full - reduced| / |C|
    std::vector<double> zeros;           // sign changes of the sampled values
    bool form_violation = false;         // residual > 5% of |C|
};

double melnikov(double tau, const EquilibriumConfig& c, const ModelParams& p,
                const MelnikovOptions& opt = {});

MelnikovResult melnikov_sweep(const MelnikovContext& ctx, int n_tau,
                              Execution exec = Execution::parallel);
MelnikovResult melnikov_sweep(const EquilibriumConfig& c, const ModelParams& p,
                              const MelnikovOptions& opt = {});

}  // namespace ringlab
