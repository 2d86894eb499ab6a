#pragma once

#include <memory>
#include <vector>

#include "ringlab/equilibria.hpp"
#include "ringlab/kinematics.hpp"

namespace ringlab {

enum class MotionMode { analytic, integrated };

const char* to_string(MotionMode m);
MotionMode motion_mode_from_string(const std::string& s);

struct OscillationSpec {
    double mu = 0.0;
    MotionMode mode = MotionMode::analytic;
    double phase = 0.0;   // added to νt
};

// Throws DomainError unless |μ| ≤ ε*.
void check_amplitude(const EquilibriumConfig& c, double mu);

// First-order ring oscillation about the equilibrium:
//   s1 = ŝ1 + μ sin θ,  s2 = ŝ2 - (μ/κ) sin θ,
//   x1 = ξ̂ + βμ cos θ,  x2 = ξ̂ + β(A/B)μ cos θ,   θ = νt + phase,
// with β the x-gain of the linear mode (EquilibriumConfig::x_gain).
RingPairState ring_motion_analytic(double t, const EquilibriumConfig& c, const ModelParams& p,
                                   const OscillationSpec& spec);

struct CenterManifoldSeed {
    RingPairState state;
    double psi1 = 0.0, psi2 = 0.0;   // x1(0) - ξ̂, x2(0) - ξ̂
    double ratio = 0.0;              // ψ2/ψ1, compare with A/B
    double period = 0.0;
    double closure_gap = 0.0;        // scaled gap in (s1, s2, x1 - x2) after one period
    double drift1 = 0.0, drift2 = 0.0;  // axial advance of each ring per period
    double diameter = 0.0;           // max - min of s1 over the period
    int iterations = 0;
    Trajectory<4> orbit;             // one period, every step
};

CenterManifoldSeed center_manifold_seed(const EquilibriumConfig& c, const ModelParams& p,
                                        double mu, const IntegratorSpec& spec = {});

// Ring motion as a callable of time, analytic or integrated (one stored
// period extended periodically with the per-period drift).
class RingMotion {
public:
    RingMotion(const EquilibriumConfig& c, const ModelParams& p, const OscillationSpec& spec,
               const IntegratorSpec& ispec = {});
    RingPairState operator()(double t) const;
    const OscillationSpec& spec() const { return spec_; }
    const CenterManifoldSeed* seed() const { return seed_.get(); }

private:
    EquilibriumConfig c_;
    ModelParams p_;
    OscillationSpec spec_;
    std::shared_ptr<const CenterManifoldSeed> seed_;
    std::shared_ptr<const RingPath> path_;
};

RingPairState ring_motion(double t, const EquilibriumConfig& c, const ModelParams& p,
                          const OscillationSpec& spec);

// 𝓗₁ = S(s, x) sin νt + C(s, x) cos νt, the μ-derivative of 𝓗 along the
// analytic ring motion.
struct H1Parts {
    double S = 0.0, C = 0.0;
};
H1Parts h1_parts(const ParticleState& q, const EquilibriumConfig& c, const ModelParams& p);
double h1_perturbation(const ParticleState& q, double t, const EquilibriumConfig& c,
                       const ModelParams& p);

struct StagnationSample {
    double t, x_minus, x_plus;
};

std::vector<StagnationSample> stagnation_trace(const EquilibriumConfig& c, const ModelParams& p,
                                               const OscillationSpec& spec,
                                               const std::vector<double>& t_grid,
                                               Execution exec = Execution::parallel);

}  // namespace ringlab
