#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ringlab/equilibria.hpp"
#include "ringlab/parallel.hpp"
#include "ringlab/ring_dynamics.hpp"

namespace ringlab {

struct ParticleState {
    double s = 0.0;
    double x = 0.0;
};

using Vec2 = std::array<double, 2>;
using Vec6 = std::array<double, 6>;

// (ṡ, ẋ) of a passive particle; on the axis the analytic limit is used.
Vec2 particle_velocity(const ParticleState& q, const RingPairState& rings, const ModelParams& p);

// 𝓗(s, x) for rings frozen at `rings`; ṡ = ∂x𝓗, ẋ = -∂s𝓗.
double stream_hamiltonian(const ParticleState& q, const RingPairState& rings,
                          const ModelParams& p);
// 𝓗₀: rings at the equilibrium.
double stream_hamiltonian0(const ParticleState& q, const EquilibriumConfig& c,
                           const ModelParams& p);
// H_* = H(rings) + 𝓗(s, x) over the six-dimensional state.
double coupled_hamiltonian(const ParticleState& q, const RingPairState& rings,
                           const ModelParams& p);

// Squared meridian distance to the nearer ring.
double core_distance_sq(const ParticleState& q, const RingPairState& rings);

// Ring positions as a function of time, for the direct formulation.
using RingSource = std::function<RingPairState(double)>;

RingSource fixed_rings(const RingPairState& rings);

// Cubic Hermite interpolation of a stored ring trajectory (derivatives from
// the ring field).
class RingPath {
public:
    RingPath(const Trajectory<4>& path, const ModelParams& p);
    RingPairState operator()(double t) const;
    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }

private:
    std::vector<double> t_;
    std::vector<Vec4> y_, dy_;
};

struct AdvectionOptions {
    double core_stop_sq = 1e-10;   // truncate inside this squared distance of a ring
    long stride = 1;
};

struct ParticleTrajectory {
    Trajectory<2> path;
    bool near_core = false;
};

ParticleTrajectory advect_particle(const ParticleState& p0, const RingSource& rings,
                                   const ModelParams& p, double t0, double t1,
                                   const IntegratorSpec& spec, const AdvectionOptions& opt = {});

Vec6 coupled_velocity(const Vec6& y, const ModelParams& p);

struct CoupledTrajectory {
    Trajectory<6> path;
    double H_drift = 0.0;   // ring Hamiltonian; the particle does not act back
    double G_drift = 0.0;
};

CoupledTrajectory advect_coupled(const ParticleState& p0, const RingPairState& rings0,
                                 const ModelParams& p, double t0, double t1,
                                 const IntegratorSpec& spec, long stride = 1);

enum class Branch { upper, lower, homoclinic_plus, homoclinic_minus };
const char* to_string(Branch b);

struct SeparatrixTrace {
    Branch branch = Branch::upper;
    std::vector<double> t;
    std::vector<ParticleState> samples;
    std::vector<Vec2> velocity;    // field at each sample (for Hermite interpolation)
    bool complete = false;         // reached the target point
    double miss_distance = 0.0;    // distance to the target at the end
    double decay_rate = 0.0;       // mean of the two end-segment rates
    double decay_rate_front = 0.0, decay_rate_back = 0.0;
    double decay_r2 = 0.0;         // smaller R² of the two end fits
    double level = 0.0;            // 𝓗₀ at the start
    double level_spread = 0.0;     // max |𝓗₀ - level| along the trace
    double symmetry_residual = 0.0;  // upper branch: max |s(-t) - s(t)|

    // Cubic interpolation of the sampled curve; RangeError outside [t.front(), t.back()].
    ParticleState at(double time) const;
};

struct SeparatrixOptions {
    double seed_offset = 1e-7;
    double capture_radius = 1e-5;
    double max_time = 200.0;
    IntegratorSpec spec{};
    bool allow_partial = false;   // otherwise an incomplete upper branch raises TraceError
};

// Upper heteroclinic branch φ_u from p₊ to p₋, time-centred at the x = ξ̂ crossing.
SeparatrixTrace trace_upper_branch(const EquilibriumConfig& c, const ModelParams& p,
                                   const SeparatrixOptions& opt = {});

std::vector<SeparatrixTrace> trace_separatrices(const EquilibriumConfig& c, const ModelParams& p,
                                                const SeparatrixOptions& opt = {});

struct Streamline {
    int seed_id = 0;
    ParticleState seed;
    std::vector<double> t;
    std::vector<ParticleState> samples;
    bool truncated = false;
    std::string stop_reason;
};

struct PortraitOptions {
    int nx = 20, ns = 20;
    double t_max = 4.0;
    IntegratorSpec spec{1e-3, 1e4};
    long stride = 10;
    bool with_separatrices = true;
    SeparatrixOptions separatrix{};   // allow_partial is forced on
    Execution exec = Execution::parallel;
};

struct Portrait {
    std::vector<Streamline> streamlines;
    std::vector<SeparatrixTrace> separatrices;
    std::vector<FixedPoint> fixed_points;
    std::vector<std::string> warnings;
};

Streamline trace_streamline(int id, const ParticleState& seed, const EquilibriumConfig& c,
                            const ModelParams& p, const PortraitOptions& opt);

Portrait streamline_portrait(const EquilibriumConfig& c, const ModelParams& p,
                             const PortraitOptions& opt = {});
// Explicit seed list variant.
Portrait streamline_portrait(const EquilibriumConfig& c, const ModelParams& p,
                             const std::vector<ParticleState>& seeds,
                             const PortraitOptions& opt = {});

}  // namespace ringlab
