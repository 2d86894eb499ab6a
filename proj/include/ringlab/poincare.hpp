#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ringlab/oscillation.hpp"
#include "ringlab/parallel.hpp"

namespace ringlab {

// Particles whose iterates leave this box count as escaped.
struct EscapeBox {
    double x_lo = 0, x_hi = 0, s_lo = 0, s_hi = 0;
    bool contains(const ParticleState& q) const {
        return q.x >= x_lo && q.x <= x_hi && q.s >= s_lo && q.s <= s_hi;
    }
};

// x ∈ [x₋ − 5η, x₊ + 5η], s ∈ [0, 10 ŝ2].
EscapeBox default_escape_box(const EquilibriumConfig& c);

struct PoincareOptions {
    IntegratorSpec spec{};
    // Each RK4 step is split so no substep turns more than this angle about
    // the nearest ring (0 disables); far from the cores one substep suffices.
    double max_turn = 0.02;
    int max_substeps = 64;
    double core_stop_sq = 1e-10;
    std::optional<EscapeBox> box;   // default_escape_box when empty
    Execution exec = Execution::parallel;
};

// A map evaluation that could not finish the period (ring core or field
// singularity); carries the time reached and the last good state.
class EscapeError : public Error {
public:
    EscapeError(const std::string& what, double partial_time, ParticleState last)
        : Error(what), partial_time_(partial_time), last_(last) {}
    const char* kind() const noexcept override { return "escape"; }
    double partial_time() const noexcept { return partial_time_; }
    ParticleState last() const noexcept { return last_; }

private:
    double partial_time_;
    ParticleState last_;
};

// Stroboscopic map Π_μ: the direct kinematics advected over one swirl period
// 2π/Ω, with the rings following the given oscillation.
class PoincareMap {
public:
    PoincareMap(const EquilibriumConfig& c, const ModelParams& p, const OscillationSpec& osc,
                const PoincareOptions& opt = {});

    double period() const { return period_; }
    const EquilibriumConfig& config() const { return c_; }
    const ModelParams& params() const { return p_; }
    const OscillationSpec& oscillation() const { return motion_.spec(); }
    const PoincareOptions& options() const { return opt_; }
    const RingMotion& motion() const { return motion_; }
    EscapeBox box() const { return box_; }

    // Substep count of every RK4 step. One evaluation can record it and
    // others replay it, so nearby points share one discretisation (needed
    // for finite differences of the map).
    using StepSchedule = std::vector<int>;

    // One period starting at t0.
    ParticleState operator()(const ParticleState& q, double t0 = 0.0) const;
    // Single integration over [t0, t0 + span].
    ParticleState flow(const ParticleState& q, double t0, double span,
                       StepSchedule* record = nullptr,
                       const StepSchedule* replay = nullptr) const;
    // `n` RK4 steps of size h from t0 (segments of the period grid).
    ParticleState flow_steps(const ParticleState& q, double t0, double h, long n,
                             StepSchedule* record = nullptr,
                             const StepSchedule* replay = nullptr) const;
    // Step size and count of one period.
    double period_step() const { return period_ / period_steps(); }
    long period_steps() const;

private:
    EquilibriumConfig c_;
    ModelParams p_;
    PoincareOptions opt_;
    RingMotion motion_;
    EscapeBox box_;
    double period_ = 0.0;
};

ParticleState poincare_map(const ParticleState& p0, const EquilibriumConfig& c,
                           const ModelParams& p, const OscillationSpec& osc,
                           const PoincareOptions& opt = {});

struct SectionCloud {
    std::vector<ParticleState> seeds;
    std::vector<std::vector<ParticleState>> iterates;   // iterate 0 is the seed
    std::vector<bool> escaped;
    std::vector<long> escape_index;    // first iterate outside the box, -1 if none
    std::vector<std::string> failure;  // non-empty when the map itself failed
    ModelParams params;
    EquilibriumConfig config;
    OscillationSpec oscillation;
    double period = 0.0;
    EscapeBox box;
};

// Iterates every seed n times (iterate k starts at t = k·2π/Ω). Escapes and
// map failures are recorded per seed; the cloud is always returned.
SectionCloud section(const std::vector<ParticleState>& seeds, int n_iterations,
                     const PoincareMap& map);
SectionCloud section(const std::vector<ParticleState>& seeds, int n_iterations,
                     const EquilibriumConfig& c, const ModelParams& p,
                     const OscillationSpec& osc, const PoincareOptions& opt = {});

// n seeds evenly spaced on x = ξ̂, s ∈ (0, s_top), skipping the parts of the
// segment within `core_exclusion` (meridian distance) of either ring.
std::vector<ParticleState> seed_ladder(const EquilibriumConfig& c, double s_top, int n,
                                       double core_exclusion = 0.0);

struct LevelStats {
    double mean = 0, spread = 0, stddev = 0;   // of 𝓗₀ over a seed's iterates
};
std::vector<LevelStats> level_statistics(const SectionCloud& cloud);

struct MapJacobian {
    std::array<double, 4> J{};   // ∂s'/∂s, ∂s'/∂x, ∂x'/∂s, ∂x'/∂x
    double det = 0.0;
    double det_error = 0.0;   // change of det over the last step refinement
};
// Richardson-extrapolated central differences, all on the substep schedule
// of q, starting from step h and refined by 4 until det settles.
MapJacobian map_jacobian(const PoincareMap& map, const ParticleState& q, double h,
                         double t0 = 0.0);

struct MapFixedPoint {
    std::string label;   // p_plus, p_minus, q
    ParticleState point;
    double residual = 0.0;
    int iterations = 0;
};

// Newton on Π − id (multiple shooting over the period): axis points
// constrained to s = 0 and seeded at x±, the interior point seeded at
// (ŝ, ξ̂). Throws ConvergenceError unless |Π(p) − p| < tol.
std::vector<MapFixedPoint> map_fixed_points(const PoincareMap& map, double tol = 1e-8);

}  // namespace ringlab
