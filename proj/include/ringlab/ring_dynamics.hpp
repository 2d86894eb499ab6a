#pragma once

#include <array>
#include <string>
#include <vector>

#include "ringlab/numerics.hpp"

namespace ringlab {

using Vec4 = std::array<double, 4>;

// Sign convention of the axial ring-ring interaction.
//  printed    : the plain Hamiltonian system (dH/ds gives ẋ).
//  reversed   : axial interaction terms negated; ṡ terms unchanged.
//  calibrated : printed when ring 1 is the outer ring (r1 >= r2), reversed
//               otherwise. This is the convention that reproduces the
//               reference equilibria of all four types; see README.
enum class Coupling { printed, reversed, calibrated };

const char* to_string(Coupling c);
Coupling coupling_from_string(const std::string& s);

// ½(1 + ln 2 + ∫_0^∞ e^{-ξ} ln ξ dξ), evaluated once by quadrature.
double core_gamma();

struct ModelParams {
    double alpha = 5.0;   // axial swirl speed
    double kappa = 1.5;   // strength of ring 2 (ring 1 has strength 1)
    double chi = 1000.0;  // inverse core scale
    double gamma_const = core_gamma();
    double Omega = 1.0;   // swirl angular rate
    double mu = 0.0;      // ring oscillation amplitude
    double a1 = 0.0, a2 = 0.0;  // axial swirl profile
    double b1 = 0.0, b2 = 0.0;  // angular swirl profile
    Coupling coupling = Coupling::calibrated;
    QuadratureSpec quad{};

    void validate() const;
    double kappa_of(int k) const { return k == 1 ? 1.0 : kappa; }
    double swirl_axial(double s) const { return -alpha * (1.0 + a1 * s + a2 * s * s); }
    double swirl_potential(double s) const {
        return alpha * (s + 0.5 * a1 * s * s + a2 * s * s * s / 3.0);
    }
};

// ψ(r) = (ln(χ r) - γ) / (2r): self-induced speed of a unit-strength ring.
double self_induction(double r, const ModelParams& p);
double self_induction_dr(double r, const ModelParams& p);

struct RingPairState {
    double s1 = 0, s2 = 0, x1 = 0, x2 = 0;

    Vec4 as_array() const { return {s1, s2, x1, x2}; }
    static RingPairState from_array(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

double interaction_sign(double r1, double r2, Coupling c);

// (ṡ1, ṡ2, ẋ1, ẋ2)
Vec4 ring_velocity(const RingPairState& q, const ModelParams& p);

// Full Hamiltonian with the interaction in closed elliptic form.
double hamiltonian(const RingPairState& q, const ModelParams& p);
// Same, with the interaction evaluated by σ-quadrature (consistency check).
double hamiltonian_integral_form(const RingPairState& q, const ModelParams& p);

// G = s1 + κ s2
double invariant_G(const RingPairState& q, const ModelParams& p);

struct RingTrajectory {
    Trajectory<4> path;
    double H_drift = 0.0;  // max relative |H(t) - H(0)|
    double G_drift = 0.0;  // max relative |G(t) - G(0)|
};

RingTrajectory integrate_rings(const RingPairState& q0, const ModelParams& p,
                               double t0, double t1, const IntegratorSpec& spec,
                               long stride = 1);

// θ(t) = θ0 + Ω ∫ (1 + b1 s + b2 s²) dτ, trapezoidal on uniform samples.
std::vector<double> azimuth_history(double theta0, const std::vector<double>& t,
                                    const std::vector<double>& s, const ModelParams& p);

}  // namespace ringlab
