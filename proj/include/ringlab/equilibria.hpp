#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "ringlab/ring_dynamics.hpp"

namespace ringlab {

enum class EquilibriumType { I, II, III, IV };

const char* to_string(EquilibriumType t);
EquilibriumType equilibrium_type_from_string(const std::string& s);

// Roots of the radii equations without the interaction terms.
struct ReducedRoots {
    double r1a, r1b;  // ψ(r) = α, small and large root
    double r2a, r2b;  // κψ(r) = α
    double r0;        // zero of ψ
    double rho;       // maximiser of ψ
    int iterations = 0;
};

ReducedRoots solve_reduced_radii(const ModelParams& p);

struct RadiiSolution {
    double r1, r2;
    int iterations;
    std::string method;   // "picard" or "newton-grid"
    double residual;      // scaled max residual of the radii equations
};

// Residuals (Ψ1, Ψ2) of the radii equations at x1 = x2.
std::array<double, 2> radii_residual(double r1, double r2, const ModelParams& p);

RadiiSolution solve_radii(const ModelParams& p, EquilibriumType type);

struct StagnationPoints {
    double eta, x_plus, x_minus;
};

// Axial velocity on the symmetry axis induced by fixed rings at (r1, r2, ξ).
double axis_velocity(double x, double r1, double r2, double xi, const ModelParams& p);

StagnationPoints stagnation_offset(double r1, double r2, double xi, const ModelParams& p);

// ẋ of a particle at (r², ξ) between the rings, i.e. -α(..) + 2Ξ(r).
double saddle_function(double r, double r1, double r2, double xi, const ModelParams& p);
double interior_saddle(double r1, double r2, double xi, const ModelParams& p);

using Mat4 = std::array<std::array<double, 4>, 4>;

struct JacobianResult {
    Mat4 J{};
    std::array<std::complex<double>, 4> eigenvalues{};
    double lambda_sq = 0.0;   // nonzero eigenvalue squared; < 0 means a center
    bool center = false;
    double nu = 0.0;          // |Im λ| for a center, |λ| for a saddle
};

// Analytic Jacobian of (Φ1, Φ2, Ψ1, Ψ2) at (s1, s2, ξ, ξ).
JacobianResult ring_jacobian(double r1, double r2, double xi, const ModelParams& p);

struct CenterCoefficients {
    double nu = 0.0;        // from the closed formula
    double A = 0.0, B = 0.0;
    double nu_eigen = 0.0;  // from the numerical spectrum
    double ratio_eigen = 0.0;  // ψ2/ψ1 from the eigenvector
    double x_gain = 0.0;    // x1 amplitude per unit s1 amplitude of the linear mode
    bool agrees = false;    // formula vs eigen path within 1e-6 relative
    std::string note;
};

CenterCoefficients center_coefficients(const JacobianResult& jac, const ModelParams& p);

struct EquilibriumConfig {
    EquilibriumType type = EquilibriumType::I;
    double r1_hat = 0, r2_hat = 0, s1_hat = 0, s2_hat = 0;
    double xi_hat = 0;
    double eta = 0, x_plus = 0, x_minus = 0;
    double s_hat = 0;
    double nu = 0, A = 0, B = 0;
    double x_gain = 0;
    double eps_star = 0;
    double a_hat = 0;
    bool ring_center = false;
    std::string radii_method;
    double radii_residual = 0;

    double r_hat() const;
    RingPairState ring_state() const { return {s1_hat, s2_hat, xi_hat, xi_hat}; }
};

EquilibriumConfig resolve_equilibrium(const ModelParams& p, EquilibriumType type,
                                      double xi = 0.0);

struct FixedPoint {
    std::string label;      // p_plus, p_minus, q, q1, q2
    std::string kind;       // saddle, singular_center
    double s, x;
    double lambda_unstable = 0, lambda_stable = 0;
    double tangent_slope = 0;   // dx/ds of the unstable direction (axis saddles)
    std::array<double, 4> linearisation{};  // ∂sΦ, ∂xΦ, ∂sΨ, ∂xΨ
};

std::vector<FixedPoint> classify_fixed_points(const EquilibriumConfig& c, const ModelParams& p);

}  // namespace ringlab
