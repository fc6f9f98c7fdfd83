#pragma once

#include <vector>

#include "qbl/datum.hpp"
#include "qbl/entropy.hpp"
#include "qbl/linalg.hpp"

namespace qbl {

/// γ + tα.
Matrix heat_apply(const Matrix& gamma, const Matrix& alpha, double t);

/// Heat acting on X only: the X block becomes γ_X + tα, M is untouched.
GaussianJoint heat_apply(const GaussianJoint& joint, const Matrix& alpha, double t);

/// Δ(α) = S(X|M) after the heat channel minus S(X|M) before it.
double integral_fisher(const GaussianJoint& joint, const Matrix& alpha,
                       double tol = kStructuralTol);

struct FisherOptions {
    // h·α has size relative_step against γ (spectrum of L⁻¹αL⁻ᵀ, γ = LLᵀ),
    // scaled by (ν - ½)/ν near the uncertainty boundary.
    double relative_step = 1e-2;
    double step_floor = 1e-7;  // lower bound on that relative size
};

/// Right derivative at 0 of t ↦ S(X|M)(heat_apply(joint, α, t)), from
/// forward differences at h, h/2, h/4 combined by two Richardson sweeps.
double fisher_info(const GaussianJoint& joint, const Matrix& alpha,
                   const FisherOptions& options = {});

/// J_{X|M}(α) - J_{Y|M}(BαB^T) with Y = BX.
double stam_check(const GaussianJoint& joint, const BLMap& map, const Matrix& alpha,
                  const FisherOptions& options = {});

/// n points from lo to hi, equally spaced in log t. With `with_zero`, t = 0
/// is prepended.
std::vector<double> geometric_grid(double lo = 1e-2, double hi = 1e4, int n = 40,
                                   bool with_zero = true);

struct FlowTrace {
    std::vector<double> t_grid;
    std::vector<double> phi;
    std::vector<double> phi_x;
    std::vector<std::vector<double>> phi_y;  // phi_y[i][k]: map i at t_grid[k]
    double limit_estimate = 0.0;             // phi at the largest t
    double objective_at_alpha = 0.0;         // F(α*)
    double max_decrease = 0.0;               // max over k of phi[k] - phi[k+1], clipped at 0

    bool nondecreasing(double tol = 1e-7) const { return max_decrease <= tol; }
};

/// φ(t) = S(X|M) - Σ p_i S(Y_i|M) along γ_X ↦ γ_X + tα*.
FlowTrace flow_trace(const BLDatum& d, const GaussianJoint& joint, const Matrix& alpha_star,
                     const std::vector<double>& t_grid, double tol = kStructuralTol);

struct ConcavityReport {
    // min over s in the grid of 2Δ(α+sβ) - Δ(α) - Δ(α+2sβ)
    double midpoint_margin = 0.0;
    // min over consecutive grid triples u < v < w with v the midpoint of
    // 2Δ(α+vβ) - Δ(α+uβ) - Δ(α+wβ): concavity along the ray
    double ray_margin = 0.0;
    // min over s of Δ_γ(α) - Δ_{γ+sβ}(α)
    double smoothing_margin = 0.0;
    int evaluations = 0;

    double min_margin() const;
};

/// Evaluates the three inequality families on `grid` (nonnegative reals).
/// With α = 0 the ray family is midpoint concavity of t ↦ Δ(tβ).
ConcavityReport concavity_checks(const GaussianJoint& joint, const Matrix& alpha,
                                 const Matrix& beta, const std::vector<double>& grid,
                                 double tol = kStructuralTol);

} // namespace qbl
