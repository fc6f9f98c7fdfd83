#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qbl/datum.hpp"
#include "qbl/entropy.hpp"

namespace qbl {

enum class SolveStatus { Converged, Diverging, MaxIterations };

const char* to_string(SolveStatus status) noexcept;

struct TracePoint {
    int iteration;
    double value;
};

struct SolveResult {
    SolveStatus status = SolveStatus::MaxIterations;
    Matrix alpha;  // last iterate, normalized to det α = 1
    double constant = std::numeric_limits<double>::quiet_NaN();  // F(α) when Converged
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::vector<TracePoint> objective_trace;
    int damping_fallbacks = 0;  // switches from θ to θ/2 after an objective decrease
    int ascent_violations = 0;  // steps where F decreased by more than 1e-8
};

struct FixedPointOptions {
    double tol = 1e-10;
    int max_iter = 200000;
    double damping = 1.0;
    int divergence_window = 50;
    double max_condition = 1e13;
};

/// Iterates α ← (1-θ) α + θ M(α)^{-1}, M(α) = Σ p_i B_i^T (B_i α B_i^T)^{-1} B_i,
/// renormalizing det α = 1 after each step. Requires the scaling condition.
/// Throws DegeneratePushforward if an iterate makes some B_i α B_i^T singular.
SolveResult fixed_point_solve(const BLDatum& d, const Matrix& alpha0,
                              const FixedPointOptions& options = {});

/// Damped Newton ascent of F along the geodesics α^{1/2} e^{X} α^{1/2} of the
/// positive-definite cone, where F is concave. Same result type as
/// fixed_point_solve; used when the fixed point stalls.
SolveResult ascent_solve(const BLDatum& d, const Matrix& alpha0,
                         const FixedPointOptions& options = {});

enum class ConstantKind { Finite, Infinite, Unknown };

const char* to_string(ConstantKind kind) noexcept;

struct ConstantOptions {
    FixedPointOptions solve;
    int probe_trials = 200;
    std::uint64_t seed = 0;
    int restarts = 3;
    std::vector<double> epsilons{0.08, 0.04, 0.02, 0.01, 0.005};
    double agreement_tol = 1e-7;
    double extrapolation_tol = 1e-5;
};

struct BLConstant {
    ConstantKind kind = ConstantKind::Unknown;
    double value = std::numeric_limits<double>::quiet_NaN();
    Matrix alpha;            // extremizer when the supremum is achieved
    bool extrapolated = false;
    std::string reason;
    std::optional<ProbeVerdict> witness;
    std::vector<SolveResult> attempts;
    std::vector<std::pair<double, double>> regularized;  // (ε, f(B̃, p_ε))

    bool is_finite() const noexcept { return kind == ConstantKind::Finite; }
};

/// Brascamp–Lieb constant f(B, p): Infinite on scaling failure or an explicit
/// supercritical subspace, Finite from a converged solve (or a consistent
/// ε → 0 extrapolation of regularized data), Unknown otherwise.
BLConstant bl_constant(const BLDatum& d, const ConstantOptions& options = {});

/// Σ p_i S(Y_i|M) + f - S(X|M) for a quantum joint whose X block matches the datum.
double verify_ssa_gaussian(const BLDatum& d, const GaussianJoint& joint, double f_value,
                           double tol = kStructuralTol);

/// ln RHS - ln LHS of the integral inequality for f_i(y) = exp(-y^T A_i y / 2).
double verify_bl_integral_gaussian(const BLDatum& d, const std::vector<Matrix>& a,
                                   double f_value);

} // namespace qbl
