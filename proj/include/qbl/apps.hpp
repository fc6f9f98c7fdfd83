#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qbl/datum.hpp"
#include "qbl/entropy.hpp"
#include "qbl/linalg.hpp"
#include "qbl/solver.hpp"

namespace qbl {

// ---------------------------------------------------------------------------
// Rank-one data

struct RankOneCertificate {
    bool finite = false;
    std::vector<std::vector<std::size_t>> bases;  // index sets whose rows form a basis
    std::vector<double> weights;                  // convex weights, one per basis
    int columns_generated = 0;
    std::string reason;
};

struct RankOneOptions {
    std::size_t enumeration_cap = 20;  // enumerate every basis when K is at most this
    int max_rounds = 2000;             // column-generation rounds before giving up
    double tol = 1e-9;
};

/// Decides whether p is a convex combination of basis indicator vectors.
/// Throws Error(UnknownCapacity) when column generation does not settle.
RankOneCertificate rank_one_finiteness(const BLDatum& d, const RankOneOptions& options = {});

// ---------------------------------------------------------------------------
// Entropy power inequality

/// Closed-form φ for the datum (I 0), (0 I), (I I) on ℝ^{2n}.
double phi_b0(const std::array<double, 3>& s, int n);

/// True when x_1, x_2, x_3 satisfy the three strict triangle inequalities.
bool strict_triangle(double x1, double x2, double x3);

struct EPIInput {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double s1 = 0.0;  // S(X1|M)
    double s2 = 0.0;  // S(X2|M)
    double s_y = 0.0; // S(Y|M)
    int modes = 1;
};

struct EPIBound {
    double value = 0.0;
    bool triangle_branch = false;
};

/// Upper bound on S(X1 X2|M) for Y = A1 X1 + A2 X2, λ_i = |det A_i|^{1/m}.
EPIBound epi_bound(const EPIInput& input);

using PhiEvaluator = std::function<double(const Vector&)>;

/// φ_B(s) = φ_base(s_1 + ln|det A_1|, ..., s_K + ln|det A_K|) - ln|det A| for
/// B_i = A_i^{-1} B'_i A. Throws InvalidArgument for singular matrices.
double phi_from_equivalence(const PhiEvaluator& base, const Matrix& a,
                            const std::vector<Matrix>& a_i, const Vector& s);

// ---------------------------------------------------------------------------
// Quadratic Hamiltonians

/// Generator H of the symplectic flow exp(tH) on m1 + m2 modes.
class QuadHamiltonian {
public:
    /// Requires H Δ + Δ H^T = 0 within tol * max(1, ||H||).
    QuadHamiltonian(Matrix h, int modes1, int modes2, double tol = kStructuralTol);

    const Matrix& matrix() const noexcept { return h_; }
    int modes1() const noexcept { return m1_; }
    int modes2() const noexcept { return m2_; }
    bool is_symmetric() const noexcept { return symmetric_; }
    /// The off-diagonal block coupling the two parties.
    Matrix coupling() const;

private:
    Matrix h_;
    int m1_;
    int m2_;
    bool symmetric_;
};

/// ln(|det S(t)_11| |det S(t)_22|) with S(t) = exp(tH). Defined for any H.
double log_f(const QuadHamiltonian& h, double t);

struct EntanglementRate {
    double lambda = 0.0;
    double r_squared = 0.0;
    bool asymptotic = false;     // R² of the tail fit ≥ 0.999
    bool t_max_reduced = false;  // overflow forced a smaller horizon
    double t_max = 0.0;
    std::vector<std::pair<double, double>> trace;  // (t, ln f(t))
};

/// Λ from a least-squares fit of ln f(t) over the last decade of a geometric
/// grid ending at t_max. Rejects non-symmetric H.
EntanglementRate entanglement_rate(const QuadHamiltonian& h, double t_max, int samples = 40);

/// (t, ln f(t)) on a grid, without the symmetry requirement.
std::vector<std::pair<double, double>> log_f_trace(const QuadHamiltonian& h,
                                                   const std::vector<double>& t_grid);

// ---------------------------------------------------------------------------
// Correlations under symplectic maps

struct CorrelationBound {
    double lhs = 0.0;  // ½ I(X1;X2|M)(γ) + ½ I(X1;X2|M)(S γ S^T)
    double rhs = 0.0;  // -f
    double margin = 0.0;
};

/// Uses a precomputed constant f of symplectic_pair_datum(S, m1, m2).
CorrelationBound correlation_lower_bound(const Matrix& s, int modes1, int modes2,
                                         const GaussianJoint& joint, double f_value);

/// Computes f with bl_constant; throws NumericalFailure unless it is finite.
CorrelationBound correlation_lower_bound(const Matrix& s, int modes1, int modes2,
                                         const GaussianJoint& joint,
                                         const ConstantOptions& options = {});

} // namespace qbl
