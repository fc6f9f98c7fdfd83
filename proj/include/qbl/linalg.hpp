#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

namespace qbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Absolute tolerance used by structural checks, before norm scaling.
inline constexpr double kStructuralTol = 1e-9;

/// `tol` scaled by max(1, ||m||_F).
double scaled_tol(const Matrix& m, double tol = kStructuralTol);

bool is_square(const Matrix& m) noexcept;
bool is_symmetric(const Matrix& m, double tol = kStructuralTol);
Matrix symmetrized(const Matrix& m);

/// ln det of a symmetric positive-definite matrix, accumulated from Cholesky
/// pivots. Empty optional if the factorization fails.
std::optional<double> try_log_det_spd(const Matrix& m);

/// Same as try_log_det_spd but throws Error(InvalidArgument) on failure.
double log_det_spd(const Matrix& m);

/// ln |det m| for a general square matrix (partial-pivot LU).
double log_abs_det(const Matrix& m);

bool is_positive_definite(const Matrix& m);
bool is_positive_semidefinite(const Matrix& m, double tol = kStructuralTol);

/// Inverse of a symmetric positive-definite matrix; throws on failure.
Matrix spd_inverse(const Matrix& m);

/// Symmetric square root of a symmetric positive-semidefinite matrix.
Matrix spd_sqrt(const Matrix& m);

Matrix direct_sum(const Matrix& a, const Matrix& b);

/// Rank by singular-value threshold `rel * max(rows, cols) * sigma_max`.
Index numerical_rank(const Matrix& m, double rel = 1e-12);

/// Smallest singular value (0 for empty matrices).
double min_singular_value(const Matrix& m);

/// Orthonormal basis (columns) of the kernel of m.
Matrix kernel_basis(const Matrix& m, double rel = 1e-12);

/// Orthonormal basis (columns) of the column span of m.
Matrix range_basis(const Matrix& m, double rel = 1e-12);

/// Orthonormal basis of the intersection of the column spans of a and b.
Matrix intersect_spans(const Matrix& a, const Matrix& b, double rel = 1e-12);

} // namespace qbl

namespace qbl {

/// Matrix exponential (Padé scaling and squaring).
Matrix expm(const Matrix& m);

} // namespace qbl
