#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbl/entropy.hpp"
#include "qbl/linalg.hpp"
#include "qbl/symplectic.hpp"

namespace qbl {

/// One full-row-rank map B_i of a Brascamp–Lieb datum, with its kind.
struct BLMap {
    Matrix matrix;
    MapKind kind = MapKind::Invalid;

    /// Classifies `b` against the standard form; throws RankError.
    static BLMap make(Matrix b, double tol = kStructuralTol);

    Index output_dim() const noexcept { return matrix.rows(); }
};

/// Ordered maps B_1..B_K on ℝ^{2m} with nonnegative weights p.
///
/// Maps of kind Invalid are allowed: the classical constant is defined for
/// them, but entropy verifications on quantum states reject such data.
class BLDatum {
public:
    BLDatum(int modes, std::vector<BLMap> maps, Vector weights);
    BLDatum(int modes, const std::vector<Matrix>& maps, const std::vector<double>& weights);

    int modes() const noexcept { return modes_; }
    Index ambient_dim() const noexcept { return 2 * static_cast<Index>(modes_); }
    std::size_t size() const noexcept { return maps_.size(); }
    const std::vector<BLMap>& maps() const noexcept { return maps_; }
    const BLMap& map(std::size_t i) const { return maps_.at(i); }
    const Vector& weights() const noexcept { return weights_; }

    /// True when every map is Quantum or Classical.
    bool is_quantum() const noexcept;

    /// Same maps with different weights.
    BLDatum with_weights(Vector weights) const;

private:
    int modes_;
    std::vector<BLMap> maps_;
    Vector weights_;
};

/// |2m - Σ p_i n_i| ≤ tol.
bool scaling_condition(const BLDatum& d, double tol = kStructuralTol);

/// Σ p_i n_i - 2m.
double scaling_defect(const BLDatum& d);

/// Σ p_i B_i^T (B_i α B_i^T)^{-1} B_i. Throws DegeneratePushforward.
Matrix weighted_precision(const BLDatum& d, const Matrix& alpha);

/// F_{B,p}(α) = ½ ln det α - Σ (p_i/2) ln det(B_i α B_i^T).
double objective(const BLDatum& d, const Matrix& alpha);

/// || Σ p_i B_i^T (B_i α B_i^T)^{-1} B_i - α^{-1} ||_F.
double stationarity_residual(const BLDatum& d, const Matrix& alpha);

struct ProbeVerdict {
    bool violated = false;
    Matrix witness;        // orthonormal frame (columns) of the violating subspace
    double deficit = 0.0;  // dim V - Σ p_i dim B_i V (> 0 when violated)
    std::string origin;    // "kernel", "intersection", "coordinate", "random", ...
    int candidates_checked = 0;
};

/// Searches for a subspace V with dim V > Σ p_i dim B_i V. Structured
/// candidates (kernels, their pairwise intersections and sums, coordinate
/// subspaces) are checked first, then `trials` random subspaces. A clean
/// verdict is not a proof that the constant is finite.
ProbeVerdict subcriticality_probe(const BLDatum& d, int trials, std::uint64_t seed,
                                  double tol = kStructuralTol);

/// Checks one subspace (orthonormal frame columns); returns the deficit.
double subspace_deficit(const BLDatum& d, const Matrix& frame);

/// Appends the auxiliary maps e_1..e_{2m}, Σ e_i with weights ε 2m/(2m+1)
/// and scales the original weights by (1-ε). Requires ε ∈ (0, 1].
BLDatum regularize(const BLDatum& d, double epsilon);

/// Joint of (Y, M) where Y = B X, with kind following the map.
GaussianJoint pushforward(const GaussianJoint& joint, const BLMap& map);

// Standard data used across the library and the CLI fixtures.

/// Position rows and momentum rows of m modes, p = (1, 1).
BLDatum uncertainty_datum(int modes);

/// (I_n 0), (0 I_n), (I_n I_n) on ℝ^{2n}.
BLDatum triangle_datum(int n, const Vector& weights);

/// (I 0), (0 I), (S11 S12), (S21 S22) with p = (½, ½, ½, ½).
BLDatum symplectic_pair_datum(const Matrix& s, int modes1, int modes2);

/// (I 0), (0 I), (A1 A2) on ℝ^{4m}.
BLDatum combination_datum(const Matrix& a1, const Matrix& a2, const Vector& weights);

} // namespace qbl
