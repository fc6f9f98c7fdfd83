#pragma once

#include <vector>

#include "qbl/linalg.hpp"

namespace qbl {

/// Canonical symplectic form Δ_{2m}: m copies of [[0, 1], [-1, 0]] on the diagonal.
class SymplecticForm {
public:
    explicit SymplecticForm(int modes);

    int modes() const noexcept { return modes_; }
    Index dim() const noexcept { return 2 * static_cast<Index>(modes_); }
    const Matrix& matrix() const noexcept { return matrix_; }

private:
    int modes_;
    Matrix matrix_;
};

/// Throws Error(InvalidArgument) for m < 1.
SymplecticForm standard_form(int modes);

/// Symplectic eigenvalues of a positive-definite even-dimensional matrix,
/// ascending, one entry per mode.
///
/// Computed from the spectrum of -(L^T Δ L)^2 where γ = L L^T, which is
/// symmetric with eigenvalues ν_i^2 each of multiplicity two. Adjacent values
/// are paired greedily after sorting, so tightly clustered spectra may
/// mis-pair; the product and sum over modes are unaffected.
std::vector<double> symplectic_eigenvalues(const Matrix& gamma);

/// ν_min(γ).
double min_symplectic_eigenvalue(const Matrix& gamma);

/// True when γ is a valid quantum covariance: even dimension, symmetric,
/// positive definite and ν_min ≥ 1/2 - tol.
bool is_quantum_covariance(const Matrix& gamma, double tol = kStructuralTol);

enum class MapKind { Quantum, Classical, Invalid };

const char* to_string(MapKind kind) noexcept;

/// Classifies an n_i x 2m map: Quantum if B Δ B^T = Δ_{n_i} (n_i even),
/// Classical if B Δ B^T = 0, Invalid otherwise. Throws Error(RankError) when B
/// does not have full row rank.
MapKind classify_map(const Matrix& b, const SymplecticForm& form, double tol = kStructuralTol);

/// Overload using the standard form matching b.cols().
MapKind classify_map(const Matrix& b, double tol = kStructuralTol);

bool is_symplectic(const Matrix& s, double tol = kStructuralTol);

} // namespace qbl
