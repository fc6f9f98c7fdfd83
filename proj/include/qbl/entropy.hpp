#pragma once

#include <vector>

#include "qbl/linalg.hpp"

namespace qbl {

/// Differential entropy of a centered Gaussian, ½ ln det(e γ), in nats.
double shannon_gaussian(const Matrix& gamma);

/// g(ν) = (ν+½) ln(ν+½) - (ν-½) ln(ν-½) for ν ≥ ½, with 0 ln 0 = 0.
/// Values within `tol` below ½ are clamped; anything lower throws DomainError.
double bosonic_g(double nu, double tol = 1e-9);

/// Von Neumann entropy of the Gaussian state with covariance γ. The empty
/// matrix (trivial system) has entropy 0.
double von_neumann_gaussian(const Matrix& gamma, double tol = kStructuralTol);

enum class SubsystemKind { Quantum, Classical };

/// Centered Gaussian joint state of a system X and a quantum memory M.
///
/// The covariance is ordered X first, then M. X is either a quantum system
/// (even dimension) or the classical outcome of a quadrature measurement.
class GaussianJoint {
public:
    GaussianJoint(Matrix gamma, Index x_dim, SubsystemKind x_kind = SubsystemKind::Quantum);

    /// Joint with trivial memory.
    static GaussianJoint without_memory(Matrix gamma_x, SubsystemKind x_kind = SubsystemKind::Quantum);

    /// Product joint γ_X ⊕ γ_M.
    static GaussianJoint product(const Matrix& gamma_x, const Matrix& gamma_m,
                                 SubsystemKind x_kind = SubsystemKind::Quantum);

    const Matrix& gamma() const noexcept { return gamma_; }
    Index x_dim() const noexcept { return x_dim_; }
    Index m_dim() const noexcept { return gamma_.rows() - x_dim_; }
    SubsystemKind x_kind() const noexcept { return x_kind_; }
    bool has_memory() const noexcept { return m_dim() > 0; }

    Matrix x_block() const { return gamma_.topLeftCorner(x_dim_, x_dim_); }
    Matrix m_block() const { return gamma_.bottomRightCorner(m_dim(), m_dim()); }
    /// γ_{XM}: X rows, M columns.
    Matrix cross_block() const { return gamma_.topRightCorner(x_dim_, m_dim()); }

    /// Joint with the X block replaced by `x` and the cross block by `cross`.
    GaussianJoint with_x(const Matrix& x, const Matrix& cross, SubsystemKind kind) const;

private:
    Matrix gamma_;
    Index x_dim_;
    SubsystemKind x_kind_;
};

/// γ_M - γ_{MX} γ_X^{-1} γ_{XM}: memory covariance after measuring X.
Matrix conditional_memory_covariance(const GaussianJoint& joint);

/// S(X|M) in nats. Quantum X: S_Q(γ_XM) - S_Q(γ_M). Classical X:
/// S_G(γ_X) + S_Q(γ_{M|X}) - S_Q(γ_M).
double conditional_entropy(const GaussianJoint& joint, double tol = kStructuralTol);

/// I(X1;X2|M) for X = X1 X2 split after the first `x1_dim` coordinates of X.
double conditional_mutual_information(const GaussianJoint& joint, Index x1_dim,
                                      double tol = kStructuralTol);

struct AsymptoticResidualTable {
    std::vector<double> t;
    std::vector<double> shannon_residual;
    std::vector<double> von_neumann_residual; // empty when the quantum branch is skipped
    double max_scaled_shannon = 0.0;          // max over grid of t |r(t)|
    double max_scaled_von_neumann = 0.0;
};

/// Residuals S(γ + t α) - ½ ln det(e t α) on a grid. The von Neumann branch
/// is evaluated when γ has even dimension and every grid point is a valid
/// quantum covariance.
AsymptoticResidualTable asymptotic_entropy_check(const Matrix& gamma, const Matrix& alpha,
                                                 const std::vector<double>& t_grid);

} // namespace qbl
