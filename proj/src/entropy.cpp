#include "qbl/entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qbl/error.hpp"
#include "qbl/symplectic.hpp"

namespace qbl {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Matrix principal_submatrix(const Matrix& m, const std::vector<Index>& idx) {
    Matrix out(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(idx[i], idx[j]);
        }
    }
    return out;
}

std::vector<Index> range(Index begin, Index end) {
    std::vector<Index> out;
    for (Index i = begin; i < end; ++i) {
        out.push_back(i);
    }
    return out;
}

std::vector<Index> concat(std::vector<Index> a, const std::vector<Index>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

double shannon_gaussian(const Matrix& gamma) {
    if (!is_square(gamma) || gamma.rows() == 0) {
        throw Error(ErrorCode::InvalidArgument, "Shannon entropy needs a non-empty square matrix");
    }
    if (!is_symmetric(gamma)) {
        throw Error(ErrorCode::InvalidArgument, "covariance matrix is not symmetric");
    }
    const auto ld = try_log_det_spd(symmetrized(gamma));
    if (!ld) {
        throw Error(ErrorCode::InvalidArgument, "covariance matrix is not positive definite");
    }
    return 0.5 * (static_cast<double>(gamma.rows()) + *ld);
}

double bosonic_g(double nu, double tol) {
    if (!(nu >= 0.5 - tol)) {
        throw Error(ErrorCode::DomainError,
                    "bosonic entropy function needs nu >= 1/2, got " + std::to_string(nu));
    }
    nu = std::max(nu, 0.5);
    return xlogx(nu + 0.5) - xlogx(nu - 0.5);
}

double von_neumann_gaussian(const Matrix& gamma, double tol) {
    if (gamma.size() == 0) {
        return 0.0;
    }
    if (!is_square(gamma) || gamma.rows() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "von Neumann entropy needs an even-dimensional square covariance");
    }
    if (!is_symmetric(gamma)) {
        throw Error(ErrorCode::InvalidArgument, "covariance matrix is not symmetric");
    }
    if (!try_log_det_spd(symmetrized(gamma))) {
        throw Error(ErrorCode::StateInvalid, "covariance matrix is not positive definite");
    }
    const auto nu = symplectic_eigenvalues(gamma);
    if (nu.front() < 0.5 - tol) {
        throw Error(ErrorCode::StateInvalid,
                    "minimal symplectic eigenvalue " + std::to_string(nu.front()) + " < 1/2");
    }
    double acc = 0.0;
    for (double v : nu) {
        acc += bosonic_g(v, tol);
    }
    return acc;
}

GaussianJoint::GaussianJoint(Matrix gamma, Index x_dim, SubsystemKind x_kind)
    : gamma_(std::move(gamma)), x_dim_(x_dim), x_kind_(x_kind) {
    if (!is_square(gamma_) || x_dim_ < 1 || x_dim_ > gamma_.rows()) {
        throw Error(ErrorCode::InvalidArgument, "joint partition does not fit the covariance");
    }
    if (!is_symmetric(gamma_)) {
        throw Error(ErrorCode::InvalidArgument, "joint covariance is not symmetric");
    }
    gamma_ = symmetrized(gamma_);
    if (m_dim() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "quantum memory needs an even dimension");
    }
    if (x_kind_ == SubsystemKind::Quantum && x_dim_ % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "quantum X needs an even dimension");
    }
}

GaussianJoint GaussianJoint::without_memory(Matrix gamma_x, SubsystemKind x_kind) {
    const Index n = gamma_x.rows();
    return GaussianJoint(std::move(gamma_x), n, x_kind);
}

GaussianJoint GaussianJoint::product(const Matrix& gamma_x, const Matrix& gamma_m,
                                     SubsystemKind x_kind) {
    return GaussianJoint(direct_sum(gamma_x, gamma_m), gamma_x.rows(), x_kind);
}

GaussianJoint GaussianJoint::with_x(const Matrix& x, const Matrix& cross, SubsystemKind kind) const {
    const Index nx = x.rows();
    const Index nm = m_dim();
    if (cross.rows() != nx || cross.cols() != nm) {
        throw Error(ErrorCode::InvalidArgument, "cross block has the wrong shape");
    }
    Matrix g(nx + nm, nx + nm);
    g.topLeftCorner(nx, nx) = x;
    g.topRightCorner(nx, nm) = cross;
    g.bottomLeftCorner(nm, nx) = cross.transpose();
    g.bottomRightCorner(nm, nm) = m_block();
    return GaussianJoint(symmetrized(g), nx, kind);
}

Matrix conditional_memory_covariance(const GaussianJoint& joint) {
    const Matrix gx = joint.x_block();
    Eigen::LLT<Matrix> llt(gx);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::StateInvalid, "classical block is not positive definite");
    }
    const Matrix cross = joint.cross_block();
    return symmetrized(joint.m_block() - cross.transpose() * llt.solve(cross));
}

double conditional_entropy(const GaussianJoint& joint, double tol) {
    const double s_m = joint.has_memory() ? von_neumann_gaussian(joint.m_block(), tol) : 0.0;
    if (joint.x_kind() == SubsystemKind::Quantum) {
        return von_neumann_gaussian(joint.gamma(), tol) - s_m;
    }
    const double s_x = shannon_gaussian(joint.x_block());
    if (!joint.has_memory()) {
        return s_x;
    }
    return s_x + von_neumann_gaussian(conditional_memory_covariance(joint), tol) - s_m;
}

double conditional_mutual_information(const GaussianJoint& joint, Index x1_dim, double tol) {
    const Index nx = joint.x_dim();
    if (x1_dim < 1 || x1_dim >= nx) {
        throw Error(ErrorCode::InvalidArgument, "X1 must be a proper part of X");
    }
    const Index n = joint.gamma().rows();
    const auto x1 = range(0, x1_dim);
    const auto x2 = range(x1_dim, nx);
    const auto mem = range(nx, n);
    const auto& g = joint.gamma();
    const auto kind = joint.x_kind();
    const auto sub_joint = [&](const std::vector<Index>& x) {
        return GaussianJoint(principal_submatrix(g, concat(x, mem)), static_cast<Index>(x.size()),
                             kind);
    };
    return conditional_entropy(sub_joint(x1), tol) + conditional_entropy(sub_joint(x2), tol) -
           conditional_entropy(joint, tol);
}

AsymptoticResidualTable asymptotic_entropy_check(const Matrix& gamma, const Matrix& alpha,
                                                 const std::vector<double>& t_grid) {
    if (!is_square(gamma) || gamma.rows() != alpha.rows() || !is_square(alpha)) {
        throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
    }
    const auto n = static_cast<double>(alpha.rows());
    const double ld_alpha = log_det_spd(symmetrized(alpha));
    AsymptoticResidualTable table;
    bool quantum = alpha.rows() % 2 == 0;
    std::vector<Matrix> states;
    for (double t : t_grid) {
        if (!(t > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "asymptotic grid must be positive");
        }
        Matrix g = symmetrized(gamma + t * alpha);
        const double reference = 0.5 * (n + n * std::log(t) + ld_alpha);
        const double r = shannon_gaussian(g) - reference;
        table.t.push_back(t);
        table.shannon_residual.push_back(r);
        table.max_scaled_shannon = std::max(table.max_scaled_shannon, t * std::abs(r));
        if (quantum && !is_quantum_covariance(g)) {
            quantum = false;
        }
        states.push_back(std::move(g));
    }
    if (quantum) {
        for (std::size_t k = 0; k < states.size(); ++k) {
            const double t = table.t[k];
            const double reference = 0.5 * (n + n * std::log(t) + ld_alpha);
            const double r = von_neumann_gaussian(states[k]) - reference;
            table.von_neumann_residual.push_back(r);
            table.max_scaled_von_neumann = std::max(table.max_scaled_von_neumann, t * std::abs(r));
        }
    }
    return table;
}

} // namespace qbl
