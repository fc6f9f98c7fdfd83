#include "qbl/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "qbl/error.hpp"

namespace qbl {

double scaled_tol(const Matrix& m, double tol) {
    return tol * std::max(1.0, m.norm());
}

bool is_square(const Matrix& m) noexcept { return m.rows() == m.cols(); }

bool is_symmetric(const Matrix& m, double tol) {
    if (!is_square(m)) {
        return false;
    }
    return (m - m.transpose()).norm() <= scaled_tol(m, tol);
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

std::optional<double> try_log_det_spd(const Matrix& m) {
    if (!is_square(m)) {
        return std::nullopt;
    }
    if (m.rows() == 0) {
        return 0.0;
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        return std::nullopt;
    }
    const Vector diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) {
            return std::nullopt;
        }
        acc += std::log(diag(i));
    }
    return 2.0 * acc;
}

double log_det_spd(const Matrix& m) {
    auto v = try_log_det_spd(m);
    if (!v) {
        throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric positive definite");
    }
    return *v;
}

double log_abs_det(const Matrix& m) {
    if (!is_square(m)) {
        throw Error(ErrorCode::InvalidArgument, "log_abs_det needs a square matrix");
    }
    Eigen::PartialPivLU<Matrix> lu(m);
    const Matrix& packed = lu.matrixLU();
    double acc = 0.0;
    for (Index i = 0; i < packed.rows(); ++i) {
        acc += std::log(std::abs(packed(i, i)));
    }
    return acc;
}

bool is_positive_definite(const Matrix& m) {
    return is_symmetric(m) && try_log_det_spd(symmetrized(m)).has_value();
}

bool is_positive_semidefinite(const Matrix& m, double tol) {
    if (!is_symmetric(m, tol)) {
        return false;
    }
    if (m.rows() == 0) {
        return true;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -scaled_tol(m, tol);
}

Matrix spd_inverse(const Matrix& m) {
    Eigen::LLT<Matrix> llt(symmetrized(m));
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "matrix is not positive definite");
    }
    return symmetrized(llt.solve(Matrix::Identity(m.rows(), m.cols())));
}

Matrix spd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
    Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

Index numerical_rank(const Matrix& m, double rel) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double threshold =
        rel * static_cast<double>(std::max(m.rows(), m.cols())) * std::max(sv(0), 1.0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) {
            ++rank;
        }
    }
    return rank;
}

double min_singular_value(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().minCoeff();
}

Matrix kernel_basis(const Matrix& m, double rel) {
    const Index n = m.cols();
    if (m.rows() == 0) {
        return Matrix::Identity(n, n);
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Index r = numerical_rank(m, rel);
    return svd.matrixV().rightCols(n - r);
}

Matrix range_basis(const Matrix& m, double rel) {
    if (m.cols() == 0) {
        return Matrix(m.rows(), 0);
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Index r = numerical_rank(m, rel);
    return svd.matrixU().leftCols(r);
}

Matrix intersect_spans(const Matrix& a, const Matrix& b, double rel) {
    // x in span(a) ∩ span(b)  <=>  x = a u = b v  <=>  [a, -b] (u; v) = 0
    const Matrix qa = range_basis(a, rel);
    const Matrix qb = range_basis(b, rel);
    if (qa.cols() == 0 || qb.cols() == 0) {
        return Matrix(a.rows(), 0);
    }
    Matrix stacked(qa.rows(), qa.cols() + qb.cols());
    stacked << qa, -qb;
    const Matrix null = kernel_basis(stacked, rel);
    return range_basis(qa * null.topRows(qa.cols()), rel);
}

} // namespace qbl

#include <unsupported/Eigen/MatrixFunctions>

namespace qbl {

Matrix expm(const Matrix& m) {
    if (!is_square(m)) {
        throw Error(ErrorCode::InvalidArgument, "expm needs a square matrix");
    }
    return m.exp();
}

} // namespace qbl
