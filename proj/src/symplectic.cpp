#include "qbl/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbl/error.hpp"

namespace qbl {

SymplecticForm::SymplecticForm(int modes) : modes_(modes) {
    if (modes < 1) {
        throw Error(ErrorCode::InvalidArgument, "symplectic form needs at least one mode");
    }
    matrix_ = Matrix::Zero(dim(), dim());
    for (Index i = 0; i < modes; ++i) {
        matrix_(2 * i, 2 * i + 1) = 1.0;
        matrix_(2 * i + 1, 2 * i) = -1.0;
    }
}

SymplecticForm standard_form(int modes) { return SymplecticForm(modes); }

std::vector<double> symplectic_eigenvalues(const Matrix& gamma) {
    if (!is_square(gamma) || gamma.rows() == 0 || gamma.rows() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "symplectic eigenvalues need a non-empty even-dimensional square matrix");
    }
    if (!is_symmetric(gamma)) {
        throw Error(ErrorCode::InvalidArgument, "covariance matrix is not symmetric");
    }
    Eigen::LLT<Matrix> llt(symmetrized(gamma));
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "covariance matrix is not positive definite");
    }
    const int modes = static_cast<int>(gamma.rows() / 2);
    const Matrix l = llt.matrixL();
    const Matrix a = l.transpose() * standard_form(modes).matrix() * l;
    // a is antisymmetric and similar to γ Δ: its singular values are ν_i, twice each.
    const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
    std::vector<double> values(sv.data(), sv.data() + sv.size());
    std::sort(values.begin(), values.end());

    std::vector<double> nu(static_cast<std::size_t>(modes));
    for (int i = 0; i < modes; ++i) {
        nu[static_cast<std::size_t>(i)] = 0.5 * (values[2 * i] + values[2 * i + 1]);
    }
    return nu;
}

double min_symplectic_eigenvalue(const Matrix& gamma) {
    return symplectic_eigenvalues(gamma).front();
}

bool is_quantum_covariance(const Matrix& gamma, double tol) {
    if (!is_square(gamma) || gamma.rows() == 0 || gamma.rows() % 2 != 0 ||
        !is_positive_definite(gamma)) {
        return false;
    }
    return min_symplectic_eigenvalue(gamma) >= 0.5 - tol;
}

const char* to_string(MapKind kind) noexcept {
    switch (kind) {
    case MapKind::Quantum: return "quantum";
    case MapKind::Classical: return "classical";
    case MapKind::Invalid: return "invalid";
    }
    return "invalid";
}

MapKind classify_map(const Matrix& b, const SymplecticForm& form, double tol) {
    if (b.cols() != form.dim()) {
        throw Error(ErrorCode::InvalidArgument, "map has " + std::to_string(b.cols()) +
                                                    " columns, expected " +
                                                    std::to_string(form.dim()));
    }
    if (b.rows() < 1 || b.rows() > b.cols() ||
        min_singular_value(b) <= scaled_tol(b, tol)) {
        throw Error(ErrorCode::RankError, "map does not have full row rank");
    }
    const Matrix image = b * form.matrix() * b.transpose();
    const double t = tol * std::max(1.0, b.squaredNorm());
    if (b.rows() % 2 == 0) {
        const SymplecticForm target(static_cast<int>(b.rows() / 2));
        if ((image - target.matrix()).norm() <= t) {
            return MapKind::Quantum;
        }
    }
    if (image.norm() <= t) {
        return MapKind::Classical;
    }
    return MapKind::Invalid;
}

MapKind classify_map(const Matrix& b, double tol) {
    if (b.cols() < 2 || b.cols() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "map must act on an even-dimensional space");
    }
    return classify_map(b, SymplecticForm(static_cast<int>(b.cols() / 2)), tol);
}

bool is_symplectic(const Matrix& s, double tol) {
    if (!is_square(s) || s.rows() == 0 || s.rows() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "symplectic test needs an even square matrix");
    }
    const SymplecticForm form(static_cast<int>(s.rows() / 2));
    const double t = tol * std::max(1.0, s.squaredNorm());
    return (s * form.matrix() * s.transpose() - form.matrix()).norm() <= t;
}

} // namespace qbl
