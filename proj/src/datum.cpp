#include "qbl/datum.hpp"

#include <cmath>
#include <string>

#include "qbl/error.hpp"
#include "qbl/random.hpp"

namespace qbl {

BLMap BLMap::make(Matrix b, double tol) {
    const MapKind kind = classify_map(b, tol);
    return BLMap{std::move(b), kind};
}

BLDatum::BLDatum(int modes, std::vector<BLMap> maps, Vector weights)
    : modes_(modes), maps_(std::move(maps)), weights_(std::move(weights)) {
    if (modes_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "datum needs at least one mode");
    }
    if (maps_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "datum needs at least one map");
    }
    if (static_cast<std::size_t>(weights_.size()) != maps_.size()) {
        throw Error(ErrorCode::InvalidArgument, "one weight per map is required");
    }
    for (std::size_t i = 0; i < maps_.size(); ++i) {
        if (maps_[i].matrix.cols() != ambient_dim()) {
            throw Error(ErrorCode::InvalidArgument,
                        "map " + std::to_string(i + 1) + " does not act on R^" +
                            std::to_string(ambient_dim()));
        }
        if (!(weights_(static_cast<Index>(i)) >= 0.0) ||
            !std::isfinite(weights_(static_cast<Index>(i)))) {
            throw Error(ErrorCode::InvalidArgument,
                        "weight " + std::to_string(i + 1) + " must be finite and nonnegative");
        }
    }
}

BLDatum::BLDatum(int modes, const std::vector<Matrix>& maps, const std::vector<double>& weights)
    : BLDatum(modes,
              [&] {
                  std::vector<BLMap> out;
                  out.reserve(maps.size());
                  for (const auto& b : maps) {
                      out.push_back(BLMap::make(b));
                  }
                  return out;
              }(),
              Eigen::Map<const Vector>(weights.data(), static_cast<Index>(weights.size()))) {}

bool BLDatum::is_quantum() const noexcept {
    for (const auto& m : maps_) {
        if (m.kind == MapKind::Invalid) {
            return false;
        }
    }
    return true;
}

BLDatum BLDatum::with_weights(Vector weights) const {
    return BLDatum(modes_, maps_, std::move(weights));
}

double scaling_defect(const BLDatum& d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        acc += d.weights()(static_cast<Index>(i)) * static_cast<double>(d.map(i).output_dim());
    }
    return acc - static_cast<double>(d.ambient_dim());
}

bool scaling_condition(const BLDatum& d, double tol) { return std::abs(scaling_defect(d)) <= tol; }

namespace {

void check_alpha(const BLDatum& d, const Matrix& alpha) {
    if (alpha.rows() != d.ambient_dim() || alpha.cols() != d.ambient_dim()) {
        throw Error(ErrorCode::InvalidArgument, "alpha has the wrong dimension");
    }
}

double log_det_pushforward(const BLMap& map, const Matrix& alpha, std::size_t index) {
    const auto ld = try_log_det_spd(symmetrized(map.matrix * alpha * map.matrix.transpose()));
    if (!ld) {
        throw Error(ErrorCode::DegeneratePushforward,
                    "B_" + std::to_string(index + 1) + " alpha B^T is singular");
    }
    return *ld;
}

} // namespace

Matrix weighted_precision(const BLDatum& d, const Matrix& alpha) {
    check_alpha(d, alpha);
    Matrix acc = Matrix::Zero(d.ambient_dim(), d.ambient_dim());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = d.weights()(static_cast<Index>(i));
        if (p == 0.0) {
            continue;
        }
        const Matrix& b = d.map(i).matrix;
        Eigen::LLT<Matrix> llt(symmetrized(b * alpha * b.transpose()));
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::DegeneratePushforward,
                        "B_" + std::to_string(i + 1) + " alpha B^T is singular");
        }
        acc += p * b.transpose() * llt.solve(b);
    }
    return symmetrized(acc);
}

double objective(const BLDatum& d, const Matrix& alpha) {
    check_alpha(d, alpha);
    const auto ld_alpha = try_log_det_spd(symmetrized(alpha));
    if (!ld_alpha) {
        throw Error(ErrorCode::InvalidArgument, "alpha is not positive definite");
    }
    double value = 0.5 * *ld_alpha;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = d.weights()(static_cast<Index>(i));
        if (p == 0.0) {
            continue;
        }
        value -= 0.5 * p * log_det_pushforward(d.map(i), alpha, i);
    }
    return value;
}

double stationarity_residual(const BLDatum& d, const Matrix& alpha) {
    const Matrix m = weighted_precision(d, alpha);
    return (m - spd_inverse(alpha)).norm();
}

double subspace_deficit(const BLDatum& d, const Matrix& frame) {
    double rhs = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = d.weights()(static_cast<Index>(i));
        if (p == 0.0) {
            continue;
        }
        rhs += p * static_cast<double>(numerical_rank(d.map(i).matrix * frame));
    }
    return static_cast<double>(frame.cols()) - rhs;
}

ProbeVerdict subcriticality_probe(const BLDatum& d, int trials, std::uint64_t seed, double tol) {
    const Index n = d.ambient_dim();
    ProbeVerdict verdict;
    auto consider = [&](const Matrix& frame, const char* origin) {
        if (frame.cols() == 0) {
            return false;
        }
        ++verdict.candidates_checked;
        const double deficit = subspace_deficit(d, frame);
        if (deficit > tol && deficit > verdict.deficit) {
            verdict.violated = true;
            verdict.deficit = deficit;
            verdict.witness = frame;
            verdict.origin = origin;
        }
        return verdict.violated;
    };

    consider(Matrix::Identity(n, n), "whole-space");

    std::vector<Matrix> kernels;
    for (const auto& map : d.maps()) {
        kernels.push_back(kernel_basis(map.matrix));
        consider(kernels.back(), "kernel");
        consider(range_basis(map.matrix.transpose()), "row-space");
    }
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        for (std::size_t j = i + 1; j < kernels.size(); ++j) {
            consider(intersect_spans(kernels[i], kernels[j]), "kernel-intersection");
            Matrix joined(n, kernels[i].cols() + kernels[j].cols());
            joined << kernels[i], kernels[j];
            const Matrix span = range_basis(joined);
            if (span.cols() < n) {
                consider(span, "kernel-sum");
            }
        }
    }
    if (!kernels.empty()) {
        Matrix common = kernels.front();
        for (std::size_t i = 1; i < kernels.size() && common.cols() > 0; ++i) {
            common = intersect_spans(common, kernels[i]);
        }
        consider(common, "kernel-intersection");
    }

    // Coordinate subspaces: every proper subset for small dimension, else
    // single axes and their complements.
    if (n <= 12) {
        const std::uint64_t subsets = (std::uint64_t{1} << n) - 1;
        for (std::uint64_t mask = 1; mask < subsets; ++mask) {
            Matrix frame(n, 0);
            for (Index k = 0; k < n; ++k) {
                if (mask & (std::uint64_t{1} << k)) {
                    frame.conservativeResize(Eigen::NoChange, frame.cols() + 1);
                    frame.col(frame.cols() - 1) = Vector::Unit(n, k);
                }
            }
            consider(frame, "coordinate");
        }
    } else {
        for (Index k = 0; k < n; ++k) {
            consider(Matrix(Vector::Unit(n, k)), "coordinate");
            Matrix complement(n, n - 1);
            Index c = 0;
            for (Index j = 0; j < n; ++j) {
                if (j != k) {
                    complement.col(c++) = Vector::Unit(n, j);
                }
            }
            consider(complement, "coordinate");
        }
    }

    if (n > 1) {
        for (int trial = 0; trial < trials; ++trial) {
            Rng rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
            std::uniform_int_distribution<Index> dim(1, n - 1);
            consider(random_orthonormal_frame(n, dim(rng), rng), "random");
        }
    }
    return verdict;
}

BLDatum regularize(const BLDatum& d, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "regularization parameter must lie in (0, 1]");
    }
    const Index n = d.ambient_dim();
    std::vector<BLMap> maps = d.maps();
    for (Index i = 0; i < n; ++i) {
        maps.push_back(BLMap::make(Matrix(Vector::Unit(n, i).transpose())));
    }
    maps.push_back(BLMap::make(Matrix::Ones(1, n)));

    const double aux = static_cast<double>(n) / static_cast<double>(n + 1);
    Vector weights(static_cast<Index>(maps.size()));
    weights.head(static_cast<Index>(d.size())) = (1.0 - epsilon) * d.weights();
    weights.tail(n + 1).setConstant(epsilon * aux);
    return BLDatum(d.modes(), std::move(maps), std::move(weights));
}

GaussianJoint pushforward(const GaussianJoint& joint, const BLMap& map) {
    if (map.kind == MapKind::Invalid) {
        throw Error(ErrorCode::InvalidArgument,
                    "map is neither symplectic nor commuting; no quantum pushforward");
    }
    if (joint.x_kind() != SubsystemKind::Quantum || map.matrix.cols() != joint.x_dim()) {
        throw Error(ErrorCode::InvalidArgument, "pushforward needs a quantum X matching the map");
    }
    const Matrix& b = map.matrix;
    const SubsystemKind kind =
        map.kind == MapKind::Quantum ? SubsystemKind::Quantum : SubsystemKind::Classical;
    return joint.with_x(symmetrized(b * joint.x_block() * b.transpose()), b * joint.cross_block(),
                        kind);
}

BLDatum uncertainty_datum(int modes) {
    const Index n = 2 * static_cast<Index>(modes);
    Matrix q = Matrix::Zero(modes, n);
    Matrix p = Matrix::Zero(modes, n);
    for (Index i = 0; i < modes; ++i) {
        q(i, 2 * i) = 1.0;
        p(i, 2 * i + 1) = 1.0;
    }
    return BLDatum(modes, {q, p}, {1.0, 1.0});
}

BLDatum triangle_datum(int n, const Vector& weights) {
    if (weights.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "triangle datum takes three weights");
    }
    const Matrix id = Matrix::Identity(n, n);
    const Matrix zero = Matrix::Zero(n, n);
    Matrix b1(n, 2 * n), b2(n, 2 * n), b3(n, 2 * n);
    b1 << id, zero;
    b2 << zero, id;
    b3 << id, id;
    return BLDatum(n, {b1, b2, b3}, {weights(0), weights(1), weights(2)});
}

BLDatum symplectic_pair_datum(const Matrix& s, int modes1, int modes2) {
    const Index n1 = 2 * static_cast<Index>(modes1);
    const Index n2 = 2 * static_cast<Index>(modes2);
    if (s.rows() != n1 + n2 || s.cols() != n1 + n2) {
        throw Error(ErrorCode::InvalidArgument, "S does not match the mode partition");
    }
    Matrix b1 = Matrix::Zero(n1, n1 + n2);
    Matrix b2 = Matrix::Zero(n2, n1 + n2);
    b1.leftCols(n1).setIdentity();
    b2.rightCols(n2).setIdentity();
    return BLDatum(modes1 + modes2, {b1, b2, s.topRows(n1), s.bottomRows(n2)},
                   {0.5, 0.5, 0.5, 0.5});
}

BLDatum combination_datum(const Matrix& a1, const Matrix& a2, const Vector& weights) {
    const Index n = a1.rows();
    if (a1.cols() != n || a2.rows() != n || a2.cols() != n || n % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "A1 and A2 must be equal even square blocks");
    }
    if (weights.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "combination datum takes three weights");
    }
    Matrix b1 = Matrix::Zero(n, 2 * n);
    Matrix b2 = Matrix::Zero(n, 2 * n);
    Matrix b3(n, 2 * n);
    b1.leftCols(n).setIdentity();
    b2.rightCols(n).setIdentity();
    b3 << a1, a2;
    return BLDatum(static_cast<int>(n), {b1, b2, b3}, {weights(0), weights(1), weights(2)});
}

} // namespace qbl
