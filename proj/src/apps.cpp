#include "qbl/apps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qbl/error.hpp"
#include "qbl/symplectic.hpp"

namespace qbl {

namespace {

struct PhaseOne {
    double infeasibility = 0.0;
    Vector x;      // values of the structural columns
    Vector duals;  // one per constraint row
};

// Phase-I simplex for {A x = b, x ≥ 0} (b ≥ 0) with Bland's rule.
PhaseOne phase_one(const Matrix& a, const Vector& b, double tol) {
    const Index rows = a.rows();
    const Index cols = a.cols();
    const Index width = cols + rows + 1;
    Matrix t = Matrix::Zero(rows + 1, width);
    t.topLeftCorner(rows, cols) = a;
    t.block(0, cols, rows, rows).setIdentity();
    t.col(width - 1).head(rows) = b;
    // Objective row holds reduced costs; last entry is -objective.
    for (Index j = 0; j < cols; ++j) {
        t(rows, j) = -a.col(j).sum();
    }
    t(rows, width - 1) = -b.sum();
    std::vector<Index> basis(static_cast<std::size_t>(rows));
    std::iota(basis.begin(), basis.end(), cols);

    const int max_pivots = 50000;
    for (int pivot = 0; pivot < max_pivots; ++pivot) {
        Index enter = -1;
        for (Index j = 0; j < cols + rows; ++j) {
            if (t(rows, j) < -tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) {
            break;
        }
        Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < rows; ++i) {
            if (t(i, enter) > tol) {
                const double ratio = t(i, width - 1) / t(i, enter);
                if (ratio < best - tol ||
                    (ratio <= best + tol && leave >= 0 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            throw Error(ErrorCode::NumericalFailure, "phase-one LP is unbounded");
        }
        t.row(leave) /= t(leave, enter);
        for (Index i = 0; i <= rows; ++i) {
            if (i != leave && t(i, enter) != 0.0) {
                t.row(i) -= t(i, enter) * t.row(leave);
            }
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    PhaseOne out;
    out.infeasibility = -t(rows, width - 1);
    out.x = Vector::Zero(cols);
    for (Index i = 0; i < rows; ++i) {
        const Index j = basis[static_cast<std::size_t>(i)];
        if (j < cols) {
            out.x(j) = t(i, width - 1);
        }
    }
    out.duals = Vector::Ones(rows) - t.row(rows).segment(cols, rows).transpose();
    return out;
}

bool rows_form_basis(const Matrix& rows_matrix, const std::vector<std::size_t>& idx) {
    Matrix sub(static_cast<Index>(idx.size()), rows_matrix.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        sub.row(static_cast<Index>(k)) = rows_matrix.row(static_cast<Index>(idx[k]));
    }
    return numerical_rank(sub) == rows_matrix.cols();
}

// Maximum-weight basis of the row matroid by the greedy rule.
std::vector<std::size_t> greedy_basis(const Matrix& rows_matrix, const Vector& weight) {
    std::vector<std::size_t> order(static_cast<std::size_t>(rows_matrix.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return weight(static_cast<Index>(a)) > weight(static_cast<Index>(b));
    });
    std::vector<std::size_t> chosen;
    Index rank = 0;
    for (std::size_t i : order) {
        chosen.push_back(i);
        Matrix sub(static_cast<Index>(chosen.size()), rows_matrix.cols());
        for (std::size_t k = 0; k < chosen.size(); ++k) {
            sub.row(static_cast<Index>(k)) = rows_matrix.row(static_cast<Index>(chosen[k]));
        }
        const Index r = numerical_rank(sub);
        if (r > rank) {
            rank = r;
        } else {
            chosen.pop_back();
        }
        if (rank == rows_matrix.cols()) {
            break;
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

void enumerate_bases(const Matrix& rows_matrix, std::size_t k, std::size_t start,
                     std::vector<std::size_t>& current,
                     std::vector<std::vector<std::size_t>>& out) {
    if (current.size() == k) {
        if (rows_form_basis(rows_matrix, current)) {
            out.push_back(current);
        }
        return;
    }
    const auto total = static_cast<std::size_t>(rows_matrix.rows());
    for (std::size_t i = start; i + (k - current.size()) <= total; ++i) {
        current.push_back(i);
        enumerate_bases(rows_matrix, k, i + 1, current, out);
        current.pop_back();
    }
}

} // namespace

RankOneCertificate rank_one_finiteness(const BLDatum& d, const RankOneOptions& options) {
    const auto k = d.size();
    const Index n = d.ambient_dim();
    Matrix rows(static_cast<Index>(k), n);
    for (std::size_t i = 0; i < k; ++i) {
        if (d.map(i).output_dim() != 1) {
            throw Error(ErrorCode::InvalidArgument,
                        "rank-one test needs single-row maps; map " + std::to_string(i + 1) +
                            " has " + std::to_string(d.map(i).output_dim()) + " rows");
        }
        rows.row(static_cast<Index>(i)) = d.map(i).matrix.row(0);
    }

    RankOneCertificate cert;
    if (numerical_rank(rows) < n) {
        cert.reason = "rows do not span the ambient space; no basis exists";
        return cert;
    }

    std::vector<std::vector<std::size_t>> pool;
    if (k <= options.enumeration_cap) {
        std::vector<std::size_t> current;
        enumerate_bases(rows, static_cast<std::size_t>(n), 0, current, pool);
    } else {
        pool.push_back(greedy_basis(rows, Vector::Zero(static_cast<Index>(k))));
    }

    const auto constraints = static_cast<Index>(k) + 1;
    Vector b(constraints);
    b.head(static_cast<Index>(k)) = d.weights();
    b(static_cast<Index>(k)) = 1.0;

    for (int round = 0; round < options.max_rounds; ++round) {
        Matrix a = Matrix::Zero(constraints, static_cast<Index>(pool.size()));
        for (std::size_t j = 0; j < pool.size(); ++j) {
            for (std::size_t i : pool[j]) {
                a(static_cast<Index>(i), static_cast<Index>(j)) = 1.0;
            }
            a(static_cast<Index>(k), static_cast<Index>(j)) = 1.0;
        }
        const PhaseOne lp = phase_one(a, b, 1e-12);
        if (lp.infeasibility <= options.tol) {
            cert.finite = true;
            const double total = lp.x.sum();
            for (std::size_t j = 0; j < pool.size(); ++j) {
                const double w = lp.x(static_cast<Index>(j));
                if (w > options.tol) {
                    cert.bases.push_back(pool[j]);
                    cert.weights.push_back(w / total);
                }
            }
            cert.reason = "p is a convex combination of basis indicators";
            return cert;
        }
        // Price: a basis column enters when y_K + Σ_{i∈I} y_i > 0.
        const Vector y = lp.duals.head(static_cast<Index>(k));
        const auto candidate = greedy_basis(rows, y);
        double score = lp.duals(static_cast<Index>(k));
        for (std::size_t i : candidate) {
            score += y(static_cast<Index>(i));
        }
        if (score <= options.tol ||
            std::find(pool.begin(), pool.end(), candidate) != pool.end()) {
            cert.reason = "p lies outside the basis polytope (phase-one residual " +
                          std::to_string(lp.infeasibility) + ")";
            return cert;
        }
        pool.push_back(candidate);
        ++cert.columns_generated;
    }
    throw Error(ErrorCode::UnknownCapacity,
                "column generation did not settle within " + std::to_string(options.max_rounds) +
                    " rounds");
}

bool strict_triangle(double x1, double x2, double x3) {
    return x1 < x2 + x3 && x2 < x1 + x3 && x3 < x1 + x2;
}

namespace {

// ln of Σ_cyclic (x_j + x_k - x_i) x_i / 4 for x_i = exp(l_i), with the
// triangle test done on the rescaled values.
std::pair<bool, double> log_quadratic_form(const std::array<double, 3>& l) {
    const double c = std::max({l[0], l[1], l[2]});
    const double y1 = std::exp(l[0] - c);
    const double y2 = std::exp(l[1] - c);
    const double y3 = std::exp(l[2] - c);
    if (!strict_triangle(y1, y2, y3)) {
        return {false, 0.0};
    }
    const double q = 2.0 * (y1 * y2 + y1 * y3 + y2 * y3) - (y1 * y1 + y2 * y2 + y3 * y3);
    return {true, std::log(q / 4.0) + 2.0 * c};
}

} // namespace

double phi_b0(const std::array<double, 3>& s, int n) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "phi_b0 needs n >= 1");
    }
    const double dn = static_cast<double>(n);
    const auto [triangle, log_q] =
        log_quadratic_form({2.0 * s[0] / dn, 2.0 * s[1] / dn, 2.0 * s[2] / dn});
    if (triangle) {
        return 0.5 * dn * log_q;
    }
    return std::min({s[0] + s[1], s[0] + s[2], s[1] + s[2]});
}

EPIBound epi_bound(const EPIInput& in) {
    if (!(in.lambda1 > 0.0) || !(in.lambda2 > 0.0) || in.modes < 1) {
        throw Error(ErrorCode::InvalidArgument, "EPI input needs positive lambdas and m >= 1");
    }
    const double m = static_cast<double>(in.modes);
    const double l1 = std::log(in.lambda1);
    const double l2 = std::log(in.lambda2);
    // 4 λ1 λ2 e^{S/m} ≤ Σ_cyclic (x_j + x_k - x_i) x_i with x_i = λ_i e^{s_i/m}, x_3 = e^{s_Y/m}.
    const auto [triangle, log_q] = log_quadratic_form({l1 + in.s1 / m, l2 + in.s2 / m, in.s_y / m});
    if (triangle) {
        return {m * (log_q - l1 - l2), true};
    }
    return {std::min({in.s1 + in.s2, in.s1 + in.s_y - m * l2, in.s2 + in.s_y - m * l1}), false};
}

double phi_from_equivalence(const PhiEvaluator& base, const Matrix& a,
                            const std::vector<Matrix>& a_i, const Vector& s) {
    if (static_cast<Index>(a_i.size()) != s.size()) {
        throw Error(ErrorCode::InvalidArgument, "one A_i per entropy is required");
    }
    const auto checked_log_det = [](const Matrix& m, const std::string& name) {
        if (!is_square(m) || m.rows() == 0 ||
            min_singular_value(m) <= kStructuralTol * std::max(1.0, m.norm())) {
            throw Error(ErrorCode::InvalidArgument, name + " is singular");
        }
        return log_abs_det(m);
    };
    Vector shifted = s;
    for (std::size_t i = 0; i < a_i.size(); ++i) {
        shifted(static_cast<Index>(i)) += checked_log_det(a_i[i], "A_" + std::to_string(i + 1));
    }
    return base(shifted) - checked_log_det(a, "A");
}

QuadHamiltonian::QuadHamiltonian(Matrix h, int modes1, int modes2, double tol)
    : h_(std::move(h)), m1_(modes1), m2_(modes2), symmetric_(false) {
    if (m1_ < 1 || m2_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "both parties need at least one mode");
    }
    const Index n = 2 * static_cast<Index>(m1_ + m2_);
    if (h_.rows() != n || h_.cols() != n) {
        throw Error(ErrorCode::InvalidArgument,
                    "Hamiltonian must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    const Matrix delta = standard_form(m1_ + m2_).matrix();
    const double scale = tol * std::max(1.0, h_.norm());
    if ((h_ * delta + delta * h_.transpose()).norm() > scale) {
        throw Error(ErrorCode::InvalidArgument,
                    "H does not generate symplectic maps (H Δ + Δ H^T != 0)");
    }
    symmetric_ = (h_ - h_.transpose()).norm() <= scale;
}

Matrix QuadHamiltonian::coupling() const {
    const Index n1 = 2 * static_cast<Index>(m1_);
    const Index n2 = 2 * static_cast<Index>(m2_);
    return h_.topRightCorner(n1, n2);
}

double log_f(const QuadHamiltonian& h, double t) {
    const Index n1 = 2 * static_cast<Index>(h.modes1());
    const Index n2 = 2 * static_cast<Index>(h.modes2());
    const Matrix s = expm(t * h.matrix());
    if (!s.allFinite()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return log_abs_det(s.topLeftCorner(n1, n1)) + log_abs_det(s.bottomRightCorner(n2, n2));
}

std::vector<std::pair<double, double>> log_f_trace(const QuadHamiltonian& h,
                                                   const std::vector<double>& t_grid) {
    std::vector<std::pair<double, double>> trace;
    trace.reserve(t_grid.size());
    for (double t : t_grid) {
        trace.emplace_back(t, log_f(h, t));
    }
    return trace;
}

EntanglementRate entanglement_rate(const QuadHamiltonian& h, double t_max, int samples) {
    if (!h.is_symmetric()) {
        throw Error(ErrorCode::InvalidArgument,
                    "linear entanglement growth is only established for symmetric H; use "
                    "log_f_trace to inspect ln f(t)");
    }
    if (!(t_max > 0.0) || samples < 4) {
        throw Error(ErrorCode::InvalidArgument, "entanglement_rate needs t_max > 0, samples >= 4");
    }
    EntanglementRate out;
    for (int attempt = 0; attempt < 64; ++attempt, t_max *= 0.5) {
        std::vector<double> grid;
        const double lo = t_max * 1e-3;
        const double step = std::log(t_max / lo) / static_cast<double>(samples - 1);
        for (int k = 0; k < samples; ++k) {
            grid.push_back(k == samples - 1 ? t_max : lo * std::exp(step * k));
        }
        auto trace = log_f_trace(h, grid);
        const bool finite = std::all_of(trace.begin(), trace.end(),
                                        [](const auto& p) { return std::isfinite(p.second); });
        if (!finite) {
            out.t_max_reduced = true;
            continue;
        }
        out.trace = std::move(trace);
        out.t_max = t_max;
        break;
    }
    if (out.trace.empty()) {
        throw Error(ErrorCode::NumericalFailure, "exp(tH) overflows for every tried horizon");
    }

    // Least squares over t ∈ [t_max/10, t_max].
    std::vector<std::pair<double, double>> tail;
    for (const auto& p : out.trace) {
        if (p.first >= out.t_max / 10.0 * (1.0 - 1e-12)) {
            tail.push_back(p);
        }
    }
    const auto count = static_cast<double>(tail.size());
    double mt = 0.0, my = 0.0;
    for (const auto& [t, y] : tail) {
        mt += t;
        my += y;
    }
    mt /= count;
    my /= count;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (const auto& [t, y] : tail) {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    out.lambda = sty / stt;
    double ss_res = 0.0;
    for (const auto& [t, y] : tail) {
        const double r = y - my - out.lambda * (t - mt);
        ss_res += r * r;
    }
    const double floor = 1e-24 * std::max(1.0, my * my) * count;
    out.r_squared = syy <= floor ? (ss_res <= floor ? 1.0 : 0.0) : 1.0 - ss_res / syy;
    out.asymptotic = out.r_squared >= 0.999;
    return out;
}

CorrelationBound correlation_lower_bound(const Matrix& s, int modes1, int modes2,
                                         const GaussianJoint& joint, double f_value) {
    const Index n1 = 2 * static_cast<Index>(modes1);
    const Index n = 2 * static_cast<Index>(modes1 + modes2);
    if (modes1 < 1 || modes2 < 1 || s.rows() != n || s.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "S must act on both parties");
    }
    if (!is_symplectic(s)) {
        throw Error(ErrorCode::InvalidArgument, "S is not symplectic");
    }
    if (joint.x_dim() != n || joint.x_kind() != SubsystemKind::Quantum) {
        throw Error(ErrorCode::InvalidArgument, "joint X block must hold both parties");
    }
    if (!is_quantum_covariance(joint.gamma())) {
        throw Error(ErrorCode::StateInvalid, "joint covariance is not a quantum state");
    }
    const GaussianJoint moved = joint.with_x(s * joint.x_block() * s.transpose(),
                                             s * joint.cross_block(), SubsystemKind::Quantum);
    CorrelationBound out;
    out.lhs = 0.5 * conditional_mutual_information(joint, n1) +
              0.5 * conditional_mutual_information(moved, n1);
    out.rhs = -f_value;
    out.margin = out.lhs - out.rhs;
    return out;
}

CorrelationBound correlation_lower_bound(const Matrix& s, int modes1, int modes2,
                                         const GaussianJoint& joint,
                                         const ConstantOptions& options) {
    const BLConstant f = bl_constant(symplectic_pair_datum(s, modes1, modes2), options);
    if (!f.is_finite()) {
        throw Error(ErrorCode::NumericalFailure,
                    std::string("constant is ") + to_string(f.kind) + ": " + f.reason);
    }
    return correlation_lower_bound(s, modes1, modes2, joint, f.value);
}

} // namespace qbl
