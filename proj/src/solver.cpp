#include "qbl/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "qbl/error.hpp"
#include "qbl/random.hpp"

namespace qbl {

const char* to_string(SolveStatus status) noexcept {
    switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Diverging: return "diverging";
    case SolveStatus::MaxIterations: return "max-iterations";
    }
    return "unknown";
}

const char* to_string(ConstantKind kind) noexcept {
    switch (kind) {
    case ConstantKind::Finite: return "finite";
    case ConstantKind::Infinite: return "infinite";
    case ConstantKind::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

Matrix normalize_det(const Matrix& alpha) {
    const Matrix s = symmetrized(alpha);
    const auto ld = try_log_det_spd(s);
    if (!ld) {
        throw Error(ErrorCode::NumericalFailure, "iterate lost positive definiteness");
    }
    return std::exp(-*ld / static_cast<double>(s.rows())) * s;
}

double condition_number(const Matrix& spd) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(spd, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

void check_solvable(const BLDatum& d, const Matrix& alpha0) {
    if (!scaling_condition(d)) {
        throw Error(ErrorCode::InvalidArgument, "datum violates the scaling condition");
    }
    if (alpha0.rows() != d.ambient_dim() || !is_positive_definite(alpha0)) {
        throw Error(ErrorCode::InvalidArgument, "initial alpha must be positive definite");
    }
}

[[noreturn]] void rethrow_with_iterate(const Error& e, int iteration, const Matrix& alpha) {
    std::ostringstream os;
    os << e.what() << " at iteration " << iteration << "; iterate:\n" << alpha;
    throw Error(e.code(), os.str());
}

/// exp of a symmetric matrix through its eigendecomposition.
Matrix symmetric_exp(const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(x));
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

} // namespace

SolveResult fixed_point_solve(const BLDatum& d, const Matrix& alpha0,
                              const FixedPointOptions& options) {
    check_solvable(d, alpha0);
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
    }
    SolveResult result;
    Matrix alpha = normalize_det(alpha0);
    double theta = options.damping;

    std::vector<double> raw_log_dets;
    std::vector<double> residuals;
    int monotone_run = 0;
    int last_sign = 0;

    for (int it = 0;; ++it) {
        Matrix precision;
        double value = 0.0;
        try {
            precision = weighted_precision(d, alpha);
            value = objective(d, alpha);
        } catch (const Error& e) {
            rethrow_with_iterate(e, it, alpha);
        }
        const double residual = (precision - spd_inverse(alpha)).norm();
        result.objective_trace.push_back({it, value});
        result.alpha = alpha;
        result.residual = residual;
        result.iterations = it;

        if (residual <= options.tol) {
            result.status = SolveStatus::Converged;
            result.constant = value;
            return result;
        }
        if (it >= options.max_iter) {
            result.status = SolveStatus::MaxIterations;
            return result;
        }
        if (condition_number(alpha) > options.max_condition) {
            result.status = SolveStatus::Diverging;
            return result;
        }

        const auto inverse = [&] {
            Eigen::LLT<Matrix> llt(precision);
            if (llt.info() != Eigen::Success) {
                Error e(ErrorCode::DegeneratePushforward, "weighted precision is singular");
                rethrow_with_iterate(e, it, alpha);
            }
            return Matrix(symmetrized(llt.solve(Matrix::Identity(alpha.rows(), alpha.cols()))));
        }();

        const double raw_ld = log_det_spd(inverse);
        Matrix next = normalize_det((1.0 - theta) * alpha + theta * inverse);
        double next_value = objective(d, next);
        const double slack = 1e-12 * std::max(1.0, std::abs(value));
        if (next_value < value - slack && theta > 0.5) {
            theta = 0.5;
            ++result.damping_fallbacks;
            next = normalize_det(0.5 * alpha + 0.5 * inverse);
            next_value = objective(d, next);
        }
        if (next_value < value - 1e-8) {
            ++result.ascent_violations;
        }

        // Escape to the boundary: ln det of the raw update drifts one way for a
        // whole window while the residual fails to improve.
        if (!raw_log_dets.empty()) {
            const double delta = raw_ld - raw_log_dets.back();
            const int sign = delta > 0.0 ? 1 : (delta < 0.0 ? -1 : 0);
            monotone_run = (sign != 0 && sign == last_sign) ? monotone_run + 1 : 0;
            last_sign = sign;
        }
        raw_log_dets.push_back(raw_ld);
        residuals.push_back(residual);
        const auto window = static_cast<std::size_t>(options.divergence_window);
        if (monotone_run >= options.divergence_window && residuals.size() > window &&
            residual >= residuals[residuals.size() - 1 - window]) {
            result.status = SolveStatus::Diverging;
            return result;
        }
        alpha = std::move(next);
    }
}

SolveResult ascent_solve(const BLDatum& d, const Matrix& alpha0, const FixedPointOptions& options) {
    check_solvable(d, alpha0);
    const Index n = d.ambient_dim();

    // Basis of symmetric matrices.
    std::vector<Matrix> basis;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            basis.push_back(std::move(e));
        }
    }
    const auto dim = static_cast<Index>(basis.size());

    SolveResult result;
    Matrix alpha = normalize_det(alpha0);
    const int max_iter = std::min(options.max_iter, 500);
    for (int it = 0;; ++it) {
        double value = 0.0;
        double residual = 0.0;
        try {
            value = objective(d, alpha);
            residual = stationarity_residual(d, alpha);
        } catch (const Error& e) {
            rethrow_with_iterate(e, it, alpha);
        }
        result.objective_trace.push_back({it, value});
        result.alpha = alpha;
        result.residual = residual;
        result.iterations = it;
        if (residual <= options.tol) {
            result.status = SolveStatus::Converged;
            result.constant = value;
            return result;
        }
        if (it >= max_iter) {
            result.status = SolveStatus::MaxIterations;
            return result;
        }
        if (condition_number(alpha) > options.max_condition) {
            result.status = SolveStatus::Diverging;
            return result;
        }

        const Matrix root = spd_sqrt(alpha);
        // Q_i = α^{1/2} B_i^T (B_i α B_i^T)^{-1} B_i α^{1/2}: orthogonal projectors.
        std::vector<Matrix> projectors;
        std::vector<double> weights;
        Matrix grad = Matrix::Identity(n, n);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double p = d.weights()(static_cast<Index>(i));
            if (p == 0.0) {
                continue;
            }
            const Matrix bc = d.map(i).matrix * root;
            Matrix q = symmetrized(bc.transpose() * spd_inverse(bc * bc.transpose()) * bc);
            grad -= p * q;
            projectors.push_back(std::move(q));
            weights.push_back(p);
        }
        grad = symmetrized(grad);

        // Second-order model of X ↦ F(α^{1/2} e^X α^{1/2}):
        //   ½ tr(X G) + ½ · ½ Σ p_i [tr(Q_i X Q_i X) - tr(Q_i X^2)].
        Vector g(dim);
        Matrix hess = Matrix::Zero(dim, dim);
        for (Index k = 0; k < dim; ++k) {
            g(k) = 0.5 * (basis[static_cast<std::size_t>(k)] * grad).trace();
        }
        for (std::size_t i = 0; i < projectors.size(); ++i) {
            const Matrix& q = projectors[i];
            std::vector<Matrix> qe;
            qe.reserve(basis.size());
            for (const auto& e : basis) {
                qe.push_back(q * e);
            }
            for (Index k = 0; k < dim; ++k) {
                for (Index l = k; l < dim; ++l) {
                    const auto ku = static_cast<std::size_t>(k);
                    const auto lu = static_cast<std::size_t>(l);
                    const double cross = (qe[ku] * qe[lu]).trace();
                    const double square =
                        0.5 * (qe[ku] * basis[lu]).trace() + 0.5 * (qe[lu] * basis[ku]).trace();
                    const double h = 0.5 * weights[i] * (cross - square);
                    hess(k, l) += h;
                    if (l != k) {
                        hess(l, k) += h;
                    }
                }
            }
        }
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(-hess);
        cod.setThreshold(1e-12);
        Vector x = cod.solve(g);
        bool newton = true;
        if (!x.allFinite() || g.dot(x) <= 0.0) {
            x = g;
            newton = false;
        }
        Matrix step = Matrix::Zero(n, n);
        for (Index k = 0; k < dim; ++k) {
            step += x(k) * basis[static_cast<std::size_t>(k)];
        }
        // Remove the scaling direction, to which F is blind.
        step -= (step.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);

        double s = 1.0;
        Matrix next = alpha;
        bool accepted = false;
        const double predicted = g.dot(x);
        // Below rounding of F the line search cannot rank candidates; near a
        // maximizer the full Newton step is taken.
        if (newton && predicted <= 1e-13 * std::max(1.0, std::abs(value))) {
            try {
                const Matrix cand = normalize_det(root * symmetric_exp(step) * root);
                if (stationarity_residual(d, cand) < residual) {
                    alpha = cand;
                    continue;
                }
            } catch (const Error&) {
            }
        }
        for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
            const Matrix cand = normalize_det(root * symmetric_exp(s * step) * root);
            double cand_value = -std::numeric_limits<double>::infinity();
            try {
                cand_value = objective(d, cand);
            } catch (const Error&) {
                continue;
            }
            if (cand_value >= value + 1e-4 * s * predicted ||
                (cand_value >= value && s < 1e-6)) {
                next = cand;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No ascent possible at working precision; report as stalled.
            result.status = SolveStatus::MaxIterations;
            return result;
        }
        alpha = std::move(next);
    }
}

namespace {

SolveResult solve_with_fallback(const BLDatum& d, const Matrix& alpha0,
                                const FixedPointOptions& options) {
    SolveResult fp = fixed_point_solve(d, alpha0, options);
    if (fp.status == SolveStatus::Converged) {
        return fp;
    }
    SolveResult newton = ascent_solve(d, alpha0, options);
    return newton.status == SolveStatus::Converged ? newton : fp;
}

} // namespace

BLConstant bl_constant(const BLDatum& d, const ConstantOptions& options) {
    BLConstant out;
    if (!scaling_condition(d)) {
        out.kind = ConstantKind::Infinite;
        out.reason = "scaling condition fails (sum p_i n_i - 2m = " +
                     std::to_string(scaling_defect(d)) + ")";
        return out;
    }
    ProbeVerdict probe = subcriticality_probe(d, options.probe_trials, options.seed);
    if (probe.violated) {
        out.kind = ConstantKind::Infinite;
        out.reason = "supercritical subspace found (" + probe.origin + ")";
        out.witness = std::move(probe);
        return out;
    }

    const Index n = d.ambient_dim();
    auto try_start = [&](const Matrix& start) -> bool {
        try {
            SolveResult r = solve_with_fallback(d, start, options.solve);
            out.attempts.push_back(r);
            return r.status == SolveStatus::Converged;
        } catch (const Error& e) {
            out.reason += std::string(e.what()) + "; ";
            return false;
        }
    };

    bool converged = try_start(Matrix::Identity(n, n));
    for (int k = 0; !converged && k < options.restarts; ++k) {
        Rng rng = derive_rng(options.seed, 1000 + static_cast<std::uint64_t>(k));
        converged = try_start(random_spd(n, rng));
    }
    if (converged) {
        const SolveResult& best = out.attempts.back();
        // Independent start as a uniqueness check on the value.
        Rng rng = derive_rng(options.seed, 2000);
        try {
            const SolveResult check = ascent_solve(d, random_spd(n, rng), options.solve);
            if (check.status == SolveStatus::Converged &&
                std::abs(check.constant - best.constant) > options.agreement_tol) {
                out.kind = ConstantKind::Unknown;
                out.reason = "multi-start disagreement";
                out.attempts.push_back(check);
                return out;
            }
        } catch (const Error&) {
        }
        out.kind = ConstantKind::Finite;
        out.value = best.constant;
        out.alpha = best.alpha;
        out.reason = "stationary point found";
        return out;
    }

    // Supremum not achieved (or solver failed): regularize and extrapolate.
    for (double eps : options.epsilons) {
        const BLDatum reg = regularize(d, eps);
        try {
            SolveResult r = ascent_solve(reg, Matrix::Identity(n, n), options.solve);
            if (r.status != SolveStatus::Converged) {
                r = fixed_point_solve(reg, Matrix::Identity(n, n), options.solve);
            }
            if (r.status == SolveStatus::Converged) {
                out.regularized.emplace_back(eps, r.constant);
            }
        } catch (const Error& e) {
            out.reason += std::string(e.what()) + "; ";
        }
    }
    const auto& reg = out.regularized;
    if (reg.size() >= 4) {
        // Fit f(ε) ≈ a + b ε ln ε + c ε through consecutive triples; a is the
        // estimate at ε = 0. The ε ln ε term appears when the supremum sits on
        // the boundary of the finiteness region.
        auto estimate = [&](std::size_t k) {
            Matrix a(3, 3);
            Vector rhs(3);
            for (Index r = 0; r < 3; ++r) {
                const auto [e, f] = reg[k + static_cast<std::size_t>(r)];
                a(r, 0) = 1.0;
                a(r, 1) = e * std::log(e);
                a(r, 2) = e;
                rhs(r) = f;
            }
            return a.colPivHouseholderQr().solve(rhs)(0);
        };
        const double last = estimate(reg.size() - 3);
        const double prev = estimate(reg.size() - 4);
        if (std::abs(last - prev) <= options.extrapolation_tol) {
            out.kind = ConstantKind::Finite;
            out.value = last;
            out.extrapolated = true;
            out.reason = "extrapolated from regularized data";
            return out;
        }
        out.reason += "regularized values do not extrapolate consistently";
    }
    out.kind = ConstantKind::Unknown;
    if (out.reason.empty()) {
        out.reason = "no solver converged";
    }
    return out;
}

double verify_ssa_gaussian(const BLDatum& d, const GaussianJoint& joint, double f_value,
                           double tol) {
    if (!std::isfinite(f_value)) {
        throw Error(ErrorCode::InvalidArgument, "constant must be finite");
    }
    if (joint.x_kind() != SubsystemKind::Quantum || joint.x_dim() != d.ambient_dim()) {
        throw Error(ErrorCode::InvalidArgument, "joint X block must be quantum with 2m rows");
    }
    if (!d.is_quantum()) {
        throw Error(ErrorCode::InvalidArgument, "datum has maps of invalid kind");
    }
    double margin = f_value - conditional_entropy(joint, tol);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = d.weights()(static_cast<Index>(i));
        if (p == 0.0) {
            continue;
        }
        margin += p * conditional_entropy(pushforward(joint, d.map(i)), tol);
    }
    return margin;
}

double verify_bl_integral_gaussian(const BLDatum& d, const std::vector<Matrix>& a,
                                   double f_value) {
    if (a.size() != d.size()) {
        throw Error(ErrorCode::InvalidArgument, "one test matrix per map is required");
    }
    if (!scaling_condition(d)) {
        throw Error(ErrorCode::InvalidArgument, "datum violates the scaling condition");
    }
    const Index n = d.ambient_dim();
    const double log_two_pi = std::log(2.0 * std::numbers::pi);
    Matrix aggregate = Matrix::Zero(n, n);
    double log_rhs = f_value;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double p = d.weights()(static_cast<Index>(i));
        const Matrix& b = d.map(i).matrix;
        if (a[i].rows() != b.rows() || !is_positive_definite(a[i])) {
            throw Error(ErrorCode::InvalidArgument,
                        "A_" + std::to_string(i + 1) + " must be positive definite of size n_i");
        }
        aggregate += p * b.transpose() * a[i] * b;
        log_rhs += p * (0.5 * static_cast<double>(b.rows()) * log_two_pi -
                        0.5 * log_det_spd(symmetrized(a[i])));
    }
    const auto ld = try_log_det_spd(symmetrized(aggregate));
    if (!ld) {
        throw Error(ErrorCode::InvalidArgument, "aggregate quadratic form is not positive definite");
    }
    const double log_lhs = 0.5 * static_cast<double>(n) * log_two_pi - 0.5 * *ld;
    return log_rhs - log_lhs;
}

} // namespace qbl
