#include "qbl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbl/error.hpp"
#include "qbl/symplectic.hpp"

namespace qbl {

Matrix heat_apply(const Matrix& gamma, const Matrix& alpha, double t) {
    if (!is_square(gamma) || gamma.rows() != alpha.rows() || gamma.cols() != alpha.cols()) {
        throw Error(ErrorCode::InvalidArgument, "heat_apply: dimension mismatch");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "heat_apply: t must be finite and >= 0");
    }
    return gamma + t * alpha;
}

GaussianJoint heat_apply(const GaussianJoint& joint, const Matrix& alpha, double t) {
    const Matrix x = heat_apply(joint.x_block(), alpha, t);
    return joint.with_x(x, joint.cross_block(), joint.x_kind());
}

double integral_fisher(const GaussianJoint& joint, const Matrix& alpha, double tol) {
    return conditional_entropy(heat_apply(joint, alpha, 1.0), tol) -
           conditional_entropy(joint, tol);
}

namespace {

// Step at which the heat perturbation has relative size `relative_step`
// against γ, shrunk further when a symplectic eigenvalue is close to ½.
double fisher_step(const GaussianJoint& joint, const Matrix& alpha,
                   const FisherOptions& options) {
    const Index n = joint.gamma().rows();
    Matrix padded = Matrix::Zero(n, n);
    padded.topLeftCorner(joint.x_dim(), joint.x_dim()) = alpha;
    const Eigen::LLT<Matrix> llt(joint.gamma());
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::StateInvalid, "fisher_info: covariance is not positive definite");
    }
    const Matrix l_inv = llt.matrixL().solve(Matrix::Identity(n, n));
    const Matrix rel = symmetrized(l_inv * padded * l_inv.transpose());
    const double size = Eigen::SelfAdjointEigenSolver<Matrix>(rel, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .cwiseAbs()
                            .maxCoeff();
    double nu = std::numeric_limits<double>::infinity();
    if (joint.x_kind() == SubsystemKind::Quantum) {
        nu = min_symplectic_eigenvalue(joint.gamma());
    } else if (joint.has_memory()) {
        nu = min_symplectic_eigenvalue(conditional_memory_covariance(joint));
    }
    const double gap = std::isfinite(nu) ? std::min(1.0, (nu - 0.5) / nu) : 1.0;
    return std::max(options.relative_step * gap, options.step_floor) / size;
}

} // namespace

double fisher_info(const GaussianJoint& joint, const Matrix& alpha, const FisherOptions& options) {
    if (alpha.rows() != joint.x_dim() || !is_square(alpha)) {
        throw Error(ErrorCode::InvalidArgument, "fisher_info: alpha must match the X block");
    }
    if (alpha.norm() == 0.0) {
        return 0.0;
    }
    const double h = fisher_step(joint, alpha, options);
    const auto entropy_at = [&](double t) {
        const Matrix x = joint.x_block() + t * alpha;
        return conditional_entropy(joint.with_x(x, joint.cross_block(), joint.x_kind()));
    };
    double j = std::numeric_limits<double>::quiet_NaN();
    try {
        // Central quotients at h, h/2, h/4 with two Richardson sweeps (error O(h⁶)).
        const auto central = [&](double step) {
            return (entropy_at(step) - entropy_at(-step)) / (2.0 * step);
        };
        const double c1 = central(h);
        const double c2 = central(h / 2.0);
        const double c4 = central(h / 4.0);
        const double r1 = (4.0 * c2 - c1) / 3.0;
        const double r2 = (4.0 * c4 - c2) / 3.0;
        j = (16.0 * r2 - r1) / 15.0;
    } catch (const Error&) {
    }
    if (!std::isfinite(j)) {
        // γ - hα is not a state: forward quotients (error O(h³)).
        const double s0 = entropy_at(0.0);
        const auto forward = [&](double step) { return (entropy_at(step) - s0) / step; };
        const double d1 = forward(h);
        const double d2 = forward(h / 2.0);
        const double d4 = forward(h / 4.0);
        const double r1 = 2.0 * d2 - d1;
        const double r2 = 2.0 * d4 - d2;
        j = (4.0 * r2 - r1) / 3.0;
    }
    if (!std::isfinite(j)) {
        throw Error(ErrorCode::NumericalFailure, "Fisher information extrapolation is not finite");
    }
    return j;
}

double stam_check(const GaussianJoint& joint, const BLMap& map, const Matrix& alpha,
                  const FisherOptions& options) {
    const Matrix& b = map.matrix;
    if (b.cols() != joint.x_dim()) {
        throw Error(ErrorCode::InvalidArgument, "stam_check: map does not act on X");
    }
    const GaussianJoint pushed = pushforward(joint, map);
    return fisher_info(joint, alpha, options) -
           fisher_info(pushed, symmetrized(b * alpha * b.transpose()), options);
}

std::vector<double> geometric_grid(double lo, double hi, int n, bool with_zero) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw Error(ErrorCode::InvalidArgument, "geometric grid needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> grid;
    if (with_zero) {
        grid.push_back(0.0);
    }
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (int k = 0; k < n; ++k) {
        grid.push_back(k == n - 1 ? hi : lo * std::exp(step * k));
    }
    return grid;
}

FlowTrace flow_trace(const BLDatum& d, const GaussianJoint& joint, const Matrix& alpha_star,
                     const std::vector<double>& t_grid, double tol) {
    if (t_grid.empty() || t_grid.front() != 0.0 ||
        !std::is_sorted(t_grid.begin(), t_grid.end(), std::less_equal<>()) ||
        std::adjacent_find(t_grid.begin(), t_grid.end()) != t_grid.end()) {
        throw Error(ErrorCode::InvalidArgument, "flow grid must increase strictly from 0");
    }
    if (joint.x_dim() != d.ambient_dim()) {
        throw Error(ErrorCode::InvalidArgument, "joint X block does not match the datum");
    }
    if (!d.is_quantum()) {
        throw Error(ErrorCode::InvalidArgument, "datum has maps of invalid kind");
    }
    FlowTrace trace;
    trace.t_grid = t_grid;
    trace.phi_y.assign(d.size(), {});
    trace.objective_at_alpha = objective(d, alpha_star);
    for (double t : t_grid) {
        const GaussianJoint evolved = heat_apply(joint, alpha_star, t);
        const double sx = conditional_entropy(evolved, tol);
        double phi = sx;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double sy = conditional_entropy(pushforward(evolved, d.map(i)), tol);
            trace.phi_y[i].push_back(sy);
            phi -= d.weights()(static_cast<Index>(i)) * sy;
        }
        trace.phi_x.push_back(sx);
        trace.phi.push_back(phi);
    }
    for (std::size_t k = 0; k + 1 < trace.phi.size(); ++k) {
        trace.max_decrease = std::max(trace.max_decrease, trace.phi[k] - trace.phi[k + 1]);
    }
    trace.limit_estimate = trace.phi.back();
    return trace;
}

double ConcavityReport::min_margin() const {
    return std::min({midpoint_margin, ray_margin, smoothing_margin});
}

ConcavityReport concavity_checks(const GaussianJoint& joint, const Matrix& alpha,
                                 const Matrix& beta, const std::vector<double>& grid,
                                 double tol) {
    if (alpha.rows() != joint.x_dim() || beta.rows() != joint.x_dim()) {
        throw Error(ErrorCode::InvalidArgument, "concavity_checks: dimension mismatch");
    }
    ConcavityReport report;
    const auto delta = [&](const Matrix& a) {
        ++report.evaluations;
        return integral_fisher(joint, a, tol);
    };
    const double d_alpha = delta(alpha);
    for (double s : grid) {
        if (!(s >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "concavity grid must be nonnegative");
        }
        const double margin = 2.0 * delta(alpha + s * beta) - d_alpha - delta(alpha + 2.0 * s * beta);
        report.midpoint_margin = std::min(report.midpoint_margin, margin);

        const double smoothed = integral_fisher(heat_apply(joint, beta, s), alpha, tol);
        ++report.evaluations;
        report.smoothing_margin = std::min(report.smoothing_margin, d_alpha - smoothed);
    }
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double u = grid[k];
        const double w = grid[k + 1];
        const double v = 0.5 * (u + w);
        const double margin =
            2.0 * delta(alpha + v * beta) - delta(alpha + u * beta) - delta(alpha + w * beta);
        report.ray_margin = std::min(report.ray_margin, margin);
    }
    return report;
}

} // namespace qbl
