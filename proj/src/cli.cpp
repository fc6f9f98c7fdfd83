#include "qbl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qbl/apps.hpp"
#include "qbl/datum.hpp"
#include "qbl/error.hpp"
#include "qbl/flow.hpp"
#include "qbl/io.hpp"
#include "qbl/random.hpp"
#include "qbl/solver.hpp"
#include "qbl/symplectic.hpp"

namespace qbl {

namespace {

constexpr int kOk = 0;
constexpr int kViolated = 1;
constexpr int kInputError = 2;

struct Config {
    std::optional<double> tol;
    std::uint64_t seed = 0;
    int max_iter = 200000;
    std::optional<double> t_max;
    int grid = 40;
    std::string out_dir;
    bool bits = false;
};

class Session {
public:
    Session(const Config& config, std::ostream& out) : config_(config), out_(out) {}

    double tol(double fallback) const { return config_.tol.value_or(fallback); }

    // Entropy-valued quantity in the requested unit.
    std::string entropy(double nats) const {
        return format_double(config_.bits ? nats / std::numbers::ln2 : nats);
    }
    const char* unit() const { return config_.bits ? "bits" : "nats"; }

    void line(const std::string& key, const std::string& value) const {
        out_ << key << ": " << value << "\n";
    }

    void csv(const std::string& name, const std::string& header,
             const std::vector<std::vector<double>>& rows) const {
        std::ostringstream os;
        os << header << "\n";
        for (const auto& row : rows) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                os << (k ? "," : "") << format_double(row[k]);
            }
            os << "\n";
        }
        if (config_.out_dir.empty()) {
            out_ << os.str();
            return;
        }
        std::filesystem::create_directories(config_.out_dir);
        const auto path = std::filesystem::path(config_.out_dir) / name;
        std::ofstream file(path, std::ios::binary);
        if (!file) {
            throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
        }
        file << os.str();
        line("wrote", path.string());
    }

    ConstantOptions constant_options() const {
        ConstantOptions o;
        o.solve.max_iter = config_.max_iter;
        o.seed = config_.seed;
        return o;
    }

    BLConstant finite_constant(const BLDatum& d) const {
        BLConstant f = bl_constant(d, constant_options());
        if (!f.is_finite()) {
            throw Error(ErrorCode::InvalidArgument, std::string("constant is ") +
                                                        to_string(f.kind) + ": " + f.reason);
        }
        return f;
    }

    const Config& config() const { return config_; }
    std::ostream& out() const { return out_; }

private:
    const Config& config_;
    std::ostream& out_;
};

int cmd_constant(const Session& s, const std::string& datum_path) {
    const DatumFile file = parse_datum(datum_path);
    const BLConstant f = bl_constant(file.datum, s.constant_options());
    s.line("kind", to_string(f.kind));
    if (f.is_finite()) {
        s.out() << "f = " << s.entropy(f.value) << "\n";
        s.line("unit", s.unit());
        s.line("extrapolated", f.extrapolated ? "yes" : "no");
    }
    s.line("reason", f.reason);
    if (f.witness) {
        s.line("witness-origin", f.witness->origin);
        s.line("witness-deficit", format_double(f.witness->deficit));
        std::ostringstream os;
        os << f.witness->witness.transpose();
        s.out() << "witness-frame (rows):\n" << os.str() << "\n";
    }
    if (!f.attempts.empty()) {
        const SolveResult& last = f.attempts.back();
        s.line("status", to_string(last.status));
        s.line("residual", format_double(last.residual));
        s.line("iterations", std::to_string(last.iterations));
        std::vector<std::vector<double>> rows;
        for (const auto& p : last.objective_trace) {
            rows.push_back({static_cast<double>(p.iteration), p.value});
        }
        s.csv("constant_trace.csv", "iteration,F", rows);
    }
    return kOk;
}

int cmd_verify_ssa(const Session& s, const std::string& datum_path, const std::string& state_path,
                   double f_offset) {
    const DatumFile file = parse_datum(datum_path);
    const GaussianJoint joint = parse_joint(state_path);
    const BLConstant f = s.finite_constant(file.datum);
    const double f_used = f.value + f_offset;
    const double margin = verify_ssa_gaussian(file.datum, joint, f_used);
    s.out() << "f = " << s.entropy(f.value) << "\n";
    if (f_offset != 0.0) {
        s.line("f-used", s.entropy(f_used));
    }
    s.line("margin", s.entropy(margin));
    const double tol = s.tol(1e-9);
    if (margin >= -tol) {
        return kOk;
    }
    s.out() << "VIOLATED: sum p_i S(Y_i|M) + f - S(X|M) < 0\n";
    s.line("S(X|M)", s.entropy(conditional_entropy(joint)));
    for (std::size_t i = 0; i < file.datum.size(); ++i) {
        const double sy = conditional_entropy(pushforward(joint, file.datum.map(i)));
        s.line("S(Y_" + std::to_string(i + 1) + "|M)", s.entropy(sy));
    }
    return kViolated;
}

int cmd_flow(const Session& s, const std::string& datum_path, const std::string& state_path) {
    const DatumFile file = parse_datum(datum_path);
    const GaussianJoint joint = parse_joint(state_path);
    const BLConstant f = s.finite_constant(file.datum);
    if (f.extrapolated) {
        throw Error(ErrorCode::InvalidArgument, "flow needs an attained extremizer");
    }
    const auto grid = geometric_grid(1e-2, s.config().t_max.value_or(1e4), s.config().grid);
    const FlowTrace trace = flow_trace(file.datum, joint, f.alpha, grid);
    std::string header = "t,phi,phi_X";
    for (std::size_t i = 0; i < file.datum.size(); ++i) {
        header += ",phi_Y_" + std::to_string(i + 1);
    }
    const double scale = s.config().bits ? 1.0 / std::numbers::ln2 : 1.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < trace.t_grid.size(); ++k) {
        std::vector<double> row{trace.t_grid[k], scale * trace.phi[k], scale * trace.phi_x[k]};
        for (const auto& py : trace.phi_y) {
            row.push_back(scale * py[k]);
        }
        rows.push_back(std::move(row));
    }
    s.csv("flow.csv", header, rows);
    s.line("F(alpha*)", s.entropy(trace.objective_at_alpha));
    s.line("phi(t_max)", s.entropy(trace.limit_estimate));
    s.line("max-decrease", s.entropy(trace.max_decrease));
    if (trace.nondecreasing(s.tol(1e-7))) {
        return kOk;
    }
    for (std::size_t k = 0; k + 1 < trace.phi.size(); ++k) {
        if (trace.phi[k] - trace.phi[k + 1] == trace.max_decrease) {
            s.out() << "VIOLATED: phi decreases between t = " << format_double(trace.t_grid[k])
                    << " and t = " << format_double(trace.t_grid[k + 1]) << "\n";
        }
    }
    return kViolated;
}

int cmd_stam(const Session& s, const std::string& datum_path, const std::string& state_path,
             const std::string& alpha_path) {
    const DatumFile file = parse_datum(datum_path);
    const GaussianJoint joint = parse_joint(state_path);
    const Matrix alpha = alpha_path.empty()
                             ? Matrix(Matrix::Identity(joint.x_dim(), joint.x_dim()))
                             : parse_matrix_file(alpha_path, "alpha");
    const double tol = s.tol(1e-6);
    std::vector<std::vector<double>> rows;
    int status = kOk;
    for (std::size_t i = 0; i < file.datum.size(); ++i) {
        const BLMap& map = file.datum.map(i);
        const double gap = stam_check(joint, map, alpha);
        rows.push_back({static_cast<double>(i + 1), gap});
        if (gap < -tol) {
            s.out() << "VIOLATED: map " << i + 1 << " (" << to_string(map.kind)
                    << ") gap = " << format_double(gap) << "\n";
            status = kViolated;
        }
    }
    s.csv("stam.csv", "map,gap", rows);
    return status;
}

int cmd_eur(const Session& s, int modes, const std::string& state_path, int samples) {
    const BLDatum d = uncertainty_datum(modes);
    const BLConstant f = s.finite_constant(d);
    s.out() << "f = " << s.entropy(f.value) << "\n";
    const double tol = s.tol(1e-9);
    int status = kOk;
    if (!state_path.empty()) {
        const double margin = verify_ssa_gaussian(d, parse_joint(state_path), f.value);
        s.line("state-margin", s.entropy(margin));
        if (margin < -tol) {
            s.out() << "VIOLATED: state margin below tolerance\n";
            status = kViolated;
        }
    }
    if (samples > 0) {
        std::vector<std::vector<double>> rows;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < samples; ++k) {
            Rng rng = derive_rng(s.config().seed, static_cast<std::uint64_t>(k));
            const Matrix gamma = random_quantum_covariance(modes, rng);
            const double margin =
                verify_ssa_gaussian(d, GaussianJoint::without_memory(gamma), f.value);
            worst = std::min(worst, margin);
            rows.push_back({static_cast<double>(k), margin});
            if (margin < -tol) {
                std::ostringstream os;
                os << gamma;
                s.out() << "VIOLATED: sample " << k << " margin " << format_double(margin)
                        << "\ngamma:\n" << os.str() << "\n";
                status = kViolated;
            }
        }
        s.line("min-margin", s.entropy(worst));
        s.csv("eur.csv", "sample,margin", rows);
    }
    return status;
}

int cmd_epi(const Session& s, const EPIInput& input) {
    const EPIBound b = epi_bound(input);
    s.line("bound", s.entropy(b.value));
    s.line("branch", b.triangle_branch ? "triangle" : "min-of-sums");
    return kOk;
}

int cmd_ent_rate(const Session& s, const std::string& h_path) {
    const QuadHamiltonian h = parse_hamiltonian(h_path);
    const double norm = h.matrix().norm();
    const double t_max = s.config().t_max.value_or(norm > 0.0 ? 50.0 / norm : 1.0);
    std::vector<std::vector<double>> rows;
    if (h.is_symmetric()) {
        const EntanglementRate rate = entanglement_rate(h, t_max, s.config().grid);
        s.line("Lambda", format_double(rate.lambda));
        s.line("r-squared", format_double(rate.r_squared));
        s.line("asymptotic", rate.asymptotic ? "yes" : "no");
        s.line("t-max", format_double(rate.t_max));
        s.line("t-max-reduced", rate.t_max_reduced ? "yes" : "no");
        for (const auto& [t, lf] : rate.trace) {
            rows.push_back({t, lf});
        }
    } else {
        s.line("note", "H is not symmetric; ln f(t) reported without a growth-rate claim");
        for (const auto& [t, lf] : log_f_trace(h, geometric_grid(t_max * 1e-3, t_max,
                                                                 s.config().grid, false))) {
            rows.push_back({t, lf});
        }
    }
    s.csv("ent_rate.csv", "t,ln_f", rows);
    return kOk;
}

int cmd_bl_integral(const Session& s, const std::string& datum_path, int samples) {
    const DatumFile file = parse_datum(datum_path);
    const BLDatum& d = file.datum;
    const BLConstant f = s.finite_constant(d);
    const double tol = s.tol(1e-9);
    int status = kOk;
    std::vector<std::vector<double>> rows;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Rng rng = derive_rng(s.config().seed, static_cast<std::uint64_t>(k));
        std::vector<Matrix> a;
        for (const auto& map : d.maps()) {
            a.push_back(random_spd(map.output_dim(), rng));
        }
        const double gap = verify_bl_integral_gaussian(d, a, f.value);
        worst = std::min(worst, gap);
        rows.push_back({static_cast<double>(k), gap});
        if (gap < -tol) {
            s.out() << "VIOLATED: sample " << k << " gap " << format_double(gap) << "\n";
            status = kViolated;
        }
    }
    if (samples > 0) {
        s.line("min-gap", format_double(worst));
    }
    if (!f.extrapolated) {
        std::vector<Matrix> a;
        for (const auto& map : d.maps()) {
            a.push_back(spd_inverse(symmetrized(map.matrix * f.alpha * map.matrix.transpose())));
        }
        s.line("extremal-gap", format_double(verify_bl_integral_gaussian(d, a, f.value)));
    }
    s.csv("bl_integral.csv", "sample,gap", rows);
    return status;
}

int cmd_entropy(const Session& s, const std::string& state_path) {
    const GaussianJoint joint = parse_joint(state_path);
    const Matrix& gamma = joint.gamma();
    const double sg = shannon_gaussian(gamma);
    s.line("S_G", s.entropy(sg));
    if (gamma.rows() % 2 != 0 || !is_quantum_covariance(gamma)) {
        s.line("quantum", "no");
        return kOk;
    }
    const auto nu = symplectic_eigenvalues(gamma);
    std::ostringstream os;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        os << (i ? " " : "") << format_double(nu[i]);
    }
    const double sq = von_neumann_gaussian(gamma);
    s.line("symplectic-eigenvalues", os.str());
    s.line("S_Q", s.entropy(sq));
    if (joint.has_memory()) {
        s.line("S(X|M)", s.entropy(conditional_entropy(joint)));
    }
    const double m = static_cast<double>(nu.size());
    const double ln_e2 = std::log(std::numbers::e / 2.0);
    const double upper = sg - sq;
    const double lower = sq - (sg - m / (4.0 * nu.front() * nu.front()) * ln_e2);
    s.line("upper-margin", s.entropy(upper));
    s.line("lower-margin", s.entropy(lower));
    const double tol = s.tol(1e-10);
    if (upper < -tol || lower < -tol) {
        s.out() << "VIOLATED: entropy bounds\n";
        return kViolated;
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Brascamp-Lieb constants and entropy inequalities for Gaussian states", "qbl"};
    app.require_subcommand(1);
    app.fallthrough();

    Config config;
    app.add_option("--tol", config.tol, "Margin tolerance (defaults per subcommand)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", config.seed, "Random seed");
    app.add_option("--max-iter", config.max_iter, "Solver iteration cap")
        ->check(CLI::PositiveNumber);
    app.add_option("--t-max", config.t_max, "Largest time on flow/rate grids")
        ->check(CLI::PositiveNumber);
    app.add_option("--grid", config.grid, "Number of grid points")->check(CLI::Range(4, 100000));
    app.add_option("--out", config.out_dir, "Directory for CSV artifacts (default: stdout)");
    app.add_flag("--bits", config.bits, "Report entropies in bits");

    std::string datum_path;
    std::string state_path;
    std::string extra_path;
    double f_offset = 0.0;
    int modes = 1;
    int samples = 0;
    EPIInput epi;

    auto* constant = app.add_subcommand("constant", "Compute the constant of a datum");
    constant->add_option("datum", datum_path)->required()->check(CLI::ExistingFile);

    auto* ssa = app.add_subcommand("verify-ssa", "Check the entropy inequality on a state");
    ssa->add_option("datum", datum_path)->required()->check(CLI::ExistingFile);
    ssa->add_option("state", state_path)->required()->check(CLI::ExistingFile);
    ssa->add_option("--f-offset", f_offset, "Add this to the computed constant");

    auto* flow = app.add_subcommand("flow", "Trace phi(t) along the heat flow");
    flow->add_option("datum", datum_path)->required()->check(CLI::ExistingFile);
    flow->add_option("state", state_path)->required()->check(CLI::ExistingFile);

    auto* stam = app.add_subcommand("stam", "Fisher information gap for each map");
    stam->add_option("datum", datum_path)->required()->check(CLI::ExistingFile);
    stam->add_option("state", state_path)->required()->check(CLI::ExistingFile);
    stam->add_option("--alpha", extra_path, "JSON file with an \"alpha\" matrix")
        ->check(CLI::ExistingFile);

    auto* eur = app.add_subcommand("eur", "Position/momentum uncertainty relation");
    eur->add_option("--modes", modes)->check(CLI::PositiveNumber);
    eur->add_option("--state", state_path)->check(CLI::ExistingFile);
    eur->add_option("--samples", samples, "Random states to test")->check(CLI::NonNegativeNumber);

    auto* epi_cmd = app.add_subcommand("epi", "Entropy power bound for Y = A1 X1 + A2 X2");
    epi_cmd->add_option("--lambda1", epi.lambda1)->required();
    epi_cmd->add_option("--lambda2", epi.lambda2)->required();
    epi_cmd->add_option("--s1", epi.s1)->required();
    epi_cmd->add_option("--s2", epi.s2)->required();
    epi_cmd->add_option("--sy", epi.s_y)->required();
    epi_cmd->add_option("--modes", epi.modes)->check(CLI::PositiveNumber);

    auto* rate = app.add_subcommand("ent-rate", "Entanglement growth rate of exp(tH)");
    rate->add_option("hamiltonian", extra_path)->required()->check(CLI::ExistingFile);

    auto* integral = app.add_subcommand("bl-integral", "Gaussian test of the integral form");
    integral->add_option("datum", datum_path)->required()->check(CLI::ExistingFile);
    integral->add_option("--samples", samples, "Random test collections")
        ->check(CLI::NonNegativeNumber);

    auto* entropy = app.add_subcommand("entropy", "Entropies of a Gaussian state");
    entropy->add_option("state", state_path)->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    const Session s(config, out);
    try {
        if (constant->parsed()) {
            return cmd_constant(s, datum_path);
        }
        if (ssa->parsed()) {
            return cmd_verify_ssa(s, datum_path, state_path, f_offset);
        }
        if (flow->parsed()) {
            return cmd_flow(s, datum_path, state_path);
        }
        if (stam->parsed()) {
            return cmd_stam(s, datum_path, state_path, extra_path);
        }
        if (eur->parsed()) {
            return cmd_eur(s, modes, state_path, state_path.empty() && samples == 0 ? 100 : samples);
        }
        if (epi_cmd->parsed()) {
            return cmd_epi(s, epi);
        }
        if (rate->parsed()) {
            return cmd_ent_rate(s, extra_path);
        }
        if (integral->parsed()) {
            return cmd_bl_integral(s, datum_path, samples == 0 ? 200 : samples);
        }
        return cmd_entropy(s, state_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

} // namespace qbl
