#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qbl/apps.hpp"
#include "qbl/error.hpp"
#include "qbl/random.hpp"

using namespace qbl;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
    Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
    Index i = 0;
    for (const auto& row : r) {
        Index j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

BLDatum rank_one(int modes, const Matrix& r, const std::vector<double>& p) {
    std::vector<Matrix> maps;
    for (Index i = 0; i < r.rows(); ++i) {
        maps.push_back(r.row(i));
    }
    return BLDatum(modes, maps, p);
}

Vector reconstruct(const RankOneCertificate& c, std::size_t k) {
    Vector p = Vector::Zero(static_cast<Index>(k));
    for (std::size_t j = 0; j < c.bases.size(); ++j) {
        for (std::size_t i : c.bases[j]) {
            p(static_cast<Index>(i)) += c.weights[j];
        }
    }
    return p;
}

} // namespace

TEST_CASE("rank-one finiteness: small examples") {
    const auto unique = rank_one_finiteness(rank_one(1, rows({{1, 0}, {0, 1}}), {1, 1}));
    REQUIRE(unique.finite);
    REQUIRE(unique.bases.size() == 1);
    CHECK(unique.bases[0] == std::vector<std::size_t>{0, 1});
    CHECK(unique.weights[0] == doctest::Approx(1.0));

    CHECK_FALSE(rank_one_finiteness(rank_one(1, rows({{1, 0}, {1, 0}}), {1, 1})).finite);
    CHECK_FALSE(rank_one_finiteness(rank_one(1, rows({{1, 0}, {2, 0}}), {0.5, 1.5})).finite);

    const BLDatum tri = rank_one(1, rows({{1, 0}, {0, 1}, {1, 1}}), {2.0 / 3, 2.0 / 3, 2.0 / 3});
    const auto cert = rank_one_finiteness(tri);
    REQUIRE(cert.finite);
    CHECK((reconstruct(cert, 3) - tri.weights()).norm() < 1e-12);
    double total = 0.0;
    for (double w : cert.weights) {
        CHECK(w > 0.0);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0));

    CHECK_FALSE(rank_one_finiteness(tri.with_weights((Vector(3) << 1.5, 0.25, 0.25).finished()))
                    .finite);
    CHECK_THROWS_AS(rank_one_finiteness(uncertainty_datum(2)), Error);
}

TEST_CASE("rank-one finiteness by column generation matches enumeration") {
    Rng rng = derive_rng(1, 0);
    RankOneOptions cg;
    cg.enumeration_cap = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix r = random_gaussian_matrix(6, 4, rng);
        std::vector<double> p(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double sum = 0.0;
        for (double& v : p) {
            v = u(rng);
            sum += v;
        }
        for (double& v : p) {
            v *= 4.0 / sum;
        }
        const BLDatum d = rank_one(2, r, p);
        const auto full = rank_one_finiteness(d);
        const auto gen = rank_one_finiteness(d, cg);
        CHECK(full.finite == gen.finite);
        if (gen.finite) {
            CHECK((reconstruct(gen, 6) - d.weights()).norm() < 1e-9);
        }
    }
}

TEST_CASE("finite rank-one data have convergent fixed points") {
    const BLDatum tri = rank_one(1, rows({{1, 0}, {0, 1}, {1, 1}}), {0.7, 0.6, 0.7});
    REQUIRE(rank_one_finiteness(tri).finite);
    CHECK(fixed_point_solve(tri, Matrix::Identity(2, 2)).status == SolveStatus::Converged);

    const BLDatum four =
        rank_one(2, rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 1, 1}}),
                 {0.8, 0.8, 0.8, 0.8, 0.8});
    REQUIRE(rank_one_finiteness(four).finite);
    CHECK(fixed_point_solve(four, Matrix::Identity(4, 4)).status == SolveStatus::Converged);
}

TEST_CASE("phi for the triangle datum") {
    for (double s : {-1.0, 0.0, 0.3, 2.0}) {
        for (int n : {1, 2, 3}) {
            CHECK(phi_b0({s, s, s}, n) == doctest::Approx(2 * s + 0.5 * n * std::log(0.75)));
        }
    }
    CHECK(phi_b0({0.1, 0.2, 10.0}, 1) == doctest::Approx(0.3));
    CHECK(phi_b0({0.1, 0.2, 1e6}, 2) == doctest::Approx(0.3));
}

TEST_CASE("phi is below every admissible p·s + f") {
    Rng rng = derive_rng(2, 0);
    std::uniform_real_distribution<double> us(-2.0, 2.0);
    std::uniform_real_distribution<double> up(0.02, 0.98);
    for (int k = 0; k < 50; ++k) {
        const std::array<double, 3> s{us(rng), us(rng), us(rng)};
        const int n = 1 + k % 3;
        const double phi = phi_b0(s, n);
        int tested = 0;
        while (tested < 20) {
            const double p1 = up(rng);
            const double p2 = up(rng);
            const double p3 = 2.0 - p1 - p2;
            if (!(p3 > 0.0 && p3 < 1.0)) {
                continue;
            }
            const Vector p = (Vector(3) << p1, p2, p3).finished();
            const double bound = p1 * s[0] + p2 * s[1] + p3 * s[2] + oracle::triangle_constant(p, n);
            CHECK(phi <= bound + 1e-8);
            ++tested;
        }
    }
}

TEST_CASE("phi is concave and continuous") {
    // Along random segments, midpoint concavity and small jumps between neighbours.
    Rng rng = derive_rng(3, 0);
    std::uniform_real_distribution<double> us(-1.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const std::array<double, 3> a{us(rng), us(rng), us(rng)};
        const std::array<double, 3> b{us(rng), us(rng), us(rng)};
        const auto at = [&](double t) {
            return phi_b0({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]),
                           a[2] + t * (b[2] - a[2])},
                          2);
        };
        for (int i = 0; i < 100; ++i) {
            const double t0 = i / 100.0;
            const double t1 = (i + 1) / 100.0;
            CHECK(2 * at(0.5 * (t0 + t1)) - at(t0) - at(t1) >= -1e-7);
            CHECK(std::abs(at(t1) - at(t0)) < 0.1);
        }
    }
}

TEST_CASE("EPI bound equals phi through the equivalence") {
    Rng rng = derive_rng(4, 0);
    std::uniform_real_distribution<double> us(-2.0, 2.0);
    std::uniform_real_distribution<double> ul(0.2, 3.0);
    int triangle = 0;
    int other = 0;
    for (int k = 0; k < 200; ++k) {
        EPIInput in;
        in.modes = 1 + k % 3;
        in.lambda1 = ul(rng);
        in.lambda2 = ul(rng);
        in.s1 = us(rng);
        in.s2 = us(rng);
        in.s_y = us(rng);
        const EPIBound b = epi_bound(in);
        const Index n = 2 * in.modes;
        const Matrix a1 = std::sqrt(in.lambda1) * Matrix::Identity(n, n);
        const Matrix a2 = std::sqrt(in.lambda2) * Matrix::Identity(n, n);
        const PhiEvaluator base = [&](const Vector& s) {
            return phi_b0({s(0), s(1), s(2)}, static_cast<int>(n));
        };
        const double via = phi_from_equivalence(base, direct_sum(a1, a2),
                                                {a1, a2, Matrix::Identity(n, n)},
                                                (Vector(3) << in.s1, in.s2, in.s_y).finished());
        CHECK(b.value == doctest::Approx(via).epsilon(1e-9));
        (b.triangle_branch ? triangle : other)++;
    }
    CHECK(triangle > 0);
    CHECK(other > 0);
}

TEST_CASE("EPI bound: equal entropies and a balanced beam splitter") {
    EPIInput in;
    in.modes = 2;
    in.s1 = in.s2 = in.s_y = 0.4;
    const EPIBound b = epi_bound(in);
    CHECK(b.triangle_branch);
    CHECK(b.value == doctest::Approx(2.0 * std::log(0.75 * std::exp(0.4))));

    in.lambda1 = in.lambda2 = std::sqrt(0.5);
    in.s1 = 0.0;
    in.s2 = 5.0;
    in.s_y = 0.0;
    const EPIBound c = epi_bound(in);
    CHECK_FALSE(c.triangle_branch);
    CHECK(c.value == doctest::Approx(std::min({5.0, -2 * std::log(in.lambda2), 5.0 - 2 * std::log(in.lambda1)})));
    in.lambda1 = 0.0;
    CHECK_THROWS_AS(epi_bound(in), Error);
}

TEST_CASE("EPI for conditionally independent Gaussian inputs") {
    // If I(X1;X2|M) = 0 the classic entropy power inequality holds, so the bound
    // is at least S(X1|M) + S(X2|M).
    Rng rng = derive_rng(5, 0);
    std::uniform_real_distribution<double> ut(0.1, 1.4);
    for (int k = 0; k < 50; ++k) {
        const Matrix g1 = random_quantum_covariance(1, rng);
        const Matrix g2 = random_quantum_covariance(1, rng);
        const double th = ut(rng);
        const double c = std::cos(th);
        const double s = std::sin(th);
        const Matrix gy = c * c * g1 + s * s * g2;
        EPIInput in;
        in.lambda1 = c * c;
        in.lambda2 = s * s;
        in.s1 = von_neumann_gaussian(g1);
        in.s2 = von_neumann_gaussian(g2);
        in.s_y = von_neumann_gaussian(gy);
        CHECK(std::exp(in.s_y) >= c * c * std::exp(in.s1) + s * s * std::exp(in.s2) - 1e-12);
        CHECK(epi_bound(in).value >= in.s1 + in.s2 - 1e-9);
    }
}

TEST_CASE("equivalence shifts") {
    const PhiEvaluator sum = [](const Vector& s) { return s.sum(); };
    const Vector s = (Vector(2) << 0.3, -0.4).finished();
    const Matrix i2 = Matrix::Identity(2, 2);
    CHECK(phi_from_equivalence(sum, i2, {i2, i2}, s) == doctest::Approx(sum(s)));
    CHECK(phi_from_equivalence(sum, i2, {3.0 * i2, i2}, s) == doctest::Approx(sum(s) + 2 * std::log(3.0)));
    CHECK_THROWS_AS(phi_from_equivalence(sum, Matrix::Zero(2, 2), {i2, i2}, s), Error);
    CHECK_THROWS_AS(phi_from_equivalence(sum, i2, {i2}, s), Error);
}

TEST_CASE("quadratic Hamiltonians") {
    const QuadHamiltonian sq(oracle::squeezer(0.7), 1, 1);
    CHECK(sq.is_symmetric());
    CHECK(sq.coupling().norm() > 0.0);
    // H = Δ G with G symmetric generates symplectic maps but is not symmetric.
    Rng rng = derive_rng(6, 0);
    const Matrix g = symmetrized(random_gaussian_matrix(4, 4, rng));
    const QuadHamiltonian skew(oracle::omega(2) * g, 1, 1);
    CHECK_FALSE(skew.is_symmetric());
    CHECK_THROWS_AS(entanglement_rate(skew, 5.0), Error);
    CHECK(log_f_trace(skew, {0.1, 0.5}).size() == 2);
    CHECK_THROWS_AS(QuadHamiltonian(Matrix::Identity(4, 4), 1, 1), Error);
    CHECK_THROWS_AS(QuadHamiltonian(oracle::squeezer(1.0), 1, 2), Error);
}

TEST_CASE("ln f for the squeezer") {
    for (double r : {0.3, 1.0}) {
        const QuadHamiltonian h(oracle::squeezer(r), 1, 1);
        for (double t : {0.1, 1.0, 5.0, 20.0}) {
            const Matrix s = oracle::squeezer_exp(r, t);
            const double expected = std::log(s.topLeftCorner(2, 2).determinant()) +
                                    std::log(s.bottomRightCorner(2, 2).determinant());
            CHECK(log_f(h, t) == doctest::Approx(expected).epsilon(1e-10));
            CHECK(log_f(h, -t) == doctest::Approx(log_f(h, t)).epsilon(1e-10));
        }
    }
}

TEST_CASE("entanglement rate") {
    const double r = 0.8;
    const QuadHamiltonian h(oracle::squeezer(r), 1, 1);
    const EntanglementRate rate = entanglement_rate(h, 40.0, 40);
    CHECK(rate.lambda > 0.0);
    CHECK(rate.r_squared >= 0.999);
    CHECK(rate.asymptotic);
    CHECK_FALSE(rate.t_max_reduced);
    // Least-squares slope of the closed form 4 ln cosh(rt) on the same points.
    double mt = 0, my = 0, n = 0;
    for (const auto& [t, y] : rate.trace) {
        if (t >= 4.0 * (1 - 1e-12)) {
            mt += t;
            my += 4 * std::log(std::cosh(r * t));
            n += 1;
        }
    }
    mt /= n;
    my /= n;
    double stt = 0, sty = 0;
    for (const auto& [t, y] : rate.trace) {
        if (t >= 4.0 * (1 - 1e-12)) {
            stt += (t - mt) * (t - mt);
            sty += (t - mt) * (4 * std::log(std::cosh(r * t)) - my);
        }
    }
    CHECK(rate.lambda == doctest::Approx(sty / stt).epsilon(1e-8));
    CHECK(rate.lambda == doctest::Approx(4 * r).epsilon(1e-3));

    const EntanglementRate doubled = entanglement_rate(h, 80.0, 40);
    CHECK(doubled.lambda == doctest::Approx(rate.lambda).epsilon(0.02));

    const EntanglementRate huge = entanglement_rate(h, 1e4, 40);
    CHECK(huge.t_max_reduced);
    CHECK(huge.t_max < 1e4);
    CHECK(huge.lambda == doctest::Approx(4 * r).epsilon(1e-3));
}

TEST_CASE("block-diagonal Hamiltonians do not entangle") {
    Matrix h = Matrix::Zero(4, 4);
    h.diagonal() << 1.0, -1.0, 0.5, -0.5;
    const EntanglementRate rate = entanglement_rate(QuadHamiltonian(h, 1, 1), 20.0, 40);
    CHECK(std::abs(rate.lambda) <= 1e-6);
    for (const auto& [t, y] : rate.trace) {
        CHECK(std::abs(y) < 1e-9);
    }
}

TEST_CASE("correlation lower bound") {
    Rng rng = derive_rng(7, 0);
    const GaussianJoint joint(random_quantum_covariance(3, rng), 4);
    const auto id = correlation_lower_bound(Matrix::Identity(4, 4), 1, 1, joint);
    CHECK(std::abs(id.rhs) < 1e-9);
    CHECK(id.lhs == doctest::Approx(conditional_mutual_information(joint, 2)).epsilon(1e-9));
    CHECK(id.margin >= -1e-9);

    const Matrix s = expm(random_symmetric_hamiltonian(2, rng));
    const auto sym = correlation_lower_bound(s, 1, 1, joint);
    CHECK(sym.rhs == doctest::Approx(-oracle::symplectic_pair_constant(s, 1)).epsilon(1e-6));
    CHECK(sym.margin >= -1e-8);

    const GaussianJoint vacuum = GaussianJoint::without_memory(0.5 * Matrix::Identity(4, 4));
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        const Matrix st = oracle::squeezer_exp(1.0, t);
        const auto c = correlation_lower_bound(st, 1, 1, vacuum,
                                               oracle::symplectic_pair_constant(st, 1));
        CHECK(c.margin >= -1e-8);
    }
    CHECK_THROWS_AS(correlation_lower_bound(2.0 * Matrix::Identity(4, 4), 1, 1, joint, 0.0), Error);
}
