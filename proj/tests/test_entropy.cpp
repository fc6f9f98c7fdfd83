#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qbl/entropy.hpp"
#include "qbl/error.hpp"
#include "qbl/random.hpp"
#include "qbl/symplectic.hpp"

using namespace qbl;

namespace {

// Two-mode squeezed vacuum with squeezing r.
Matrix tmsv(double r) {
    const double c = 0.5 * std::cosh(2 * r);
    const double s = 0.5 * std::sinh(2 * r);
    Matrix g(4, 4);
    g << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
    return g;
}

} // namespace

TEST_CASE("Shannon entropy") {
    CHECK(shannon_gaussian(Matrix::Identity(3, 3)) == doctest::Approx(1.5));
    Rng rng = derive_rng(1, 0);
    for (int k = 0; k < 20; ++k) {
        const Matrix g = random_spd(1 + k % 5, rng);
        CHECK(shannon_gaussian(g) == doctest::Approx(oracle::shannon(g)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(shannon_gaussian(-Matrix::Identity(2, 2)), Error);
}

TEST_CASE("bosonic g") {
    CHECK(bosonic_g(0.5) == 0.0);
    CHECK(bosonic_g(1.0) == doctest::Approx(1.5 * std::log(1.5) - 0.5 * std::log(0.5)));
    for (double nu : {0.51, 0.8, 2.0, 17.5, 1e3}) {
        CHECK(bosonic_g(nu) == doctest::Approx(oracle::g(nu)).epsilon(1e-12));
    }
    CHECK(bosonic_g(0.5 - 1e-12) == 0.0);
    CHECK_THROWS_AS(bosonic_g(0.4), Error);
}

TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_gaussian(Matrix()) == 0.0);
    CHECK(von_neumann_gaussian(0.5 * Matrix::Identity(4, 4)) == doctest::Approx(0.0));
    CHECK(von_neumann_gaussian(1.3 * Matrix::Identity(2, 2)) == doctest::Approx(oracle::g(1.3)));
    Rng rng = derive_rng(2, 0);
    for (int k = 0; k < 30; ++k) {
        const Matrix g = random_quantum_covariance(1 + k % 3, rng);
        CHECK(von_neumann_gaussian(g) == doctest::Approx(oracle::von_neumann(g)).epsilon(1e-9));
    }
    try {
        von_neumann_gaussian(0.3 * Matrix::Identity(2, 2));
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StateInvalid);
    }
}

TEST_CASE("joint state validation") {
    CHECK_THROWS_AS(GaussianJoint(Matrix::Identity(3, 3), 2), Error);  // odd memory
    CHECK_THROWS_AS(GaussianJoint(Matrix::Identity(3, 3), 1), Error);  // odd quantum X
    CHECK_NOTHROW(GaussianJoint(Matrix::Identity(3, 3), 1, SubsystemKind::Classical));
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(GaussianJoint::without_memory(asym), Error);
}

TEST_CASE("conditional entropy without correlations") {
    Rng rng = derive_rng(4, 0);
    const Matrix gx = random_quantum_covariance(1, rng);
    const Matrix gm = random_quantum_covariance(2, rng);
    const auto joint = GaussianJoint::product(gx, gm);
    CHECK(conditional_entropy(joint) == doctest::Approx(oracle::von_neumann(gx)).epsilon(1e-9));
    const auto classical = GaussianJoint::product(gx, gm, SubsystemKind::Classical);
    CHECK(conditional_entropy(classical) == doctest::Approx(oracle::shannon(gx)).epsilon(1e-9));
}

TEST_CASE("pure entangled state has negative conditional entropy") {
    const Matrix g = tmsv(0.7);
    const GaussianJoint joint(g, 2);
    const double sm = oracle::g(0.5 * std::cosh(1.4));
    CHECK(conditional_entropy(joint) == doctest::Approx(-sm).epsilon(1e-9));
}

TEST_CASE("classical conditioning uses the Schur complement") {
    Rng rng = derive_rng(6, 0);
    for (int k = 0; k < 10; ++k) {
        const Matrix g = random_quantum_covariance(2, rng);
        const GaussianJoint joint(g, 2, SubsystemKind::Classical);
        const Matrix gx = g.topLeftCorner(2, 2);
        const Matrix gm = g.bottomRightCorner(2, 2);
        const Matrix c = g.topRightCorner(2, 2);
        const Matrix schur = gm - c.transpose() * gx.inverse() * c;
        const double expected =
            oracle::shannon(gx) + oracle::von_neumann(schur) - oracle::von_neumann(gm);
        CHECK(conditional_entropy(joint) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("conditional mutual information") {
    Rng rng = derive_rng(7, 0);
    const Matrix a = random_quantum_covariance(1, rng);
    const Matrix b = random_quantum_covariance(1, rng);
    const Matrix m = random_quantum_covariance(1, rng);
    const GaussianJoint product(direct_sum(direct_sum(a, b), m), 4);
    CHECK(std::abs(conditional_mutual_information(product, 2)) < 1e-10);
    for (int k = 0; k < 50; ++k) {
        const GaussianJoint joint(random_quantum_covariance(3, rng), 4);
        CHECK(conditional_mutual_information(joint, 2) >= -1e-10);
    }
    CHECK_THROWS_AS(conditional_mutual_information(product, 4), Error);
}

TEST_CASE("entropy bounds between von Neumann and Shannon") {
    Rng rng = derive_rng(8, 0);
    const double c = std::log(std::exp(1.0) / 2.0);
    for (int k = 0; k < 100; ++k) {
        const int m = 1 + k % 3;
        const Matrix g = random_quantum_covariance(m, rng, 0.5, 3.0);
        const double sg = shannon_gaussian(g);
        const double sq = von_neumann_gaussian(g);
        const double nu = qbl::symplectic_eigenvalues(g).front();
        CHECK(sq <= sg + 1e-10);
        CHECK(sg - m / (4 * nu * nu) * c <= sq + 1e-10);
        CHECK(sg - m * c <= sg - m / (4 * nu * nu) * c + 1e-12);
    }
}

TEST_CASE("asymptotic residuals decay like 1/t") {
    Rng rng = derive_rng(10, 0);
    const Matrix g = random_quantum_covariance(2, rng);
    const Matrix a = random_spd(4, rng);
    std::vector<double> grid;
    for (int k = 0; k <= 30; ++k) {
        grid.push_back(std::pow(10.0, -1.0 + 0.2 * k));
    }
    const auto table = asymptotic_entropy_check(g, a, grid);
    REQUIRE(table.von_neumann_residual.size() == grid.size());
    CHECK(std::abs(table.shannon_residual.back()) < 1e-3);
    CHECK(std::abs(table.von_neumann_residual.back()) < 1e-3);
    // t |r(t)| settles on a constant.
    const double last = grid.back() * std::abs(table.shannon_residual.back());
    const double prev = grid[grid.size() - 6] * std::abs(table.shannon_residual[grid.size() - 6]);
    CHECK(last == doctest::Approx(prev).epsilon(0.05));
}
