#include "qbl/random.hpp"

#include "qbl/symplectic.hpp"

namespace qbl {

Rng derive_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

Matrix random_gaussian_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            out(i, j) = normal(rng);
        }
    }
    return out;
}

Matrix random_spd(Index n, Rng& rng, double floor) {
    const Matrix g = random_gaussian_matrix(n, n, rng);
    return symmetrized(g * g.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n));
}

Matrix random_psd(Index n, Index rank, Rng& rng) {
    const Matrix g = random_gaussian_matrix(n, rank, rng);
    return symmetrized(g * g.transpose());
}

Matrix random_symplectic(int modes, Rng& rng, double scale) {
    const Index n = 2 * modes;
    const Matrix g = scale * random_gaussian_matrix(n, n, rng);
    const Matrix delta = standard_form(modes).matrix();
    return expm(delta * symmetrized(g));
}

Matrix random_symmetric_hamiltonian(int modes, Rng& rng, double scale) {
    const Index n = 2 * modes;
    const Matrix g = symmetrized(scale * random_gaussian_matrix(n, n, rng));
    const Matrix delta = standard_form(modes).matrix();
    // Δ anticommutes with the result, which is the Hamiltonian condition for symmetric H.
    return symmetrized(0.5 * (g + delta * g * delta));
}

Matrix random_quantum_covariance(int modes, Rng& rng, double nu_lo, double nu_hi, double squeeze) {
    std::uniform_real_distribution<double> uni(nu_lo, nu_hi);
    Vector diag(2 * modes);
    for (int i = 0; i < modes; ++i) {
        const double nu = uni(rng);
        diag(2 * i) = nu;
        diag(2 * i + 1) = nu;
    }
    const Matrix s = random_symplectic(modes, rng, squeeze);
    return symmetrized(s * diag.asDiagonal() * s.transpose());
}

Matrix random_orthonormal_frame(Index n, Index k, Rng& rng) {
    const Matrix g = random_gaussian_matrix(n, k, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(n, k);
}

} // namespace qbl
