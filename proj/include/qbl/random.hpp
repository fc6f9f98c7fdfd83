#pragma once

#include <cstdint>
#include <random>

#include "qbl/linalg.hpp"

namespace qbl {

using Rng = std::mt19937_64;

/// Independent stream for sub-task `index` of a run seeded with `seed`.
Rng derive_rng(std::uint64_t seed, std::uint64_t index);

Matrix random_gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Wishart-style positive-definite matrix G G^T / n + floor * I.
Matrix random_spd(Index n, Rng& rng, double floor = 0.05);

/// Random symmetric positive-semidefinite matrix of the given rank.
Matrix random_psd(Index n, Index rank, Rng& rng);

/// Symplectic matrix exp(Δ G) with G symmetric Gaussian of size `scale`.
Matrix random_symplectic(int modes, Rng& rng, double scale = 0.5);

/// Symmetric Hamiltonian generator: H = H^T and H Δ + Δ H^T = 0.
Matrix random_symmetric_hamiltonian(int modes, Rng& rng, double scale = 0.5);

/// S diag(ν_1, ν_1, ..., ν_m, ν_m) S^T with ν_i uniform in [nu_lo, nu_hi].
Matrix random_quantum_covariance(int modes, Rng& rng, double nu_lo = 0.6, double nu_hi = 3.0,
                                 double squeeze = 0.5);

/// n x k matrix with orthonormal columns.
Matrix random_orthonormal_frame(Index n, Index k, Rng& rng);

} // namespace qbl
