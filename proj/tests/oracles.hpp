#pragma once

// Reference computations that avoid the library's own code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qbl/linalg.hpp"

namespace oracle {

using qbl::Index;
using qbl::Matrix;
using qbl::Vector;

inline Matrix omega(int modes) {
    Matrix d = Matrix::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        d(2 * k, 2 * k + 1) = 1.0;
        d(2 * k + 1, 2 * k) = -1.0;
    }
    return d;
}

// |eigenvalues| of γΔ^{-1}, each pair collapsed to one value.
inline std::vector<double> symplectic_eigenvalues(const Matrix& gamma) {
    const int modes = static_cast<int>(gamma.rows() / 2);
    const Matrix d = omega(modes);
    const Matrix d_inv = d.inverse();
    Eigen::EigenSolver<Matrix> es(gamma * d_inv, false);
    std::vector<double> mags;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        mags.push_back(std::abs(es.eigenvalues()(i)));
    }
    std::sort(mags.begin(), mags.end());
    std::vector<double> nu;
    for (std::size_t i = 0; i < mags.size(); i += 2) {
        nu.push_back(0.5 * (mags[i] + mags[i + 1]));
    }
    return nu;
}

// g(ν) in long double.
inline double g(double nu) {
    const long double a = static_cast<long double>(nu) + 0.5L;
    const long double b = static_cast<long double>(nu) - 0.5L;
    const long double lb = b > 0 ? b * std::log(b) : 0.0L;
    return static_cast<double>(a * std::log(a) - lb);
}

inline double g_prime(double nu) { return std::log((nu + 0.5) / (nu - 0.5)); }

inline double von_neumann(const Matrix& gamma) {
    double s = 0.0;
    for (double v : symplectic_eigenvalues(gamma)) {
        s += g(v);
    }
    return s;
}

// Gaussian differential entropy from the eigenvalues of γ.
inline double shannon(const Matrix& gamma) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gamma, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        s += 0.5 * (1.0 + std::log(es.eigenvalues()(i)));
    }
    return s;
}

// Constant of the datum (I 0), (0 I), (I I) on ℝ^{2n} for p in the open region.
inline double triangle_constant(const Vector& p, int n) {
    double acc = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        acc += (1.0 - p(i)) * std::log(1.0 - p(i)) - p(i) * std::log(p(i));
    }
    return 0.5 * n * acc;
}

// -½ ln(det S11 det S22) for S on m1 + m2 modes.
inline double symplectic_pair_constant(const Matrix& s, int m1) {
    const Index n1 = 2 * m1;
    const Index n2 = s.rows() - n1;
    return -0.5 * (std::log(s.topLeftCorner(n1, n1).determinant()) +
                   std::log(s.bottomRightCorner(n2, n2).determinant()));
}

// exp(tH) for the two-mode squeezer H with coupling r, written out by hand.
inline Matrix squeezer_exp(double r, double t) {
    const double c = std::cosh(r * t);
    const double s = std::sinh(r * t);
    Matrix m(4, 4);
    m << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
    return m;
}

inline Matrix squeezer(double r) {
    Matrix h(4, 4);
    h << 0, 0, r, 0,
         0, 0, 0, -r,
         r, 0, 0, 0,
         0, -r, 0, 0;
    return h;
}

} // namespace oracle
