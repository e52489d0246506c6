#pragma once

// Test-only oracles, deliberately independent of the library's own
// computation paths: plain DFT matrices, integer arithmetic, constrained
// least squares by direct elimination, brute-force embedding search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "qlle/linalg.hpp"

namespace oracle {

using qlle::Complex;
using qlle::Matrix;
using qlle::RealMatrix;
using qlle::RealVector;
using qlle::Vector;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (double(g() >> 11) * 0x1.0p-53);
}

inline double gaussian(std::mt19937_64& g) {
    // Box-Muller; independent of any library RNG plumbing.
    double u1 = uniform(g), u2 = uniform(g);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline RealMatrix random_real(std::mt19937_64& g, int rows, int cols) {
    RealMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gaussian(g);
    return m;
}

inline Matrix random_complex(std::mt19937_64& g, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(gaussian(g), gaussian(g));
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& g, int n) {
    Matrix a = random_complex(g, n, n);
    return Matrix(0.5 * (a + a.adjoint()));
}

inline Matrix random_density(std::mt19937_64& g, int n) {
    Matrix a = random_complex(g, n, n);
    Matrix rho = a * a.adjoint();
    return Matrix(rho / rho.trace());
}

inline Vector random_state(std::mt19937_64& g, int dim) {
    Vector v = random_complex(g, dim, 1);
    return Vector(v / v.norm());
}

/// Hermitian matrix with a prescribed condition number (eigenvalues in
/// [lambda_max / kappa, lambda_max]).
inline Matrix random_conditioned_hermitian(std::mt19937_64& g, int n, double kappa,
                                           double lambda_max = 1.0) {
    Matrix a = random_complex(g, n, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    RealVector evals(n);
    evals[0] = lambda_max / kappa;
    evals[n - 1] = lambda_max;
    for (int i = 1; i < n - 1; ++i) evals[i] = uniform(g, lambda_max / kappa, lambda_max);
    return Matrix(q * evals.asDiagonal().toDenseMatrix().cast<Complex>() * q.adjoint());
}

/// Plain DFT matrix, F[y][a] = exp(2 pi i a y / n) / sqrt(n).
inline Matrix dft_matrix(int n) {
    Matrix f(n, n);
    for (int y = 0; y < n; ++y)
        for (int a = 0; a < n; ++a)
            f(y, a) = std::exp(Complex(0.0, 2.0 * M_PI * double(a) * double(y) / double(n))) /
                      std::sqrt(double(n));
    return f;
}

/// Exact matrix exponential exp(i s H) for Hermitian H, via its spectrum.
inline Matrix herm_exp(const Matrix& h, double s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(h.rows());
    for (Eigen::Index j = 0; j < h.rows(); ++j)
        phases[j] = std::exp(Complex(0.0, s * es.eigenvalues()[j]));
    return Matrix(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

/// Minimize |x - B w|^2 subject to sum(w) = 1 by direct elimination:
/// substitute w_k = 1 - sum(w_1..w_{k-1}) and solve the unconstrained
/// least-squares problem.
inline RealVector constrained_reconstruction_weights(const RealVector& x, const RealMatrix& b,
                                                     double ridge = 0.0) {
    const int k = int(b.cols());
    if (k == 1) {
        RealVector w(1);
        w[0] = 1.0;
        return w;
    }
    // Eliminate the sum-to-one constraint: w_k = 1 - sum(w_head), then
    // minimize |rhs - A w_head|^2 + ridge (|w_head|^2 + w_k^2) by its
    // normal equations.
    RealVector rhs = x - b.col(k - 1);
    RealMatrix a(b.rows(), k - 1);
    for (int j = 0; j < k - 1; ++j) a.col(j) = b.col(j) - b.col(k - 1);
    RealMatrix lhs = a.transpose() * a +
                     ridge * (RealMatrix::Identity(k - 1, k - 1) +
                              RealMatrix::Ones(k - 1, k - 1));
    RealVector rvec = a.transpose() * rhs + ridge * RealVector::Ones(k - 1);
    RealVector w_head = lhs.colPivHouseholderQr().solve(rvec);
    RealVector w(k);
    w.head(k - 1) = w_head;
    w[k - 1] = 1.0 - w_head.sum();
    return w;
}

/// Random d x N matrix satisfying Y 1 = 0 and Y Y^T / N = I exactly
/// (centering followed by symmetric whitening of a Gaussian draw).
inline RealMatrix random_constrained_embedding(std::mt19937_64& g, int d, int n) {
    RealMatrix y = random_real(g, d, n);
    RealVector mean = y.rowwise().mean();
    y.colwise() -= mean;
    RealMatrix cov = y * y.transpose() / double(n);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(cov);
    RealVector inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    RealMatrix white = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
    return white * y;
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(a - b));
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Largest principal angle (degrees) between the row spaces of two
/// d x N matrices, via the singular values of Qa^T Qb.
inline double principal_angle_deg(const RealMatrix& a, const RealMatrix& b) {
    Eigen::HouseholderQR<RealMatrix> qa(a.transpose()), qb(b.transpose());
    RealMatrix ta = qa.householderQ() * RealMatrix::Identity(a.cols(), a.rows());
    RealMatrix tb = qb.householderQ() * RealMatrix::Identity(b.cols(), b.rows());
    Eigen::JacobiSVD<RealMatrix> svd(ta.transpose() * tb);
    double c = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
    return std::acos(c) * 180.0 / M_PI;
}

}  // namespace oracle
