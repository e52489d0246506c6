#pragma once

// Dense real/complex linear algebra shared by every other header:
// Hermitian eigendecomposition with a canonical sign convention,
// linear solves with pseudo-inverse fallback, Kronecker products and
// partial traces over bipartite systems.

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <string>

#include "qlle/errors.hpp"

namespace qlle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline bool is_hermitian(const Matrix& a, double tol = 1e-12) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

struct EigenDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // orthonormal columns, canonical sign
};

/// Sign convention: scale so the component of largest magnitude is real
/// and positive, ties broken by lowest index.
inline Vector canonical_sign(const Vector& v) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best_mag + 1e-14) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag <= 0.0) return v;
    Complex phase = v[best] / std::abs(v[best]);
    return v / phase;
}

inline RealVector canonical_sign(const RealVector& v) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best_mag + 1e-14) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag <= 0.0 || v[best] >= 0.0) return v;
    return -v;
}

/// Full spectrum of a Hermitian matrix, eigenvalues ascending.
inline EigenDecomposition eig_hermitian(const Matrix& a) {
    require(a.rows() == a.cols(), "eig_hermitian: matrix must be square");
    require(is_hermitian(a), "eig_hermitian: matrix must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    EigenDecomposition d;
    d.eigenvalues = es.eigenvalues();
    d.eigenvectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < d.eigenvectors.cols(); ++i)
        d.eigenvectors.col(i) = canonical_sign(Vector(d.eigenvectors.col(i)));
    return d;
}

/// Least-squares solve of a x = b; exact when a is invertible. Falls
/// back to the pseudo-inverse with relative cutoff 1e-12 * sigma_max
/// when a is singular.
inline Vector solve_linear(const Matrix& a, const Vector& b) {
    require(a.rows() == b.size(), "solve_linear: dimension mismatch");
    require(a.rows() == a.cols(), "solve_linear: matrix must be square");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    return svd.solve(b);
}

inline RealVector solve_linear(const RealMatrix& a, const RealVector& b) {
    require(a.rows() == b.size(), "solve_linear: dimension mismatch");
    require(a.rows() == a.cols(), "solve_linear: matrix must be square");
    Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    return svd.solve(b);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

enum class Subsystem { First, Second };

/// Partial trace of rho on C^{d1} (x) C^{d2}, keeping one factor.
inline Matrix partial_trace(const Matrix& rho, int d1, int d2, Subsystem keep) {
    require(d1 >= 1 && d2 >= 1, "partial_trace: dimensions must be positive");
    require(rho.rows() == rho.cols(), "partial_trace: operator must be square");
    require(rho.rows() == Eigen::Index(d1) * d2,
            "partial_trace: d1*d2 != dim(rho) (" + std::to_string(d1) + "*" +
                std::to_string(d2) + " vs " + std::to_string(rho.rows()) + ")");
    if (keep == Subsystem::First) {
        Matrix out = Matrix::Zero(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d1; ++j)
                for (int m = 0; m < d2; ++m)
                    out(i, j) += rho(i * d2 + m, j * d2 + m);
        return out;
    }
    Matrix out = Matrix::Zero(d2, d2);
    for (int m = 0; m < d2; ++m)
        for (int n = 0; n < d2; ++n)
            for (int i = 0; i < d1; ++i)
                out(m, n) += rho(i * d2 + m, i * d2 + n);
    return out;
}

inline int next_power_of_two(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline int log2_exact(int n) {
    require(n >= 1 && (n & (n - 1)) == 0, "log2_exact: not a power of two");
    int q = 0;
    while ((1 << q) < n) ++q;
    return q;
}

}  // namespace qlle
