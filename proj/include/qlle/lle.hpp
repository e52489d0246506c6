#pragma once

// Classical locally linear embedding: the verification oracle every
// quantum pipeline is checked against.
//
// Pipeline: knn -> local_weights -> build_m -> embed. The weight solve
// works on the k x k local Gram system; the embedding takes the 2nd to
// (d+1)th smallest eigenvectors of M = (I - W)(I - W^T), scaled by
// sqrt(N) so that Y 1 = 0 and Y Y^T / N = I_d.

#include <algorithm>
#include <numeric>
#include <vector>

#include "qlle/datasets.hpp"
#include "qlle/errors.hpp"
#include "qlle/linalg.hpp"

namespace qlle {

struct NeighborGraph {
    int k = 0;
    std::vector<std::vector<int>> neighbors;     // per point, ascending distance
    std::vector<std::vector<double>> distances;  // matching order
};

struct LleDiagnostics {
    std::vector<double> reconstruction_residual;  // |x_i - sum_j W_ij x_j|
    std::vector<bool> regularized;                // C_i needed the epsilon ridge
    std::vector<double> eigenvalues;              // spectrum of M, filled by embed()
};

/// Euclidean k-NN with deterministic tie-breaking: ascending distance,
/// ties resolved toward the lower index. A point is never its own neighbor.
inline NeighborGraph knn(const DataMatrix& data, int k) {
    const int n = data.count();
    require(k >= 1 && k < n, "knn: need 1 <= k < N");
    NeighborGraph g;
    g.k = k;
    g.neighbors.resize(n);
    g.distances.resize(n);
    std::vector<std::pair<double, int>> order(n - 1);
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            order[m++] = {(data.points.col(i) - data.points.col(j)).norm(), j};
        }
        std::sort(order.begin(), order.end());
        g.neighbors[i].resize(k);
        g.distances[i].resize(k);
        for (int j = 0; j < k; ++j) {
            g.distances[i][j] = order[j].first;
            g.neighbors[i][j] = order[j].second;
        }
    }
    return g;
}

/// Local Gram matrix C_i = (dX_i)^T (dX_i) over the k neighbor offsets.
inline RealMatrix local_gram(const DataMatrix& data, const NeighborGraph& graph, int i) {
    const int k = graph.k;
    RealMatrix dx(data.dim(), k);
    for (int j = 0; j < k; ++j)
        dx.col(j) = data.points.col(i) - data.points.col(graph.neighbors[i][j]);
    return dx.transpose() * dx;
}

/// Conditioning ridge for the local Gram solve, as a fraction of tr(C_i).
/// With k > D every C_i is rank-deficient and the unregularized target
/// matrix M acquires a large numerical nullspace, leaving the d = 2
/// embedding undetermined; the standard always-on ridge keeps the bottom
/// of M's spectrum geometry-driven and the embedding well-posed. The
/// magnitude also sets the condition number the quantum weight solve
/// must handle: 3e-2 keeps it within reach of an 8-bit clock register.
inline constexpr double kDefaultWeightRidge = 3e-2;

/// Reconstruction weights: column i solves (C_i + eps tr(C_i) I) w = 1_k,
/// then is rescaled to sum 1. Columns whose Gram matrix was rank-deficient
/// before the ridge are flagged in the diagnostics, not treated as errors.
inline RealMatrix local_weights(const DataMatrix& data, const NeighborGraph& graph,
                                LleDiagnostics* diag = nullptr,
                                double ridge_eps = kDefaultWeightRidge) {
    const int n = data.count();
    const int k = graph.k;
    require(int(graph.neighbors.size()) == n, "local_weights: graph/data mismatch");
    RealMatrix w = RealMatrix::Zero(n, n);
    if (diag) {
        diag->reconstruction_residual.assign(n, 0.0);
        diag->regularized.assign(n, false);
    }
    const RealVector ones = RealVector::Ones(k);
    for (int i = 0; i < n; ++i) {
        RealMatrix c = local_gram(data, graph, i);
        if (diag) {
            Eigen::JacobiSVD<RealMatrix> svd(c);
            diag->regularized[i] = svd.singularValues()(0) <= 0.0 ||
                                   svd.singularValues()(k - 1) < 1e-12 * svd.singularValues()(0);
        }
        if (ridge_eps > 0.0)
            c.diagonal().array() += ridge_eps * std::max(c.trace(), 1e-300);
        RealVector wi = solve_linear(c, ones);
        double s = wi.sum();
        if (std::abs(s) < 1e-300) {
            // Constraint cannot be met by rescaling; fall back to uniform.
            wi = ones / double(k);
        } else {
            wi /= s;
        }
        RealVector recon = RealVector::Zero(data.dim());
        for (int j = 0; j < k; ++j) {
            w(graph.neighbors[i][j], i) = wi[j];
            recon += wi[j] * data.points.col(graph.neighbors[i][j]);
        }
        if (diag) diag->reconstruction_residual[i] = (data.points.col(i) - recon).norm();
    }
    return w;
}

/// Target matrix M = (I - W)(I - W^T); symmetric PSD with M 1 = 0.
inline RealMatrix build_m(const RealMatrix& w) {
    require(w.rows() == w.cols(), "build_m: W must be square");
    const Eigen::Index n = w.rows();
    RealMatrix a = RealMatrix::Identity(n, n) - w;
    RealMatrix m = a * a.transpose();
    return 0.5 * (m + m.transpose());  // kill round-off asymmetry
}

struct EmbeddingMatrix {
    RealMatrix y;  // d x N
    int d() const { return int(y.rows()); }
    int n() const { return int(y.cols()); }
};

/// Orthonormal basis of the complement of the ones vector in R^n: the
/// columns of the returned n x (n-1) matrix Q satisfy Q^T Q = I and
/// Q^T 1 = 0 (Householder reflector sending e_1 to 1/sqrt(n), first
/// column dropped).
inline RealMatrix ones_complement_basis(int n) {
    require(n >= 2, "ones_complement_basis: need n >= 2");
    RealVector u = RealVector::Ones(n) / std::sqrt(double(n));
    u[0] -= 1.0;
    u.normalize();
    RealMatrix h = RealMatrix::Identity(n, n) - 2.0 * u * u.transpose();
    return h.rightCols(n - 1);
}

/// Rows of Y are the sqrt(N)-scaled eigenvectors 2..d+1 of M (ascending
/// eigenvalues), canonical sign. The bottom eigenvector of M is 1_N by
/// construction, so the solve is done on M restricted to the complement
/// of 1_N; this keeps Y 1 = 0 exact even when M has further near-zero
/// eigenvalues.
inline EmbeddingMatrix embed(const RealMatrix& m, int d, LleDiagnostics* diag = nullptr) {
    const int n = int(m.rows());
    require(d >= 1 && d <= n - 1, "embed: need 1 <= d <= N-1");
    RealMatrix q = ones_complement_basis(n);
    EigenDecomposition ed = eig_hermitian(Matrix((q.transpose() * m * q).cast<Complex>()));
    if (diag) {
        diag->eigenvalues.assign(n, 0.0);
        for (int i = 0; i < n - 1; ++i) diag->eigenvalues[i + 1] = ed.eigenvalues[i];
        diag->eigenvalues[0] = (m * RealVector::Ones(n)).dot(RealVector::Ones(n)) / double(n);
    }
    EmbeddingMatrix out;
    out.y.resize(d, n);
    for (int r = 0; r < d; ++r) {
        RealVector v = q * ed.eigenvectors.col(r).real();
        out.y.row(r) = std::sqrt(double(n)) * canonical_sign(v).transpose();
    }
    return out;
}

/// Full classical pipeline on one dataset.
inline EmbeddingMatrix lle(const DataMatrix& data, int k, int d, LleDiagnostics* diag = nullptr) {
    NeighborGraph g = knn(data, k);
    RealMatrix w = local_weights(data, g, diag);
    return embed(build_m(w), d, diag);
}

}  // namespace qlle
