#pragma once

// Density-matrix-exponentiation PCA: swap-operator Hamiltonian
// simulation (dme_step), the shifted evolution e^{-iJt} with
// J = xi I - rho_M (exp_j), and spectral extraction of rho_M's
// 2nd..(d+1)th smallest eigenvectors through phase estimation over the
// composed unitary (qpca_spectrum), plus the full linear-algebra
// quantum pipeline (embed_quantum).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qlle/encoding.hpp"
#include "qlle/errors.hpp"
#include "qlle/hhl.hpp"
#include "qlle/linalg.hpp"
#include "qlle/lle.hpp"

namespace qlle {

struct ExpConfig {
    int steps = 256;                    // L
    double total_time = 1.5 * M_PI;     // t; xi * t < 2 pi keeps phases injective
    double shift = 1.0;                 // xi >= lambda_max(rho_M); 1 is always valid
    int clock_qubits = 10;
};

inline void validate(const ExpConfig& cfg) {
    require(cfg.steps >= 1, "qpca: steps must be positive");
    require(cfg.total_time >= 0.0, "qpca: total_time must be nonnegative");
    require(cfg.shift > 0.0, "qpca: shift must be positive");
    require(cfg.shift * cfg.total_time < 2.0 * M_PI,
            "qpca: shift * total_time must stay below 2 pi for injective phases");
    require(cfg.clock_qubits >= 1 && cfg.clock_qubits <= 24,
            "qpca: clock width out of simulable range");
}

/// One step of density-matrix exponentiation:
/// tr_1{ e^{-iS dt} (rho (x) sigma) e^{iS dt} }
///   = cos^2(dt) sigma + sin^2(dt) rho - i cos(dt) sin(dt) [rho, sigma],
/// using e^{-iS dt} = cos(dt) I - i sin(dt) S (S^2 = I). The closed form
/// is the exact partial trace, evaluated without materializing the
/// doubled space.
inline Matrix dme_step(const Matrix& rho, const Matrix& sigma, double dt) {
    require(rho.rows() == rho.cols() && sigma.rows() == sigma.cols() &&
                rho.rows() == sigma.rows(),
            "dme_step: dimension mismatch");
    const double c = std::cos(dt), s = std::sin(dt);
    Matrix comm = rho * sigma - sigma * rho;
    return c * c * sigma + s * s * rho - Complex(0.0, 1.0) * c * s * comm;
}

/// The composed unitary approximating e^{-iJt}, J = xi I - rho_M, as L
/// steps of e^{-i xi dt} * polar(I + i rho_M dt). The polar factor is
/// the unitarized first-order Taylor step of e^{+i rho_M dt} (the same
/// order of accuracy per step as the DME channel), so the product is
/// exactly unitary while the phases carry the O(dt^2)-per-step error.
inline Matrix exp_j(const Matrix& rho_m, const ExpConfig& cfg) {
    validate(cfg);
    require(is_hermitian(rho_m, 1e-9), "exp_j: rho_m must be Hermitian");
    const int n = int(rho_m.rows());
    const double dt = cfg.total_time / double(cfg.steps);
    EigenDecomposition ed = eig_hermitian(rho_m);
    Vector step_diag(n);
    for (int j = 0; j < n; ++j) {
        Complex z = Complex(1.0, ed.eigenvalues[j] * dt);
        step_diag[j] = std::exp(Complex(0.0, -cfg.shift * dt)) * (z / std::abs(z));
    }
    Matrix step = ed.eigenvectors * step_diag.asDiagonal() * ed.eigenvectors.adjoint();
    Matrix u = Matrix::Identity(n, n);
    for (int l = 0; l < cfg.steps; ++l) u = step * u;
    return u;
}

struct QpcaGroup {
    double eigenvalue = 0.0;  // rho_M eigenvalue decoded from the clock tick
    Matrix basis;             // dim x multiplicity, orthonormal columns
    bool merged = false;      // clock could not separate members of this group
};

struct QpcaSpectrum {
    std::vector<QpcaGroup> retained;   // ascending rho_M eigenvalue, d vectors total
    QpcaGroup discarded;               // the top-of-J (smallest rho_M) group
    std::vector<double> clock_histogram;
    std::vector<std::string> warnings;
};

namespace detail {

/// Orthonormal eigendecomposition of a (normal) unitary via Schur:
/// U = Q T Q* with T numerically diagonal; returns phases in [0, 1).
struct UnitaryEig {
    Matrix vectors;             // orthonormal columns
    std::vector<double> phase;  // eigenphase / 2pi, in [0, 1)
};

inline UnitaryEig eig_unitary(const Matrix& u) {
    Eigen::ComplexSchur<Matrix> schur(u);
    UnitaryEig out;
    out.vectors = schur.matrixU();
    const int n = int(u.rows());
    out.phase.resize(n);
    for (int j = 0; j < n; ++j) {
        double p = std::arg(schur.matrixT()(j, j)) / (2.0 * M_PI);
        p -= std::floor(p);
        out.phase[j] = p;
    }
    return out;
}

}  // namespace detail

/// Phase estimation over exp_j on the maximally mixed input: reads the
/// clock distribution, clusters eigenphases that the t-bit clock can
/// tell apart, decodes each cluster's tick back to a rho_M eigenvalue,
/// discards the top-of-J group (the xi - 0 eigenvalue, eigenvector
/// proportional to 1_N for a valid W) and returns the next d vectors.
/// Clusters the clock cannot split are returned as orthonormal bases of
/// the merged subspace with a warning.
inline QpcaSpectrum qpca_spectrum(const Matrix& rho_m, int d, const ExpConfig& cfg) {
    validate(cfg);
    require(cfg.total_time > 0.0, "qpca_spectrum: total_time must be positive");
    const int n = int(rho_m.rows());
    require(d >= 1 && d + 1 <= n, "qpca_spectrum: need d + 1 <= dim");

    Matrix u = exp_j(rho_m, cfg);
    detail::UnitaryEig ue = detail::eig_unitary(u);
    const std::uint64_t big_t = std::uint64_t(1) << cfg.clock_qubits;

    // Clock histogram for the maximally mixed input (weight 1/n per
    // eigencomponent, exact discrete phase-estimation kernel).
    QpcaSpectrum out;
    out.clock_histogram.assign(big_t, 0.0);
    for (int j = 0; j < n; ++j)
        for (std::uint64_t y = 0; y < big_t; ++y)
            out.clock_histogram[y] += detail::clock_kernel(ue.phase[j], y, big_t) / double(n);

    // Cluster eigencomponents the clock cannot separate: sort by phase
    // and merge neighbors closer than 1.5 ticks (circular).
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ue.phase[a] < ue.phase[b]; });
    const double merge_dist = 1.5 / double(big_t);
    std::vector<std::vector<int>> clusters;
    for (int idx = 0; idx < n; ++idx) {
        int j = order[idx];
        if (!clusters.empty()) {
            int prev = clusters.back().back();
            double dphi = ue.phase[j] - ue.phase[prev];
            if (dphi < merge_dist) {
                clusters.back().push_back(j);
                continue;
            }
        }
        clusters.push_back({j});
    }
    // circular wrap: first and last cluster may touch across phase 1 -> 0
    if (clusters.size() > 1) {
        double wrap = ue.phase[clusters.front().front()] + 1.0 - ue.phase[clusters.back().back()];
        if (wrap < merge_dist) {
            for (int j : clusters.back()) clusters.front().push_back(j);
            clusters.pop_back();
        }
    }

    // Decode each cluster: phase = frac(-lambda_J t / 2pi), so
    // lambda_J = ((1 - tick/T) mod 1) * 2pi / t and lambda_rho = xi - lambda_J.
    struct Decoded {
        double lambda_rho;
        Matrix basis;
        bool merged;
    };
    std::vector<Decoded> groups;
    for (const auto& cl : clusters) {
        double mean_phase = 0.0;
        for (int j : cl) {
            double p = ue.phase[j];
            // unwrap toward the first member for a meaningful mean
            double ref = ue.phase[cl.front()];
            if (p - ref > 0.5) p -= 1.0;
            if (ref - p > 0.5) p += 1.0;
            mean_phase += p;
        }
        mean_phase /= double(cl.size());
        double tick = std::round(mean_phase * double(big_t));
        double frac = tick / double(big_t);
        frac -= std::floor(frac);
        double lambda_j = (frac == 0.0 ? 0.0 : (1.0 - frac)) * 2.0 * M_PI / cfg.total_time;
        Decoded g;
        g.lambda_rho = cfg.shift - lambda_j;
        g.merged = cl.size() > 1;
        g.basis.resize(n, Eigen::Index(cl.size()));
        for (std::size_t m = 0; m < cl.size(); ++m) g.basis.col(m) = ue.vectors.col(cl[m]);
        if (g.merged)
            out.warnings.push_back("qpca_spectrum: clock resolution merged " +
                                   std::to_string(cl.size()) + " eigencomponents near "
                                   "eigenvalue " + std::to_string(g.lambda_rho));
        groups.push_back(std::move(g));
    }
    std::sort(groups.begin(), groups.end(),
              [](const Decoded& a, const Decoded& b) { return a.lambda_rho < b.lambda_rho; });

    // The smallest-rho_M group is the paper's discarded trivial group.
    // If it is merged it still holds d useful vectors beyond the trivial
    // one; the caller separates them (see embed_quantum).
    out.discarded.eigenvalue = groups.front().lambda_rho;
    out.discarded.basis = groups.front().basis;
    out.discarded.merged = groups.front().merged;

    int taken = 0;
    for (std::size_t gi = 1; gi < groups.size() && taken < d; ++gi) {
        QpcaGroup g;
        g.eigenvalue = groups[gi].lambda_rho;
        g.merged = groups[gi].merged;
        int want = std::min<int>(d - taken, int(groups[gi].basis.cols()));
        g.basis = groups[gi].basis.leftCols(want);
        taken += want;
        out.retained.push_back(std::move(g));
    }
    return out;
}

/// Rayleigh-Ritz refinement inside a subspace: diagonalizes the
/// restriction of rho_m to the span of `basis` (matrix elements
/// <v_a| rho_m |v_b> are quantum expectation values) and returns the
/// Ritz vectors, ascending Ritz value.
inline Matrix ritz_refine(const Matrix& rho_m, const Matrix& basis, RealVector* values = nullptr) {
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
    Matrix restricted = q.adjoint() * rho_m * q;
    restricted = Matrix(0.5 * (restricted + restricted.adjoint()));
    EigenDecomposition ed = eig_hermitian(restricted);
    if (values) *values = ed.eigenvalues;
    return q * ed.eigenvectors;
}

struct QuantumPipelineConfig {
    HhlConfig hhl;         // weight solve
    ExpConfig exp;         // spectrum extraction
    std::uint64_t shots = 0;  // 0 = exact overlap tests in quantum_knn
    std::uint64_t seed = 0;
};

/// Full linear-algebra quantum pipeline: overlap-test k-NN, HHL weight
/// columns, the qRAM density operator, and qPCA spectrum extraction.
/// When the clock merges the bottom eigenvalue cluster (inevitable once
/// N grows and the nontrivial spectrum compresses), the merged group is
/// refined by Rayleigh-Ritz in the recovered subspace; the known trivial
/// direction 1_N and any padding directions are projected out first.
inline EmbeddingMatrix embed_quantum(const DataMatrix& data, int k, int d,
                                     const QuantumPipelineConfig& cfg,
                                     QpcaSpectrum* spectrum_out = nullptr,
                                     RealMatrix* weights_out = nullptr) {
    const int n = data.count();
    require(d >= 1 && d <= n - 2, "embed_quantum: need 1 <= d <= N-2");
    NeighborGraph graph = quantum_knn(data, k, cfg.shots, cfg.seed);
    RealMatrix w = quantum_weights(data, graph, cfg.hhl);
    if (weights_out) *weights_out = w;
    Matrix rho = build_rho_m_qram(w);
    const int np = int(rho.rows());

    QpcaSpectrum spec = qpca_spectrum(rho, std::min(d + np - n, np - 1), cfg.exp);

    // Collect candidate directions: everything the clock retained plus
    // the non-trivial members of a merged discarded group.
    std::vector<Vector> candidates;
    auto push_group = [&](const Matrix& basis) {
        for (Eigen::Index c = 0; c < basis.cols(); ++c) candidates.push_back(basis.col(c));
    };
    if (spec.discarded.merged) push_group(spec.discarded.basis);
    for (const auto& g : spec.retained) push_group(g.basis);

    // Remove known-trivial directions: 1_N (in the leading N coordinates)
    // and zero-padding axes beyond N.
    Matrix trivial = Matrix::Zero(np, 1 + (np - n));
    for (int i = 0; i < n; ++i) trivial(i, 0) = 1.0 / std::sqrt(double(n));
    for (int p = n; p < np; ++p) trivial(p, 1 + (p - n)) = 1.0;
    Matrix cand(np, Eigen::Index(candidates.size()));
    for (std::size_t c = 0; c < candidates.size(); ++c) cand.col(Eigen::Index(c)) = candidates[c];
    Matrix proj = cand - trivial * (trivial.adjoint() * cand);

    // Drop directions annihilated by the projection, orthonormalize the
    // rest, and Rayleigh-Ritz refine to order them by rho_M eigenvalue.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < proj.cols(); ++c)
        if (proj.col(c).norm() > 1e-6) keep.push_back(c);
    require(int(keep.size()) >= d, "embed_quantum: spectrum extraction lost the target subspace");
    Matrix kept(np, Eigen::Index(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) kept.col(Eigen::Index(c)) = proj.col(keep[c]);
    Matrix refined = ritz_refine(rho, kept);

    if (spectrum_out) *spectrum_out = spec;
    EmbeddingMatrix out;
    out.y.resize(d, n);
    for (int r = 0; r < d; ++r) {
        RealVector v = refined.col(r).head(n).real();
        double nrm = v.norm();
        require(nrm > 1e-9, "embed_quantum: recovered eigenvector escaped the data subspace");
        v /= nrm;
        out.y.row(r) = std::sqrt(double(n)) * canonical_sign(v).transpose();
    }
    return out;
}

}  // namespace qlle
