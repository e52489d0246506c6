#pragma once

// Amplitude encoding and the overlap-based distance machinery:
// the interference test returning P(0) = 1/2 + 1/2 Re<x|y>, squared
// distances recovered from overlaps and norms, the qRAM neighbor state
// with its reduced Gram density operator, and overlap-driven k-NN.

#include <cstdint>
#include <random>

#include "qlle/circuit.hpp"
#include "qlle/datasets.hpp"
#include "qlle/errors.hpp"
#include "qlle/linalg.hpp"
#include "qlle/lle.hpp"

namespace qlle {

struct EncodedState {
    StateVector state;
    double norm;  // the classical norm |v|, needed to undo the encoding scale
};

/// Amplitude encoding: v / |v| padded with zeros to the next power of two.
inline EncodedState prepare_amplitude_state(const RealVector& v) {
    const double nrm = v.norm();
    require(nrm > 0.0, "prepare_amplitude_state: cannot encode the zero vector");
    const int dim = next_power_of_two(int(v.size()));
    EncodedState enc;
    enc.norm = nrm;
    enc.state.qubits = log2_exact(dim);
    enc.state.amplitudes = Vector::Zero(dim);
    for (Eigen::Index i = 0; i < v.size(); ++i) enc.state.amplitudes[i] = v[i] / nrm;
    return enc;
}

inline EncodedState prepare_amplitude_state(const Vector& v) {
    const double nrm = v.norm();
    require(nrm > 0.0, "prepare_amplitude_state: cannot encode the zero vector");
    const int dim = next_power_of_two(int(v.size()));
    EncodedState enc;
    enc.norm = nrm;
    enc.state.qubits = log2_exact(dim);
    enc.state.amplitudes = Vector::Zero(dim);
    enc.state.amplitudes.head(v.size()) = v / nrm;
    return enc;
}

/// Interference overlap test: prepares (|0>|x> + |1>|y>)/sqrt(2), applies
/// H to the ancilla and returns P(ancilla = 0) = 1/2 + 1/2 Re<x|y>.
/// shots = 0 computes the probability analytically; shots > 0 samples.
/// (The paper calls this circuit a swap test; the interference form is
/// what its equations describe, yielding Re<x|y> rather than |<x|y>|^2.)
inline double overlap_test(const StateVector& x, const StateVector& y, std::uint64_t shots = 0,
                           std::uint64_t seed = 0) {
    require(x.qubits == y.qubits, "overlap_test: unequal qubit counts");
    StateVector joint;
    joint.qubits = x.qubits + 1;
    const Eigen::Index dim = x.amplitudes.size();
    joint.amplitudes = Vector::Zero(2 * dim);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // ancilla is qubit 0: index = 2*i + ancilla
    for (Eigen::Index i = 0; i < dim; ++i) {
        joint.amplitudes[2 * i] = inv_sqrt2 * x.amplitudes[i];
        joint.amplitudes[2 * i + 1] = inv_sqrt2 * y.amplitudes[i];
    }
    Circuit c(joint.qubits);
    c.h(0);
    StateVector after = apply(c, joint);
    double p0 = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) p0 += std::norm(after.amplitudes[2 * i]);
    if (shots == 0) return p0;
    std::mt19937_64 rng(seed);
    std::uint64_t zeros = 0;
    for (std::uint64_t t = 0; t < shots; ++t) {
        double u = double(rng() >> 11) * 0x1.0p-53;
        if (u < p0) ++zeros;
    }
    return double(zeros) / double(shots);
}

/// Squared Euclidean distance from norms plus the overlap test:
/// |xi|^2 + |xj|^2 - (4 P(0) - 2) |xi| |xj|. Exact mode reproduces the
/// classical squared distance.
inline double inner_product_norms(const RealVector& xi, const RealVector& xj,
                                  std::uint64_t shots = 0, std::uint64_t seed = 0) {
    EncodedState a = prepare_amplitude_state(xi);
    EncodedState b = prepare_amplitude_state(xj);
    double p0 = overlap_test(a.state, b.state, shots, seed);
    return xi.squaredNorm() + xj.squaredNorm() - (4.0 * p0 - 2.0) * a.norm * b.norm;
}

struct QramNeighborState {
    StateVector state;  // |psi_dXi> over |j>|m> registers (each padded to 2^...)
    Matrix rho;         // tr_m of the projector: C~_i / tr C~_i, padded k dim
    int k_dim;          // padded neighbor-register dimension
    int m_dim;          // padded coordinate-register dimension
};

/// qRAM difference state |psi> = sum_{j,m} (x_{mi} - x_{mj}^{(i)}) |j>|m>
/// normalized, together with its |m>-traced density operator, which
/// equals the normalized local Gram matrix C~_i / tr C~_i.
inline QramNeighborState qram_neighbor_state(const DataMatrix& data, const NeighborGraph& graph,
                                             int i) {
    require(i >= 0 && i < data.count(), "qram_neighbor_state: index out of range");
    const int k = graph.k;
    const int dd = data.dim();
    const int kp = next_power_of_two(k);
    const int dp = next_power_of_two(dd);
    QramNeighborState out;
    out.k_dim = kp;
    out.m_dim = dp;
    Vector amps = Vector::Zero(Eigen::Index(kp) * dp);
    for (int j = 0; j < k; ++j) {
        RealVector diff = data.points.col(i) - data.points.col(graph.neighbors[i][j]);
        for (int m = 0; m < dd; ++m) amps[Eigen::Index(j) * dp + m] = diff[m];
    }
    const double nrm = amps.norm();
    require(nrm > 0.0, "qram_neighbor_state: all neighbor differences are zero");
    amps /= nrm;
    out.state.qubits = log2_exact(kp) + log2_exact(dp);
    out.state.amplitudes = amps;
    Matrix proj = amps * amps.adjoint();
    out.rho = partial_trace(proj, kp, dp, Subsystem::First);
    return out;
}

/// k-NN on overlap-estimated distances. In exact mode (shots = 0) the
/// distances equal the classical ones, so the graph matches knn() bit
/// for bit; sampled mode estimates each pairwise overlap from `shots`
/// draws. Selection and tie-breaking are classical either way.
inline NeighborGraph quantum_knn(const DataMatrix& data, int k, std::uint64_t shots = 0,
                                 std::uint64_t seed = 0) {
    const int n = data.count();
    require(k >= 1 && k < n, "quantum_knn: need 1 <= k < N");
    RealMatrix dist2 = RealMatrix::Zero(n, n);
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d2 = inner_product_norms(data.points.col(i), data.points.col(j), shots,
                                            seed + ++ctr);
            dist2(i, j) = dist2(j, i) = std::max(d2, 0.0);
        }
    NeighborGraph g;
    g.k = k;
    g.neighbors.resize(n);
    g.distances.resize(n);
    std::vector<std::pair<double, int>> order(n - 1);
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            order[m++] = {std::sqrt(dist2(i, j)), j};
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

}  // namespace qlle
