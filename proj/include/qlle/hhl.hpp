#pragma once

// Simulated HHL linear-systems engine: phase estimation over e^{i m t0},
// an eigenvalue-conditioned ancilla rotation, uncomputation, and analytic
// postselection on (ancilla = 1, clock = 0).
//
// The simulation works in the eigenbasis of m. Phase estimation with a
// t-bit clock maps an eigencomponent with phase p = lambda t0 / 2pi to
// the clock distribution |alpha_{y}|^2 = sin^2(pi T d) / (T sin(pi d))^2
// with d = p - y/T, T = 2^t (the exact discrete kernel, not a model).
// After the conditioned rotation and the inverse phase estimation, the
// surviving amplitude of eigencomponent j on (ancilla 1, clock 0) is
//
//   g_j = gamma * sum_y |alpha_{y|j}|^2 f(lambda~_y),
//
// so the postselected state is proportional to sum_j beta_j g_j |u_j>
// and the success probability is sum_j |beta_j g_j|^2. For eigenvalues
// exactly representable in t bits this reduces to gamma f(lambda) |u_j>
// with no quantization error.
//
// Used in two modes: f(lambda) = 1/lambda solves the local Gram systems
// for the reconstruction weights; f(lambda) = lambda applies I - W (via
// its Hermitian dilation) to build the target density operator rho_M.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qlle/encoding.hpp"
#include "qlle/errors.hpp"
#include "qlle/linalg.hpp"
#include "qlle/lle.hpp"

namespace qlle {

enum class EigenvalueFunction { Inverse, Identity };

struct HhlConfig {
    int clock_qubits = 8;            // t
    double evolution_time = 0.0;     // t0; 0 = auto from a Gershgorin bound
    double rotation_constant = 0.0;  // gamma; 0 = 1 / max representable f
    EigenvalueFunction eigenvalue_function = EigenvalueFunction::Inverse;
    bool signed_clock = false;       // decode clock as two's complement
};

struct PostselectedState {
    StateVector state;           // normalized postselected branch
    double success_probability;  // analytic P(ancilla = 1, clock = 0)
};

namespace detail {

/// |alpha_{y|j}|^2: probability that a t-bit clock reads y for an
/// eigencomponent of phase p (both in units of the full clock range T).
inline double clock_kernel(double p, std::uint64_t y, std::uint64_t big_t) {
    double d = p - double(y) / double(big_t);
    d -= std::round(d);  // phase distance on the circle
    double denom = std::sin(M_PI * d) * double(big_t);
    if (std::abs(denom) < 1e-300) return 1.0;
    double num = std::sin(M_PI * double(big_t) * d);
    double a = num / denom;
    return a * a;
}

/// Largest-magnitude eigenvalue bound by Gershgorin discs.
inline double gershgorin_bound(const Matrix& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double r = m.row(i).cwiseAbs().sum();
        best = std::max(best, r);
    }
    return best;
}

struct HhlPlan {
    EigenDecomposition eig;
    double t0 = 0.0;
    double gamma = 0.0;
    std::vector<double> g;  // per-eigencomponent postselected gain g_j
};

/// Shared setup: eigendecomposition, t0 / gamma resolution, and the g_j
/// gains. Signed mode maps max|lambda| to 0.375 of the clock range so
/// negative eigenvalues occupy the upper half; unsigned mode maps it to
/// 0.75.
inline HhlPlan hhl_plan(const Matrix& m, const HhlConfig& cfg) {
    require(cfg.clock_qubits >= 1, "hhl: need at least one clock qubit");
    require(cfg.clock_qubits <= 24, "hhl: clock width beyond simulable range");
    HhlPlan plan;
    plan.eig = eig_hermitian(m);
    const int n = int(m.rows());
    const std::uint64_t big_t = std::uint64_t(1) << cfg.clock_qubits;

    plan.t0 = cfg.evolution_time;
    if (plan.t0 <= 0.0) {
        double bound = std::max(gershgorin_bound(m), 1e-300);
        double top = cfg.signed_clock ? 0.375 : 0.75;
        plan.t0 = 2.0 * M_PI * top / bound;
    }
    for (int j = 0; j < n; ++j) {
        double p = plan.eig.eigenvalues[j] * plan.t0 / (2.0 * M_PI);
        bool ok = cfg.signed_clock ? (p >= -0.5 && p < 0.5) : (p >= 0.0 && p < 1.0);
        require(ok, "hhl: eigenvalue " + std::to_string(plan.eig.eigenvalues[j]) +
                        " scales outside the representable clock range");
    }

    // f over the representable clock values; lambda~ = 0 contributes 0.
    auto decode = [&](std::uint64_t y) {
        double ys = double(y);
        if (cfg.signed_clock && y >= big_t / 2) ys -= double(big_t);
        return ys / double(big_t) * 2.0 * M_PI / plan.t0;
    };
    auto f_of = [&](double lam) {
        if (cfg.eigenvalue_function == EigenvalueFunction::Identity) return lam;
        return lam == 0.0 ? 0.0 : 1.0 / lam;
    };
    double fmax = 0.0;
    for (std::uint64_t y = 0; y < big_t; ++y) {
        double lam = decode(y);
        if (lam != 0.0) fmax = std::max(fmax, std::abs(f_of(lam)));
    }
    require(fmax > 0.0, "hhl: no representable eigenvalue has nonzero f");
    plan.gamma = cfg.rotation_constant > 0.0 ? cfg.rotation_constant : 1.0 / fmax;
    // gamma * f must be a valid rotation amplitude at every *estimated*
    // eigenvalue, i.e. at each true eigenvalue's nearest clock reading.
    for (int j = 0; j < n; ++j) {
        double p = plan.eig.eigenvalues[j] * plan.t0 / (2.0 * M_PI);
        double yr = std::round(p * double(big_t));
        std::uint64_t y = std::uint64_t(std::llround(yr)) % big_t;
        require(plan.gamma * std::abs(f_of(decode(y))) <= 1.0 + 1e-12,
                "hhl: rotation constant makes gamma*f(lambda) exceed 1");
    }

    plan.g.resize(n);
    for (int j = 0; j < n; ++j) {
        double p = plan.eig.eigenvalues[j] * plan.t0 / (2.0 * M_PI);
        double acc = 0.0;
        for (std::uint64_t y = 0; y < big_t; ++y) {
            double w = clock_kernel(p, y, big_t);
            if (w < 1e-18) continue;
            // clamp: tail clock readings can land where gamma*f > 1, and
            // a rotation amplitude saturates at 1
            double amp = std::clamp(plan.gamma * f_of(decode(y)), -1.0, 1.0);
            acc += w * amp;
        }
        plan.g[j] = acc;
    }
    return plan;
}

}  // namespace detail

/// Joint clock (x) system state after phase estimation: each
/// eigencomponent |u_j> of the input becomes sum_y alpha_{y|j} |y>|u_j>.
/// Index layout: clock is the leading register (index y * dim + s).
inline StateVector phase_estimation(const Matrix& m, const StateVector& input,
                                    const HhlConfig& cfg) {
    require(m.rows() == input.amplitudes.size(), "phase_estimation: dimension mismatch");
    detail::HhlPlan plan = detail::hhl_plan(m, cfg);
    const int n = int(m.rows());
    const std::uint64_t big_t = std::uint64_t(1) << cfg.clock_qubits;
    Vector beta = plan.eig.eigenvectors.adjoint() * input.amplitudes;

    StateVector out;
    out.qubits = cfg.clock_qubits + log2_exact(int(input.amplitudes.size()));
    out.amplitudes = Vector::Zero(Eigen::Index(big_t) * n);
    for (int j = 0; j < n; ++j) {
        if (std::abs(beta[j]) < 1e-300) continue;
        double p = plan.eig.eigenvalues[j] * plan.t0 / (2.0 * M_PI);
        for (std::uint64_t y = 0; y < big_t; ++y) {
            // exact kernel (1/T) sum_z e^{2pi i z d}, phase included
            double d = p - double(y) / double(big_t);
            d -= std::round(d);
            Complex alpha;
            double denom = std::sin(M_PI * d) * double(big_t);
            if (std::abs(denom) < 1e-300) {
                alpha = 1.0;
            } else {
                // geometric sum (1/T) sum_z e^{2pi i z d}
                Complex num = 1.0 - std::exp(Complex(0.0, 2.0 * M_PI * double(big_t) * d));
                Complex den = 1.0 - std::exp(Complex(0.0, 2.0 * M_PI * d));
                alpha = num / (den * double(big_t));
            }
            for (int s = 0; s < n; ++s)
                out.amplitudes[Eigen::Index(y) * n + s] +=
                    beta[j] * alpha * plan.eig.eigenvectors(s, j);
        }
    }
    return out;
}

/// Full HHL pass: returns the normalized postselected state and the
/// analytic success probability. f is taken from the config; the
/// default Inverse mode produces a state proportional to m^{-1} b.
inline PostselectedState hhl_solve(const Matrix& m, const StateVector& b, const HhlConfig& cfg) {
    require(m.rows() == b.amplitudes.size(), "hhl_solve: dimension mismatch");
    detail::HhlPlan plan = detail::hhl_plan(m, cfg);
    const int n = int(m.rows());
    Vector beta = plan.eig.eigenvectors.adjoint() * b.amplitudes;

    // Reject right-hand sides living in the numerical kernel: no
    // eigencomponent with usable weight survives the solve.
    if (cfg.eigenvalue_function == EigenvalueFunction::Inverse) {
        double lam_max = std::max(std::abs(plan.eig.eigenvalues[0]),
                                  std::abs(plan.eig.eigenvalues[n - 1]));
        double supported = 0.0;
        for (int j = 0; j < n; ++j)
            if (std::abs(plan.eig.eigenvalues[j]) > 1e-14 * lam_max)
                supported += std::norm(beta[j]);
        if (supported < 1e-24)
            throw solve_error("hhl_solve: right-hand side lies in the kernel of the system");
    }

    Vector coeff(n);
    for (int j = 0; j < n; ++j) coeff[j] = beta[j] * plan.g[j];
    double p_success = coeff.squaredNorm();
    if (p_success < 1e-300)
        throw solve_error("hhl_solve: postselection amplitude vanished");

    PostselectedState out;
    out.success_probability = p_success;
    out.state.qubits = log2_exact(n);
    out.state.amplitudes = plan.eig.eigenvectors * (coeff / std::sqrt(p_success));
    return out;
}

struct HhlColumnDiag {
    int clock_qubits = 0;
    double success_probability = 0.0;
    double fidelity = -1.0;  // vs the classical weight oracle; -1 if not computed
};

/// Quantum weight solve for one point: HHL on the ridged k x k local Gram
/// system with b = |1_k>, classical rescale so the column sums to one,
/// scattered into a length-N column. The ridge matches local_weights so
/// both pipelines solve the identical system.
inline RealVector solve_weight_column(const DataMatrix& data, const NeighborGraph& graph, int i,
                                      const HhlConfig& cfg, HhlColumnDiag* diag = nullptr,
                                      double ridge_eps = kDefaultWeightRidge) {
    const int n = data.count();
    require(i >= 0 && i < n, "solve_weight_column: index out of range");
    const int k = graph.k;
    RealVector col = RealVector::Zero(n);
    if (k == 1) {
        col[graph.neighbors[i][0]] = 1.0;
        if (diag) *diag = {cfg.clock_qubits, 1.0, 1.0};
        return col;
    }
    RealMatrix c = local_gram(data, graph, i);
    const double ridge = ridge_eps * std::max(c.trace(), 1e-300);
    if (ridge_eps > 0.0) c.diagonal().array() += ridge;

    const int kp = next_power_of_two(k);
    // padding keeps the block invertible without stretching the spectrum
    Matrix cpad = Matrix::Identity(kp, kp) * (c.trace() / double(k));
    cpad.topLeftCorner(k, k) = c.cast<Complex>();
    StateVector b;
    b.qubits = log2_exact(kp);
    b.amplitudes = Vector::Zero(kp);
    for (int j = 0; j < k; ++j) b.amplitudes[j] = 1.0 / std::sqrt(double(k));

    HhlConfig solve_cfg = cfg;
    solve_cfg.eigenvalue_function = EigenvalueFunction::Inverse;
    if (solve_cfg.evolution_time <= 0.0 && ridge_eps > 0.0) {
        // Tick-aligned evolution time: for k > D the smallest eigenvalue of
        // the ridged Gram matrix equals the ridge, a classically known
        // quantity, so t0 can place it exactly on a clock tick. That
        // removes the quantization error of the dominant (smallest-
        // eigenvalue) component of the solution; the well-resolved large
        // eigenvalues carry the remaining error.
        const double big_t = double(std::uint64_t(1) << solve_cfg.clock_qubits);
        const double bound = detail::gershgorin_bound(cpad);
        double m_ticks = std::floor(0.75 * big_t * ridge / bound);
        if (m_ticks >= 1.0)  // otherwise the aligned grid cannot hold lambda_max
            solve_cfg.evolution_time = 2.0 * M_PI * m_ticks / (big_t * ridge);
    }
    PostselectedState post = hhl_solve(cpad, b, solve_cfg);

    RealVector w = post.state.amplitudes.head(k).real();
    double s = w.sum();
    if (std::abs(s) < 1e-12) {
        w.setConstant(1.0 / double(k));  // rescale impossible; uniform fallback
    } else {
        w /= s;
    }
    for (int j = 0; j < k; ++j) col[graph.neighbors[i][j]] = w[j];

    if (diag) {
        diag->clock_qubits = solve_cfg.clock_qubits;
        diag->success_probability = post.success_probability;
        Vector exact = solve_linear(cpad, Vector(b.amplitudes));
        exact.normalize();
        diag->fidelity = std::abs(exact.dot(post.state.amplitudes));
    }
    return col;
}

/// Quantum weight matrix: solve_weight_column for every point.
inline RealMatrix quantum_weights(const DataMatrix& data, const NeighborGraph& graph,
                                  const HhlConfig& cfg,
                                  std::vector<HhlColumnDiag>* diags = nullptr,
                                  double ridge_eps = kDefaultWeightRidge) {
    const int n = data.count();
    RealMatrix w(n, n);
    if (diags) diags->resize(n);
    for (int i = 0; i < n; ++i)
        w.col(i) = solve_weight_column(data, graph, i, cfg, diags ? &(*diags)[i] : nullptr,
                                       ridge_eps);
    return w;
}

/// qRAM-path target density operator: the normalized projector of
/// |psi> = sum_{i,m} (delta_mi - W_mi) |i>|m>, traced over |i>, equals
/// M / tr M exactly.
inline Matrix build_rho_m_qram(const RealMatrix& w) {
    require(w.rows() == w.cols(), "build_rho_m_qram: W must be square");
    const int n = int(w.rows());
    RealMatrix a = RealMatrix::Identity(n, n) - w;
    double tr = a.squaredNorm();  // Frobenius norm^2 = tr M
    require(tr > 1e-300, "build_rho_m_qram: W = I gives the trace-zero operator");
    const int np = next_power_of_two(n);
    Vector psi = Vector::Zero(Eigen::Index(np) * np);
    // register layout |i>|m>: index i * np + m
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) psi[Eigen::Index(i) * np + m] = a(m, i);
    psi /= psi.norm();
    // keep |m>, trace out |i>; padding rows carry no mass
    return partial_trace(psi * psi.adjoint(), np, np, Subsystem::Second).topLeftCorner(n, n);
}

/// HHL-path target density operator: the engine applies f(lambda) =
/// lambda in the eigenbasis of the Hermitian dilation [[0, A], [A^T, 0]]
/// of A = I - W, so the postselected channel sends the maximally mixed
/// rho_0 to A rho_0 A^T / norm = M / tr M up to clock-quantization error.
inline Matrix build_rho_m_hhl(const RealMatrix& w, const HhlConfig& cfg) {
    require(w.rows() == w.cols(), "build_rho_m_hhl: W must be square");
    const int n = int(w.rows());
    RealMatrix a = RealMatrix::Identity(n, n) - w;
    require(a.squaredNorm() > 1e-300, "build_rho_m_hhl: W = I gives the trace-zero operator");

    Matrix h = Matrix::Zero(2 * n, 2 * n);
    h.topRightCorner(n, n) = a.cast<Complex>();
    h.bottomLeftCorner(n, n) = a.transpose().cast<Complex>();

    HhlConfig dcfg = cfg;
    dcfg.eigenvalue_function = EigenvalueFunction::Identity;
    dcfg.signed_clock = true;  // the dilation spectrum is symmetric +-sigma
    detail::HhlPlan plan = detail::hhl_plan(h, dcfg);

    // Postselected linear map K = sum_j g_j |v_j><v_j| applied to the
    // mixed input (columns of rho_0 embedded in the second block).
    Matrix gdiag = Matrix::Zero(2 * n, 2 * n);
    for (int j = 0; j < 2 * n; ++j) gdiag(j, j) = plan.g[j];
    Matrix k_map = plan.eig.eigenvectors * gdiag * plan.eig.eigenvectors.adjoint();
    Matrix rho0 = Matrix::Zero(2 * n, 2 * n);
    rho0.bottomRightCorner(n, n) = Matrix::Identity(n, n) / double(n);
    Matrix out_full = k_map * rho0 * k_map.adjoint();
    Matrix top = out_full.topLeftCorner(n, n);
    double tr = top.trace().real();
    require(tr > 1e-300, "build_rho_m_hhl: postselection annihilated the state");
    top /= tr;
    top = Matrix(0.5 * (top + top.adjoint()));
    return top;
}

/// |e_i - w_i| recovered from the interference test on two unit vectors:
/// 2 sqrt(1 - P2(0)) with P2(0) = 1/2 + 1/2 Re<e_i|w_i>.
inline double norm_from_overlap(const RealVector& ei, const RealVector& wi,
                                std::uint64_t shots = 0, std::uint64_t seed = 0) {
    require(std::abs(ei.norm() - 1.0) < 1e-9, "norm_from_overlap: e_i must be unit norm");
    require(std::abs(wi.norm() - 1.0) < 1e-9, "norm_from_overlap: w_i must be unit norm");
    EncodedState a = prepare_amplitude_state(ei);
    EncodedState b = prepare_amplitude_state(wi);
    double p = overlap_test(a.state, b.state, shots, seed);
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - p));
}

}  // namespace qlle
