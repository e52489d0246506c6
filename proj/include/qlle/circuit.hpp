#pragma once

// Statevector simulator and the elementary circuits: QFT, the
// phase-arithmetic subtractor, and gate-level state evolution.
//
// Conventions: qubit 0 is the least significant bit of the basis index;
// QFT(q) maps |a> to (1/sqrt(2^q)) sum_y exp(2 pi i a y / 2^q) |y>.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qlle/errors.hpp"
#include "qlle/linalg.hpp"

namespace qlle {

struct StateVector {
    int qubits = 0;
    Vector amplitudes;

    static StateVector basis(int qubits, std::uint64_t index) {
        StateVector s;
        s.qubits = qubits;
        s.amplitudes = Vector::Zero(Eigen::Index(1) << qubits);
        s.amplitudes[Eigen::Index(index)] = 1.0;
        return s;
    }

    double norm() const { return amplitudes.norm(); }
};

enum class GateKind { H, X, Phase, CPhase, Ry, CRy, Swap, Unitary, CUnitary };

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Phase: return "PHASE";
        case GateKind::CPhase: return "CPHASE";
        case GateKind::Ry: return "RY";
        case GateKind::CRy: return "CRY";
        case GateKind::Swap: return "SWAP";
        case GateKind::Unitary: return "U";
        case GateKind::CUnitary: return "CU";
    }
    return "?";
}

struct Gate {
    GateKind kind;
    std::vector<int> targets;
    std::vector<int> controls;
    double angle = 0.0;
    Matrix matrix;  // for Unitary/CUnitary: dim 2^targets.size()
};

struct Circuit {
    int qubits = 0;
    std::vector<Gate> gates;

    Circuit() = default;
    explicit Circuit(int q) : qubits(q) {}

    void add(Gate g) { gates.push_back(std::move(g)); }

    void h(int t) { add({GateKind::H, {t}, {}, 0.0, {}}); }
    void x(int t) { add({GateKind::X, {t}, {}, 0.0, {}}); }
    void phase(int t, double theta) { add({GateKind::Phase, {t}, {}, theta, {}}); }
    void cphase(int c, int t, double theta) { add({GateKind::CPhase, {t}, {c}, theta, {}}); }
    void ry(int t, double theta) { add({GateKind::Ry, {t}, {}, theta, {}}); }
    void cry(int c, int t, double theta) { add({GateKind::CRy, {t}, {c}, theta, {}}); }
    void swap(int a, int b) { add({GateKind::Swap, {a, b}, {}, 0.0, {}}); }
    void cz(int c, int t) { cphase(c, t, M_PI); }
    void unitary(std::vector<int> ts, const Matrix& u) {
        add({GateKind::Unitary, std::move(ts), {}, 0.0, u});
    }
    void cunitary(int c, std::vector<int> ts, const Matrix& u) {
        add({GateKind::CUnitary, std::move(ts), {c}, 0.0, u});
    }

    void append(const Circuit& other) {
        require(other.qubits <= qubits, "Circuit::append: qubit count exceeds circuit width");
        for (const auto& g : other.gates) gates.push_back(g);
    }

    Circuit inverse() const;
};

namespace detail {

inline void check_gate(const Gate& g, int qubits) {
    std::vector<int> seen;
    for (int q : g.targets) {
        require(q >= 0 && q < qubits, "gate index out of range");
        for (int s : seen) require(s != q, "gate indices must be distinct");
        seen.push_back(q);
    }
    for (int q : g.controls) {
        require(q >= 0 && q < qubits, "gate control out of range");
        for (int s : seen) require(s != q, "gate indices must be distinct");
        seen.push_back(q);
    }
}

inline void apply_single(Vector& amps, int t, const Complex u00, const Complex u01,
                         const Complex u10, const Complex u11,
                         const std::vector<int>& controls) {
    const Eigen::Index dim = amps.size();
    const Eigen::Index bit = Eigen::Index(1) << t;
    Eigen::Index cmask = 0;
    for (int c : controls) cmask |= Eigen::Index(1) << c;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & bit) continue;
        if ((i & cmask) != cmask) continue;
        const Eigen::Index j = i | bit;
        const Complex a = amps[i], b = amps[j];
        amps[i] = u00 * a + u01 * b;
        amps[j] = u10 * a + u11 * b;
    }
}

inline void apply_unitary(Vector& amps, const std::vector<int>& targets, const Matrix& u,
                          const std::vector<int>& controls) {
    const Eigen::Index dim = amps.size();
    const int nt = int(targets.size());
    const Eigen::Index block = Eigen::Index(1) << nt;
    require(u.rows() == block && u.cols() == block, "unitary gate dimension mismatch");
    Eigen::Index tmask = 0, cmask = 0;
    for (int t : targets) tmask |= Eigen::Index(1) << t;
    for (int c : controls) cmask |= Eigen::Index(1) << c;
    Vector sub(block);
    for (Eigen::Index base = 0; base < dim; ++base) {
        if (base & tmask) continue;
        if ((base & cmask) != cmask) continue;
        for (Eigen::Index r = 0; r < block; ++r) {
            Eigen::Index idx = base;
            for (int b = 0; b < nt; ++b)
                if (r & (Eigen::Index(1) << b)) idx |= Eigen::Index(1) << targets[b];
            sub[r] = amps[idx];
        }
        Vector res = u * sub;
        for (Eigen::Index r = 0; r < block; ++r) {
            Eigen::Index idx = base;
            for (int b = 0; b < nt; ++b)
                if (r & (Eigen::Index(1) << b)) idx |= Eigen::Index(1) << targets[b];
            amps[idx] = res[r];
        }
    }
}

}  // namespace detail

/// Unitary action of a circuit on a state; returns a new state.
inline StateVector apply(const Circuit& c, const StateVector& s) {
    require(c.qubits == s.qubits, "apply: qubit counts differ");
    StateVector out = s;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& g : c.gates) {
        detail::check_gate(g, c.qubits);
        switch (g.kind) {
            case GateKind::H:
                detail::apply_single(out.amplitudes, g.targets[0], inv_sqrt2, inv_sqrt2,
                                     inv_sqrt2, -inv_sqrt2, g.controls);
                break;
            case GateKind::X:
                detail::apply_single(out.amplitudes, g.targets[0], 0, 1, 1, 0, g.controls);
                break;
            case GateKind::Phase:
            case GateKind::CPhase:
                detail::apply_single(out.amplitudes, g.targets[0], 1, 0, 0,
                                     std::exp(Complex(0, g.angle)), g.controls);
                break;
            case GateKind::Ry:
            case GateKind::CRy: {
                const double c2 = std::cos(g.angle / 2), s2 = std::sin(g.angle / 2);
                detail::apply_single(out.amplitudes, g.targets[0], c2, -s2, s2, c2, g.controls);
                break;
            }
            case GateKind::Swap: {
                const Eigen::Index b0 = Eigen::Index(1) << g.targets[0];
                const Eigen::Index b1 = Eigen::Index(1) << g.targets[1];
                for (Eigen::Index i = 0; i < out.amplitudes.size(); ++i)
                    if ((i & b0) && !(i & b1)) std::swap(out.amplitudes[i], out.amplitudes[(i ^ b0) | b1]);
                break;
            }
            case GateKind::Unitary:
            case GateKind::CUnitary:
                detail::apply_unitary(out.amplitudes, g.targets, g.matrix, g.controls);
                break;
        }
    }
    return out;
}

inline Circuit Circuit::inverse() const {
    Circuit inv(qubits);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        Gate g = *it;
        switch (g.kind) {
            case GateKind::Phase:
            case GateKind::CPhase:
            case GateKind::Ry:
            case GateKind::CRy:
                g.angle = -g.angle;
                break;
            case GateKind::Unitary:
            case GateKind::CUnitary:
                g.matrix = g.matrix.adjoint().eval();
                break;
            default:
                break;  // H, X, Swap are involutions
        }
        inv.add(std::move(g));
    }
    return inv;
}

/// QFT on q qubits: |a> -> (1/sqrt(2^q)) sum_y exp(2 pi i a y / 2^q) |y>.
inline Circuit qft(int q) {
    require(q >= 1, "qft: need q >= 1");
    Circuit c(q);
    for (int t = q - 1; t >= 0; --t) {
        c.h(t);
        for (int k = t - 1; k >= 0; --k)
            c.cphase(k, t, M_PI / double(Eigen::Index(1) << (t - k)));
    }
    for (int a = 0, b = q - 1; a < b; ++a, --b) c.swap(a, b);
    return c;
}

inline Circuit iqft(int q) { return qft(q).inverse(); }

namespace detail {

// Adds the classical constant c (mod 2^q) to a register that is already
// in the Fourier basis. Qubit p of the register carries phase
// exp(2 pi i value * 2^p / 2^q).
inline void fourier_add_const(Circuit& c, const std::vector<int>& reg, std::uint64_t value) {
    const int q = int(reg.size());
    for (int p = 0; p < q; ++p) {
        double theta = 2.0 * M_PI * double((value << p) & ((std::uint64_t(1) << q) - 1)) /
                       double(std::uint64_t(1) << q);
        if (theta != 0.0) c.phase(reg[p], theta);
    }
}

}  // namespace detail

/// Two's-complement subtractor over 2q qubits. Register A is qubits
/// [0, q), register B is qubits [q, 2q); |a>|b> -> |a>|a - b mod 2^q>.
/// Built as B <- NOT(B), Fourier add of A plus one, inverse QFT,
/// using a - b = ~b + a + 1 (mod 2^q).
inline Circuit subtractor(int q) {
    require(q >= 1, "subtractor: need q >= 1");
    Circuit c(2 * q);
    std::vector<int> reg_b(q);
    for (int p = 0; p < q; ++p) reg_b[p] = q + p;

    for (int p : reg_b) c.x(p);

    // QFT on B, expressed on the shifted qubit indices.
    Circuit f = qft(q);
    for (auto g : f.gates) {
        for (auto& t : g.targets) t += q;
        for (auto& ctl : g.controls) ctl += q;
        c.add(std::move(g));
    }

    // Controlled Fourier-basis addition of a: bit j of A contributes
    // phase 2 pi 2^(j+p) / 2^q on qubit p of B.
    for (int j = 0; j < q; ++j)
        for (int p = 0; p < q; ++p) {
            int e = j + p;
            if (e >= q) continue;  // full wrap, phase multiple of 2 pi
            c.cphase(j, q + p, 2.0 * M_PI / double(Eigen::Index(1) << (q - e)));
        }
    detail::fourier_add_const(c, reg_b, 1);

    Circuit fi = iqft(q);
    for (auto g : fi.gates) {
        for (auto& t : g.targets) t += q;
        for (auto& ctl : g.controls) ctl += q;
        c.add(std::move(g));
    }
    return c;
}

struct MeasurementRecord {
    std::map<std::string, double> probabilities;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t shots = 0;
};

inline std::string bitstring(std::uint64_t index, int qubits) {
    std::string s(qubits, '0');
    for (int b = 0; b < qubits; ++b)
        if (index & (std::uint64_t(1) << b)) s[qubits - 1 - b] = '1';
    return s;
}

/// Exact outcome probabilities, optionally with sampled counts.
inline MeasurementRecord measure(const StateVector& s, std::uint64_t shots = 0,
                                 std::uint64_t seed = 0) {
    MeasurementRecord rec;
    const Eigen::Index dim = s.amplitudes.size();
    for (Eigen::Index i = 0; i < dim; ++i) {
        double p = std::norm(s.amplitudes[i]);
        if (p > 0.0) rec.probabilities[bitstring(std::uint64_t(i), s.qubits)] = p;
    }
    if (shots > 0) {
        rec.shots = shots;
        std::mt19937_64 rng(seed);
        std::vector<double> cdf(dim);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            acc += std::norm(s.amplitudes[i]);
            cdf[i] = acc;
        }
        for (std::uint64_t t = 0; t < shots; ++t) {
            double u = double(rng() >> 11) * 0x1.0p-53 * acc;
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            Eigen::Index idx = it - cdf.begin();
            if (idx >= dim) idx = dim - 1;
            ++rec.counts[bitstring(std::uint64_t(idx), s.qubits)];
        }
    }
    return rec;
}

/// One gate per line: NAME targets.. [c controls..] [@ angle]
inline std::string serialize(const Circuit& c) {
    std::ostringstream out;
    out << "qubits " << c.qubits << '\n';
    for (const auto& g : c.gates) {
        out << gate_name(g.kind);
        for (int t : g.targets) out << ' ' << t;
        if (!g.controls.empty()) {
            out << " c";
            for (int ctl : g.controls) out << ' ' << ctl;
        }
        if (g.kind == GateKind::Phase || g.kind == GateKind::CPhase ||
            g.kind == GateKind::Ry || g.kind == GateKind::CRy) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", g.angle);
            out << " @ " << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace qlle
