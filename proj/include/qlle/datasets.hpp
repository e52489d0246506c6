#pragma once

// Benchmark manifold generators (S-curve, Swiss roll) and CSV I/O.
// Points are stored column-major as a D x N matrix, one point per column.

#include <cstdint>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlle/errors.hpp"
#include "qlle/linalg.hpp"

namespace qlle {

struct DataMatrix {
    RealMatrix points;  // D x N

    int dim() const { return int(points.rows()); }
    int count() const { return int(points.cols()); }
};

namespace detail {

// Uniform doubles in [0,1) from the top 53 bits; avoids the
// implementation-defined behavior of std::uniform_real_distribution.
inline double next_uniform(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// S-curve: (sin t, h, sign(t)(cos t - 1)) with t ~ U[-3pi/2, 3pi/2],
/// h ~ U[0, 2]. Deterministic for fixed (n, seed). Optionally reports
/// the manifold parameter t per point (used for plot coloring).
inline DataMatrix gen_s_curve(int n, std::uint64_t seed, RealVector* param = nullptr) {
    require(n >= 1, "gen_s_curve: n must be >= 1");
    std::mt19937_64 rng(seed);
    DataMatrix data;
    data.points.resize(3, n);
    if (param) param->resize(n);
    const double pi = M_PI;
    for (int i = 0; i < n; ++i) {
        double t = (detail::next_uniform(rng) - 0.5) * 3.0 * pi;
        double h = detail::next_uniform(rng) * 2.0;
        data.points(0, i) = std::sin(t);
        data.points(1, i) = h;
        data.points(2, i) = (t >= 0.0 ? 1.0 : -1.0) * (std::cos(t) - 1.0);
        if (param) (*param)[i] = t;
    }
    return data;
}

/// Swiss roll: (t cos t, h, t sin t) with t ~ U[1.5pi, 4.5pi], h ~ U[0, 21].
inline DataMatrix gen_swiss_roll(int n, std::uint64_t seed, RealVector* param = nullptr) {
    require(n >= 1, "gen_swiss_roll: n must be >= 1");
    std::mt19937_64 rng(seed);
    DataMatrix data;
    data.points.resize(3, n);
    if (param) param->resize(n);
    const double pi = M_PI;
    for (int i = 0; i < n; ++i) {
        double t = 1.5 * pi + detail::next_uniform(rng) * 3.0 * pi;
        double h = detail::next_uniform(rng) * 21.0;
        data.points(0, i) = t * std::cos(t);
        data.points(1, i) = h;
        data.points(2, i) = t * std::sin(t);
        if (param) (*param)[i] = t;
    }
    return data;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// CSV layout: one row per point, one column per coordinate.
inline void save_csv(const DataMatrix& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("save_csv: cannot open " + path);
    for (int i = 0; i < data.count(); ++i) {
        for (int m = 0; m < data.dim(); ++m) {
            if (m) out << ',';
            out << detail::format_double(data.points(m, i));
        }
        out << '\n';
    }
}

inline DataMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("load_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace((unsigned char)cell[pos])) ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                // A header row is tolerated on the first line only.
                if (line_no == 1) { row.clear(); break; }
                throw parse_error("load_csv: non-numeric cell at row " +
                                  std::to_string(line_no) + ", column " + std::to_string(col));
            }
        }
        if (row.empty()) continue;
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw parse_error("load_csv: ragged row " + std::to_string(line_no) + " (expected " +
                              std::to_string(width) + " cells, got " + std::to_string(row.size()) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("load_csv: no data rows in " + path);
    DataMatrix data;
    data.points.resize(Eigen::Index(width), Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t m = 0; m < width; ++m)
            data.points(Eigen::Index(m), Eigen::Index(i)) = rows[i][m];
    require(data.points.allFinite(), "load_csv: NaN/Inf entries in " + path);
    return data;
}

}  // namespace qlle
