#pragma once

#include <stdexcept>
#include <string>

namespace qlle {

/// Thrown when a caller violates an operation's preconditions.
struct contract_error : std::invalid_argument {
    explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown on malformed input files (CSV, TOML).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a solve cannot produce a meaningful result
/// (e.g. the right-hand side lies in the numerical kernel).
struct solve_error : std::runtime_error {
    explicit solve_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw contract_error(msg);
}

}  // namespace qlle
