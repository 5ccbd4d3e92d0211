#pragma once

#include <stdexcept>
#include <string>

namespace equidist {

/// Raised when an argument violates a documented precondition.
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a computation cannot deliver a trustworthy result
/// (quadrature non-convergence, overflow, a violated post-condition).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw precondition_error(msg);
}

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw numerical_error(msg);
}

} // namespace detail
} // namespace equidist
