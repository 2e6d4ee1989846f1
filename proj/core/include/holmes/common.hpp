#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holmes {

/// Points are stored in 3D; components beyond the problem dimension are zero.
using Point = Eigen::Vector3d;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed files, bad configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Fewer neighbors than constraints (or too few nodes for a domain).
class InfeasibleSupport : public Error {
public:
    using Error::Error;
};

/// Newton iteration on the dual did not reach tolerance.
class DualDivergence : public Error {
public:
    DualDivergence(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Singular factorization or Krylov stagnation.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

#define HOLMES_REQUIRE(cond, ExcType, msg) \
    do {                                   \
        if (!(cond)) throw ExcType(msg);   \
    } while (0)

/// Binomial coefficient C(n, k) for small arguments.
constexpr std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace holmes
