#pragma once

#include "holmes/common.hpp"
#include "holmes/maxent.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace holmes {

/// Polynomial in up to three variables as a list of monomial terms.
class Polynomial {
public:
    struct Term {
        MultiIndex alpha;
        double coefficient;
    };

    Polynomial() = default;
    Polynomial(int dim, std::vector<Term> terms);

    /// Random coefficients in [-1, 1] for every monomial of degree <= degree.
    static Polynomial random(int dim, int degree, std::uint64_t seed);

    int dim() const noexcept { return dim_; }
    int degree() const;
    const std::vector<Term>& terms() const noexcept { return terms_; }

    double value(const Point& x) const;
    Eigen::VectorXd gradient(const Point& x) const;
    /// dim x dim.
    Eigen::MatrixXd hessian(const Point& x) const;
    /// Partial derivative d^beta.
    double derivative(const Point& x, const MultiIndex& beta) const;
    /// Largest absolute coefficient.
    double max_coefficient() const;

private:
    int dim_ = 1;
    std::vector<Term> terms_;
};

}  // namespace holmes
