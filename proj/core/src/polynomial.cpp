#include "holmes/polynomial.hpp"

#include "holmes/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace holmes {

Polynomial::Polynomial(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {
    HOLMES_REQUIRE(dim >= 1 && dim <= 3, InvalidArgument, "Polynomial: dimension must be 1, 2 or 3");
    for (const auto& t : terms_)
        for (int i = dim; i < 3; ++i)
            HOLMES_REQUIRE(t.alpha[i] == 0, InvalidArgument, "Polynomial: exponent beyond the dimension");
}

Polynomial Polynomial::random(int dim, int degree, std::uint64_t seed) {
    UniformStream rng(seed);
    std::vector<Term> terms;
    for (const auto& a : multi_indices(dim, degree).indices) terms.push_back({a, rng.uniform(-1.0, 1.0)});
    return Polynomial(dim, std::move(terms));
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, total_degree(t.alpha));
    return d;
}

double Polynomial::derivative(const Point& x, const MultiIndex& beta) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coefficient;
        for (int i = 0; i < 3 && v != 0.0; ++i) {
            const int a = t.alpha[i], b = beta[i];
            if (b > a) {
                v = 0.0;
                break;
            }
            for (int k = 0; k < b; ++k) v *= static_cast<double>(a - k);
            v *= std::pow(x[i], a - b);
        }
        sum += v;
    }
    return sum;
}

double Polynomial::value(const Point& x) const { return derivative(x, {0, 0, 0}); }

Eigen::VectorXd Polynomial::gradient(const Point& x) const {
    Eigen::VectorXd g(dim_);
    for (int i = 0; i < dim_; ++i) {
        MultiIndex b{0, 0, 0};
        b[i] = 1;
        g[i] = derivative(x, b);
    }
    return g;
}

Eigen::MatrixXd Polynomial::hessian(const Point& x) const {
    Eigen::MatrixXd H(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            MultiIndex b{0, 0, 0};
            ++b[i];
            ++b[j];
            H(i, j) = derivative(x, b);
        }
    return H;
}

double Polynomial::max_coefficient() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coefficient));
    return m;
}

}  // namespace holmes
