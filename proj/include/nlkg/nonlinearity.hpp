#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nlkg/spectral.hpp"

namespace nlkg {

// N(y) = P(y) y^3 with P(y) = sum_i coefficients[i] y^i.
struct PolynomialFamily {
    std::vector<double> coefficients;
};

// N(y) = c1 (exp(c2 y^2) - 1) y, c2 >= 0.
struct ExponentialFamily {
    double c1 = 1.0;
    double c2 = 1.0;
};

struct ZeroFamily {};

// Admissible nonlinearity with exact derivatives N^(k)(y) and exact
// Taylor coefficients N^(k)(0). Every family vanishes to third order at 0.
class Nonlinearity {
public:
    using Family = std::variant<PolynomialFamily, ExponentialFamily, ZeroFamily>;

    static constexpr int kDefaultMaxOrder = 12;

    explicit Nonlinearity(Family family, int max_derivative_order = kDefaultMaxOrder);

    static Nonlinearity zero() { return Nonlinearity(ZeroFamily{}); }
    static Nonlinearity polynomial(std::vector<double> p, int max_order = kDefaultMaxOrder) {
        return Nonlinearity(PolynomialFamily{std::move(p)}, max_order);
    }
    static Nonlinearity exponential(double c1, double c2, int max_order = kDefaultMaxOrder) {
        return Nonlinearity(ExponentialFamily{c1, c2}, max_order);
    }
    // N(y) = a y^3 / 6, so that N'''(0) = a.
    static Nonlinearity cubic(double a) { return polynomial({a / 6.0}); }

    const Family& family() const noexcept { return family_; }
    int max_derivative_order() const noexcept { return max_order_; }
    bool is_zero() const noexcept;
    std::string describe() const;

    // k-th derivative at y. Throws InvalidInput when k is outside [0, max order].
    double derivative(int k, double y) const;
    // N^(order)(0).
    double taylor_coefficient(int order) const;

private:
    void check_order(int k) const;

    Family family_;
    int max_order_;
    // Coefficients of the polynomials H_k with (d/dy)^k exp(c2 y^2) = H_k(y) exp(c2 y^2).
    std::vector<std::vector<double>> hermite_;
};

double eval_derivative(const Nonlinearity& spec, int k, double y);
double taylor_coefficient(const Nonlinearity& spec, int order);

// N^(k) applied pointwise. The `_raw` forms skip the dealias mask.
Field eval_on_field_raw(const Nonlinearity& spec, int k, const Field& field);
FieldSeries eval_on_field_raw(const Nonlinearity& spec, int k, const FieldSeries& series);
Field eval_on_field(const Nonlinearity& spec, int k, const Field& field);
FieldSeries eval_on_field(const Nonlinearity& spec, int k, const FieldSeries& series);

}  // namespace nlkg
