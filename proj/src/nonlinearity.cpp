#include "nlkg/nonlinearity.hpp"

#include <cmath>
#include <sstream>

#include "nlkg/errors.hpp"

namespace nlkg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double falling_factorial(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (n - i);
    return r;
}

double horner(const std::vector<double>& c, double y) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + *it;
    return acc;
}

}  // namespace

Nonlinearity::Nonlinearity(Family family, int max_derivative_order)
    : family_(std::move(family)), max_order_(max_derivative_order) {
    if (max_order_ < 0) throw InvalidInput("Nonlinearity: negative max_derivative_order");
    if (const auto* e = std::get_if<ExponentialFamily>(&family_)) {
        if (!(e->c2 >= 0.0) || !std::isfinite(e->c1) || !std::isfinite(e->c2)) {
            throw InvalidInput("Nonlinearity: exponential family needs finite c1 and c2 >= 0");
        }
        // H_0 = 1, H_{k+1} = H_k' + 2 c2 y H_k.
        hermite_.push_back({1.0});
        for (int k = 0; k < max_order_; ++k) {
            const auto& h = hermite_.back();
            std::vector<double> next(h.size() + 1, 0.0);
            for (std::size_t i = 1; i < h.size(); ++i) next[i - 1] += static_cast<double>(i) * h[i];
            for (std::size_t i = 0; i < h.size(); ++i) next[i + 1] += 2.0 * e->c2 * h[i];
            hermite_.push_back(std::move(next));
        }
    }
    if (const auto* p = std::get_if<PolynomialFamily>(&family_)) {
        for (double c : p->coefficients) {
            if (!std::isfinite(c)) throw InvalidInput("Nonlinearity: non-finite polynomial coefficient");
        }
    }
}

bool Nonlinearity::is_zero() const noexcept {
    return std::visit(overloaded{
                          [](const ZeroFamily&) { return true; },
                          [](const PolynomialFamily& p) {
                              for (double c : p.coefficients) {
                                  if (c != 0.0) return false;
                              }
                              return true;
                          },
                          [](const ExponentialFamily& e) { return e.c1 == 0.0 || e.c2 == 0.0; },
                      },
                      family_);
}

std::string Nonlinearity::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const ZeroFamily&) { os << "zero"; },
                   [&](const PolynomialFamily& p) {
                       os << "polynomial P(y)y^3, P=[";
                       for (std::size_t i = 0; i < p.coefficients.size(); ++i) {
                           os << (i ? ", " : "") << p.coefficients[i];
                       }
                       os << "]";
                   },
                   [&](const ExponentialFamily& e) {
                       os << "exponential c1=" << e.c1 << " c2=" << e.c2;
                   },
               },
               family_);
    return os.str();
}

void Nonlinearity::check_order(int k) const {
    if (k < 0 || k > max_order_) {
        throw InvalidInput("Nonlinearity: derivative order " + std::to_string(k) + " outside [0, " +
                           std::to_string(max_order_) + "]");
    }
}

double Nonlinearity::derivative(int k, double y) const {
    check_order(k);
    return std::visit(
        overloaded{
            [](const ZeroFamily&) { return 0.0; },
            [&](const PolynomialFamily& p) {
                // d^k/dy^k y^{i+3} = (i+3)_k y^{i+3-k}
                double acc = 0.0;
                for (int i = static_cast<int>(p.coefficients.size()) - 1; i >= 0; --i) {
                    const int deg = i + 3;
                    if (deg < k || p.coefficients[i] == 0.0) continue;
                    acc += p.coefficients[i] * falling_factorial(deg, k) * std::pow(y, deg - k);
                }
                return acc;
            },
            [&](const ExponentialFamily& e) {
                // N = c1 (y E - y), (y E)^(k) = y E^(k) + k E^(k-1), E^(k) = H_k E.
                const double y2 = y * y;
                const double ey = std::exp(e.c2 * y2);
                // expm1 keeps the low orders accurate near y = 0.
                if (k == 0) return e.c1 * y * std::expm1(e.c2 * y2);
                if (k == 1) return e.c1 * (std::expm1(e.c2 * y2) + 2.0 * e.c2 * y2 * ey);
                const double val = y * horner(hermite_[k], y) * ey + k * horner(hermite_[k - 1], y) * ey;
                return e.c1 * val;
            },
        },
        family_);
}

double Nonlinearity::taylor_coefficient(int order) const {
    if (order < 3) throw InvalidInput("taylor_coefficient: order must be >= 3");
    check_order(order);
    return std::visit(overloaded{
                          [](const ZeroFamily&) { return 0.0; },
                          [&](const PolynomialFamily& p) {
                              const std::size_t i = static_cast<std::size_t>(order - 3);
                              if (i >= p.coefficients.size()) return 0.0;
                              // N!/(N-3)! P^{(N-3)}(0) = N! p_{N-3}
                              return falling_factorial(order, order) * p.coefficients[i];
                          },
                          [&](const ExponentialFamily& e) {
                              if (order % 2 == 0) return 0.0;
                              // c1 sum_j c2^j y^{2j+1}/j!  ->  N! c1 c2^j / j!, N = 2j+1
                              const int j = (order - 1) / 2;
                              return e.c1 * std::pow(e.c2, j) * falling_factorial(order, order) /
                                     falling_factorial(j, j);
                          },
                      },
                      family_);
}

double eval_derivative(const Nonlinearity& spec, int k, double y) { return spec.derivative(k, y); }
double taylor_coefficient(const Nonlinearity& spec, int order) { return spec.taylor_coefficient(order); }

Field eval_on_field_raw(const Nonlinearity& spec, int k, const Field& field) {
    if (k < 0 || k > spec.max_derivative_order()) throw InvalidInput("eval_on_field: order out of range");
    Field out(field.grid());
    if (spec.is_zero()) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.derivative(k, field[i]);
    return out;
}

FieldSeries eval_on_field_raw(const Nonlinearity& spec, int k, const FieldSeries& series) {
    FieldSeries out{series.window, {}};
    out.frames.reserve(series.frames.size());
    for (const auto& fr : series.frames) out.frames.push_back(eval_on_field_raw(spec, k, fr));
    return out;
}

Field eval_on_field(const Nonlinearity& spec, int k, const Field& field) {
    return dealias(eval_on_field_raw(spec, k, field));
}

FieldSeries eval_on_field(const Nonlinearity& spec, int k, const FieldSeries& series) {
    return dealias(eval_on_field_raw(spec, k, series));
}

}  // namespace nlkg
