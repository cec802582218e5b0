#include <functional>
#include <mutex>

#include "nlkg/errors.hpp"
#include "nlkg/term_algebra.hpp"

namespace nlkg {

namespace {

// Calls visit(parts) for every ordered tuple of `count` integers >= lo summing to total.
void for_each_composition(int total, int count, int lo, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> parts(static_cast<std::size_t>(count));
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == count - 1) {
            if (remaining >= lo) {
                parts[static_cast<std::size_t>(pos)] = remaining;
                visit(parts);
            }
            return;
        }
        for (int v = lo; v <= remaining - lo * (count - 1 - pos); ++v) {
            parts[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1, remaining - v);
        }
    };
    if (count == 0) {
        if (total == 0) visit(parts);
        return;
    }
    rec(0, total);
}

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

int k_max(int order) {
    if (order < 5) throw InvalidInput("k_max: order must be >= 5");
    return std::min((order - 3) / 2, order / 3);
}

WPolynomial build_W(int order) {
    if (order < 3) throw InvalidInput("build_W: order must be >= 3");
    if (order < 5) return {};

    // Gamma(W~_n / n!) for every n the sum can reach.
    std::vector<WPolynomial> gamma_tilde(static_cast<std::size_t>(order + 1));
    for (int n = 3; n <= order - 2; ++n) {
        WPolynomial g = build_W_tilde(n).duhamel();
        g *= Rational(1) / factorial(n);
        gamma_tilde[static_cast<std::size_t>(n)] = std::move(g);
    }

    WPolynomial result;
    const Rational n_fact = factorial(order);
    for (int k = 1; k <= k_max(order); ++k) {
        const int n0_min = std::max(3 - k, 0);
        for (int n0 = n0_min; n0 + 3 * k <= order; ++n0) {
            // y_{N0+k} w^{N0} / N0!, scaled by N!/k!
            const Rational lead = n_fact / (factorial(k) * factorial(n0));
            WPolynomial head = WPolynomial::term(lead, Monomial::variable(n0 + k), TermExpr::w_power(n0));
            for_each_composition(order - n0, k, 3, [&](const std::vector<int>& parts) {
                WPolynomial term = head;
                for (int nl : parts) term = term * gamma_tilde[static_cast<std::size_t>(nl)];
                result += term;
            });
        }
    }
    return result;
}

WPolynomial build_W_tilde(int order) {
    if (order < 3) throw InvalidInput("build_W_tilde: order must be >= 3");
    static std::map<int, WPolynomial> cache;
    {
        std::lock_guard lock(cache_mutex());
        if (auto it = cache.find(order); it != cache.end()) return it->second;
    }
    WPolynomial r = WPolynomial::term(1, Monomial::variable(order), TermExpr::w_power(order));
    r += build_W(order);
    std::lock_guard lock(cache_mutex());
    cache.emplace(order, r);
    return r;
}

WPolynomial build_cubic_W(int order) {
    if (order < 3 || order % 2 == 0) throw InvalidInput("build_cubic_W: order must be odd and >= 3");
    if (order == 3) return WPolynomial::term(1, Monomial{}, TermExpr::w_power(3));

    const int n = (order - 3) / 2;
    // Gamma(W_{2m+3}) / (2m+3)! for m < n.
    std::vector<WPolynomial> gamma_scaled;
    for (int m = 0; m < n; ++m) {
        WPolynomial g = build_cubic_W(2 * m + 3).duhamel();
        g *= Rational(1) / factorial(2 * m + 3);
        gamma_scaled.push_back(std::move(g));
    }

    WPolynomial result;
    const Rational n_fact = factorial(order);
    for (int k = 1; k <= std::min(n, 3); ++k) {
        const Rational lead = n_fact / (factorial(k) * factorial(3 - k));
        WPolynomial head = WPolynomial::term(lead, Monomial{}, TermExpr::w_power(3 - k));
        // n_1 + ... + n_k = n - k with n_l >= 0
        for_each_composition(n - k, k, 0, [&](const std::vector<int>& parts) {
            WPolynomial term = head;
            for (int nl : parts) term = term * gamma_scaled[static_cast<std::size_t>(nl)];
            result += term;
        });
    }
    return result;
}

WPolynomial substitute(const WPolynomial& poly, const std::map<int, Rational>& values) {
    WPolynomial out;
    for (const auto& t : poly.terms()) {
        Rational c = t.coefficient;
        Monomial rest;
        const auto& exps = t.monomial.exponents();
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (exps[i] == 0) continue;
            const int var = static_cast<int>(i) + 3;
            if (auto it = values.find(var); it != values.end()) {
                for (int e = 0; e < exps[i]; ++e) c *= it->second;
            } else {
                rest = rest * Monomial::variable(var, exps[i]);
            }
        }
        out.add(c, rest, t.expr);
    }
    return out;
}

TermSum specialize(const WPolynomial& poly, std::span<const double> values) {
    std::map<TermExpr, double> acc;
    for (const auto& t : poly.terms()) {
        if (t.monomial.max_index() - 3 >= static_cast<int>(values.size())) {
            throw InvalidInput("specialize: no value supplied for y" + std::to_string(t.monomial.max_index()));
        }
        const double c = to_double(t.coefficient) * t.monomial.evaluate(values);
        if (c != 0.0) acc[t.expr] += c;
    }
    TermSum out;
    for (auto& [e, c] : acc) {
        if (c != 0.0) out.terms.emplace_back(c, e);
    }
    return out;
}

TermSum as_term_sum(const WPolynomial& poly) { return specialize(poly, {}); }

}  // namespace nlkg
