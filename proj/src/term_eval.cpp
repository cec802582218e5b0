#include "nlkg/errors.hpp"
#include "nlkg/term_algebra.hpp"

namespace nlkg {

TermEvaluator::TermEvaluator(const StateH& phi, const TimeWindow& window) : free_(free_series(phi, window)) {}

const FieldSeries& TermEvaluator::eval(const TermExpr& expr) {
    if (auto it = memo_.find(expr); it != memo_.end()) return it->second;
    auto compute = [&]() -> FieldSeries {
        switch (expr.kind()) {
            case TermExpr::Kind::WPower:
                return pointwise_power(free_, expr.power());
            case TermExpr::Kind::Duhamel:
                return duhamel(dealias(eval(expr.children().front())));
            case TermExpr::Kind::Product:
                break;
        }
        const auto& ch = expr.children();
        FieldSeries value = eval(ch.front());
        for (std::size_t i = 1; i < ch.size(); ++i) value = pointwise_product(value, eval(ch[i]));
        return value;
    };
    FieldSeries value = compute();
    return memo_.emplace(expr, std::move(value)).first->second;
}

FieldSeries TermEvaluator::eval(const TermSum& sum) {
    FieldSeries out = FieldSeries::zero(free_.grid(), free_.window);
    for (const auto& [c, e] : sum.terms) out.add_scaled(c, eval(e));
    return out;
}

FieldSeries evaluate(const TermSum& sum, const StateH& phi, const TimeWindow& window) {
    TermEvaluator ev(phi, window);
    return ev.eval(sum);
}

std::vector<PairedTerm> pair_with_free(const WPolynomial& poly, TermEvaluator& evaluator) {
    std::vector<PairedTerm> out;
    for (const auto& t : poly.terms()) {
        const double value = spacetime_inner(evaluator.eval(t.expr), evaluator.free());
        out.push_back({to_double(t.coefficient), t.monomial, value});
    }
    return out;
}

double evaluate_paired(std::span<const PairedTerm> paired, std::span<const double> values) {
    double acc = 0.0;
    for (const auto& p : paired) acc += p.coefficient * p.monomial.evaluate(values) * p.value;
    return acc;
}

FieldSeries build_A(int n, const StateH& phi, double lambda, const Nonlinearity& spec, const TimeWindow& window) {
    if (n < 0) throw InvalidInput("build_A: n must be >= 0");
    if (n > spec.max_derivative_order()) throw InvalidInput("build_A: n exceeds the nonlinearity's derivative order");
    const FieldSeries w = free_series(lambda * phi, window);

    std::vector<FieldSeries> derivs;  // N^(k)(w), k = 0..n
    for (int k = 0; k <= n; ++k) derivs.push_back(eval_on_field_raw(spec, k, w));

    std::vector<FieldSeries> a;  // A_0 .. A_n
    std::vector<FieldSeries> gamma_a;
    a.push_back(dealias(derivs[0]));
    for (int m = 1; m <= n; ++m) {
        gamma_a.push_back(duhamel(a.back()));
        FieldSeries am = a.front();
        double inv_fact = 1.0;
        for (int k = 1; k <= m; ++k) {
            inv_fact /= k;
            const FieldSeries& g = gamma_a[static_cast<std::size_t>(m - k)];
            FieldSeries term = pointwise_product(derivs[static_cast<std::size_t>(k)], pointwise_power(g, k));
            am.add_scaled(inv_fact, dealias(term));
        }
        a.push_back(std::move(am));
    }
    return a.back();
}

std::vector<FieldSeries> picard_series(const StateH& phi, std::span<const double> taylor, int max_order,
                                       const TimeWindow& window) {
    if (max_order < 1) throw InvalidInput("picard_series: max_order must be >= 1");
    const FieldSeries w = free_series(phi, window);
    const FieldSeries zero = FieldSeries::zero(w.grid(), window);
    const std::size_t len = static_cast<std::size_t>(max_order) + 1;

    using Series = std::vector<FieldSeries>;  // index = power of lambda
    auto multiply = [&](const Series& a, const Series& b) {
        Series c(len, zero);
        for (std::size_t i = 0; i < len; ++i) {
            for (std::size_t j = 0; i + j < len; ++j) {
                c[i + j] += pointwise_product(a[i], b[j]);
            }
        }
        return c;
    };

    Series u(len, zero);
    if (len > 1) u[1] = w;
    Series g(len, zero);
    // Each sweep fixes one more order of u; max_order sweeps reach the fixed point.
    for (int sweep = 0; sweep < max_order; ++sweep) {
        g.assign(len, zero);
        Series power = u;  // u^1
        for (int m = 2; m <= max_order; ++m) {
            power = multiply(power, u);  // u^m
            const std::size_t idx = static_cast<std::size_t>(m - 3);
            if (m < 3 || idx >= taylor.size() || taylor[idx] == 0.0) continue;
            double coef = taylor[idx];
            for (int i = 2; i <= m; ++i) coef /= i;
            for (std::size_t k = 0; k < len; ++k) g[k].add_scaled(coef, power[k]);
        }
        for (std::size_t k = 2; k < len; ++k) u[k] = duhamel(dealias(g[k]));
    }
    return g;
}

}  // namespace nlkg
