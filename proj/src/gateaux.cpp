#include "nlkg/gateaux.hpp"

#include <cmath>

#include "nlkg/errors.hpp"
#include "nlkg/term_algebra.hpp"

namespace nlkg {

StateH gateaux_formula(int order, const StateH& phi, const Nonlinearity& spec, const TimeWindow& window) {
    if (order < 1) throw InvalidInput("gateaux_formula: order must be >= 1");
    if (order == 1) return phi;
    if (order == 2) return StateH::zero(phi.grid());
    std::vector<double> taylor;
    for (int k = 3; k <= order; ++k) taylor.push_back(spec.taylor_coefficient(k));
    const TermSum sum = specialize(build_W_tilde(order), taylor);
    if (sum.empty()) return StateH::zero(phi.grid());
    return output_integral(dealias(evaluate(sum, phi, window)));
}

StateH gateaux_numeric(int order, const StateH& phi, const Nonlinearity& spec, const TimeWindow& window,
                       double lambda, const SolverOptions& options) {
    if (order < 1) throw InvalidInput("gateaux_numeric: order must be >= 1");
    if (!(lambda > 0.0)) throw InvalidInput("gateaux_numeric: lambda must be positive");
    StateH acc = StateH::zero(phi.grid());
    double binom = 1.0;  // C(order, m)
    for (int m = 0; m <= order; ++m) {
        const double sign = ((order - m) % 2 == 0) ? 1.0 : -1.0;
        const StateH s = scattering_map((m + 1) * lambda * phi, spec, window, options);
        acc.add_scaled(sign * binom, s);
        binom = binom * (order - m) / (m + 1);
    }
    acc *= 1.0 / std::pow(lambda, order);
    return acc;
}

StateH cubic_differential(int order, double a, const StateH& phi, const TimeWindow& window) {
    if (order < 3 || order % 2 == 0) throw InvalidInput("cubic_differential: order must be odd and >= 3");
    const FieldSeries w = evaluate(as_term_sum(build_cubic_W(order)), phi, window);
    StateH out = output_integral(dealias(w));
    out *= std::pow(a, (order - 1) / 2);
    return out;
}

}  // namespace nlkg
