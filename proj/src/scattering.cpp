#include "nlkg/scattering.hpp"

#include <cmath>
#include <sstream>

namespace nlkg {

FieldSeries nonlinear_forcing(const Nonlinearity& spec, const FieldSeries& u) { return eval_on_field(spec, 0, u); }

Solution solve(const StateH& phi_minus, const Nonlinearity& spec, const TimeWindow& window,
               const SolverOptions& options) {
    if (!(options.tolerance > 0.0)) throw InvalidInput("solve: tolerance must be positive");
    if (options.max_iter < 1) throw InvalidInput("solve: max_iter must be >= 1");

    SolveDiagnostics diag;
    const double norm = energy_norm(phi_minus);
    if (options.amplitude_guard > 0.0 && norm > options.amplitude_guard * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "solve: input amplitude " << norm << " exceeds the amplitude guard " << options.amplitude_guard;
        throw SolverError(os.str(), diag);
    }
    const double scale = norm > 0.0 ? 1.0 / norm : 1.0;

    const FieldSeries w = free_series(phi_minus, window);
    FieldSeries u = w;
    for (int it = 1; it <= options.max_iter; ++it) {
        FieldSeries next = w + duhamel(nonlinear_forcing(spec, u));
        double residual = 0.0;
        for (std::size_t j = 0; j < next.frames.size(); ++j) {
            residual = std::max(residual, l2_norm(next.frames[j] - u.frames[j]) * scale);
        }
        u = std::move(next);
        diag.iterations = it;
        diag.final_residual = residual;
        diag.residual_history.push_back(residual);

        if (!std::isfinite(residual)) throw SolverError("solve: iteration diverged (non-finite residual)", diag);
        if (residual <= options.tolerance) {
            diag.converged = true;
            return {std::move(u), std::move(diag)};
        }
        if (it == options.contraction_window && residual >= diag.residual_history.front()) {
            throw SolverError("solve: residual failed to contract; amplitude outside the contraction regime", diag);
        }
    }
    throw SolverError("solve: no convergence within max_iter", diag);
}

StateH scattering_output(const FieldSeries& u, const StateH& phi_minus, const Nonlinearity& spec) {
    return phi_minus + output_integral(nonlinear_forcing(spec, u));
}

StateH scattering_map(const StateH& phi_minus, const Nonlinearity& spec, const TimeWindow& window,
                      const SolverOptions& options) {
    const Solution sol = solve(phi_minus, spec, window, options);
    return scattering_output(sol.u, phi_minus, spec);
}

double K_functional(const StateH& phi, double lambda, const Nonlinearity& spec, const TimeWindow& window,
                    const SolverOptions& options, KMode mode) {
    const StateH scaled = lambda * phi;
    const Solution sol = solve(scaled, spec, window, options);
    const FieldSeries forcing = nonlinear_forcing(spec, sol.u);
    if (mode == KMode::ViaPairing) return pairing_spacetime(forcing, phi);
    // S(lambda phi) - lambda phi is exactly the output integral of the forcing.
    const StateH out = scattering_output(sol.u, scaled, spec) - scaled;
    return inner_product_H(out, apply_J(phi));
}

std::vector<KSample> K_samples(const StateH& phi, const std::vector<double>& lambdas, const Nonlinearity& spec,
                               const TimeWindow& window, const SolverOptions& options) {
    std::vector<KSample> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        KSample s;
        s.lambda = lambda;
        try {
            const StateH scaled = lambda * phi;
            Solution sol = solve(scaled, spec, window, options);
            s.value = pairing_spacetime(nonlinear_forcing(spec, sol.u), phi);
            s.diagnostics = std::move(sol.diagnostics);
        } catch (const SolverError& e) {
            s.error = e.what();
            s.diagnostics = e.diagnostics();
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nlkg
