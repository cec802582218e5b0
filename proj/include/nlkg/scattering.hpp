#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlkg/errors.hpp"
#include "nlkg/nonlinearity.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg {

struct SolverOptions {
    // Absolute tolerance on sup_j ||u_j - w_j - Gamma N(u)_j||_{L2} / ||phi||_H.
    double tolerance = 1e-11;
    int max_iter = 200;
    // Ceiling on ||phi||_H for the input state; <= 0 disables the check.
    double amplitude_guard = 0.0;
    // The residual must have dropped below its first value after this many iterations.
    int contraction_window = 10;
};

struct SolveDiagnostics {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

// Interaction solve failed: non-convergence, no contraction, or amplitude
// above the guard. Carries the diagnostics gathered so far.
class SolverError : public Error {
public:
    SolverError(const std::string& what, SolveDiagnostics diagnostics)
        : Error(what), diagnostics_(std::move(diagnostics)) {}
    const SolveDiagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    SolveDiagnostics diagnostics_;
};

struct Solution {
    FieldSeries u;
    SolveDiagnostics diagnostics;
};

// The forcing the interaction equation feeds into Gamma: dealias(N(u)).
FieldSeries nonlinear_forcing(const Nonlinearity& spec, const FieldSeries& u);

// Fixed-point iteration u <- w_phi + Gamma N(u) from u = w_phi on the window.
Solution solve(const StateH& phi_minus, const Nonlinearity& spec, const TimeWindow& window,
               const SolverOptions& options = {});

// phi_+ = phi_- + output_integral(N(u)).
StateH scattering_output(const FieldSeries& u, const StateH& phi_minus, const Nonlinearity& spec);

// S(phi_-) on the window; throws SolverError on failure.
StateH scattering_map(const StateH& phi_minus, const Nonlinearity& spec, const TimeWindow& window,
                      const SolverOptions& options = {});

enum class KMode { ViaPairing, ViaOutput };

// K^{phi,lambda} = <S(lambda phi) - lambda phi, J phi>_H.
double K_functional(const StateH& phi, double lambda, const Nonlinearity& spec, const TimeWindow& window,
                    const SolverOptions& options = {}, KMode mode = KMode::ViaPairing);

struct KSample {
    double lambda = 0.0;
    std::optional<double> value;
    std::string error;
    SolveDiagnostics diagnostics;
};

// Independent solves per lambda; failures are recorded per sample.
std::vector<KSample> K_samples(const StateH& phi, const std::vector<double>& lambdas, const Nonlinearity& spec,
                               const TimeWindow& window, const SolverOptions& options = {});

}  // namespace nlkg
