#pragma once

#include "nlkg/nonlinearity.hpp"
#include "nlkg/scattering.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg {

// d^N S(0; phi): phi for N = 1, 0 for N = 2, and for N >= 3 the output
// integral of the dealiased W~_N[N'''(0), ..., N^(N)(0)].
StateH gateaux_formula(int order, const StateH& phi, const Nonlinearity& spec, const TimeWindow& window);

// lambda^{-N} Delta^N_lambda S(lambda phi), componentwise.
StateH gateaux_numeric(int order, const StateH& phi, const Nonlinearity& spec, const TimeWindow& window,
                       double lambda, const SolverOptions& options = {});

// a^{(N-1)/2} * output integral of the cubic-case functional, odd N >= 3.
StateH cubic_differential(int order, double a, const StateH& phi, const TimeWindow& window);

}  // namespace nlkg
