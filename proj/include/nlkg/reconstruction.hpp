#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlkg/nonlinearity.hpp"
#include "nlkg/scattering.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg {

// Samples of a scalar function of lambda, keyed by the exact sample point.
using SampleMap = std::map<double, double>;

// Sample points (m+1) lambda, m = 0..n, as used by the forward difference.
std::vector<double> difference_points(int n, double lambda);

// sum_{m=0}^n C(n,m) (-1)^{n-m} h((m+1) lambda). Throws InvalidInput on a missing sample.
double finite_difference(const SampleMap& h, int n, double lambda);

// lambda_j = base * 2^{-j}, j = 0..count-1.
std::vector<double> geometric_lambda_grid(double base, int count = 5);
// Base chosen so that (max_order + 1) * base * ||phi||_H equals the guard.
double default_lambda_base(const StateH& phi, int max_order, double amplitude_guard);

// int w_phi^{order+1} d(t,x) on the window.
double moment(const StateH& phi, int order, const TimeWindow& window);
// scale * ||phi||_H^{order+1} * 2T * box_length^2
double default_moment_floor(const StateH& phi, int order, const TimeWindow& window, double scale = 1e-6);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    // Root-mean-square residual of the log-log fit.
    double residual = 0.0;
};

// Least-squares slope of log(error) against log(lambda); needs >= 3 positive errors.
RateFit fit_rate(const std::vector<double>& lambdas, const std::vector<double>& errors);

// Source of K^{phi,lambda}. The solver-backed source is the default; tests
// swap in the truncated Picard series to isolate the estimator algebra.
using KSource = std::function<double(const StateH& phi, double lambda)>;

KSource solver_K_source(const Nonlinearity& spec, const TimeWindow& window, const SolverOptions& options);
// K from the Picard series of N(y) = sum y_m/m! y^m truncated at `max_order` in lambda.
KSource series_K_source(std::vector<double> taylor, int max_order, const TimeWindow& window);

struct Estimate {
    double lambda = 0.0;
    // lambda^{-N} Delta^N K
    double difference_term = 0.0;
    // int W_N[...] w_phi
    double correction = 0.0;
    double value = 0.0;
};

struct ReconstructionOptions {
    SolverOptions solver;
    double moment_floor_scale = 1e-6;
};

// N = 3, 4: lambda^{-N} Delta^N K / int w^{N+1}.
std::vector<Estimate> reconstruct_low(int order, const StateH& phi, const std::vector<double>& lambdas,
                                      const KSource& source, const TimeWindow& window,
                                      const ReconstructionOptions& options = {});

// Any N >= 3 with y3..y_{N-2} known; known[i] is y_{i+3}.
std::vector<Estimate> reconstruct_known_lower(int order, const StateH& phi, const std::vector<double>& lambdas,
                                              const std::vector<double>& known, const KSource& source,
                                              const TimeWindow& window, const ReconstructionOptions& options = {});

struct NamedProbe {
    std::string id;
    StateH state;
};

struct OrderReport {
    int order = 0;
    std::string probe_id;
    double moment = 0.0;
    std::vector<Estimate> estimates;
    std::optional<double> truth;
    std::vector<double> abs_errors;
    std::optional<RateFit> rate;
    // First-order extrapolation to lambda -> 0 from the two smallest lambdas.
    std::optional<double> extrapolated;
};

// Fills truth, abs_errors and the rate fit (or, without truth, the
// extrapolated value) from rep.estimates.
void finalize_order_report(OrderReport& rep, std::optional<double> truth);

struct ReconstructionReport {
    std::vector<double> lambdas;
    std::vector<OrderReport> orders;
    bool complete = true;
    int failed_order = 0;
    // "solver" or "probe" when the cascade stopped early.
    std::string failure_kind;
    std::string failure;
};

struct CascadeOptions {
    ReconstructionOptions base;
    // Ground truth for error columns; absent in blind mode.
    std::optional<Nonlinearity> truth;
};

// Fully recursive estimator I^lambda_n, n = 3..max_order. probes[n] is used at
// order n. Failures stop the cascade and are recorded in the report.
ReconstructionReport reconstruct_recursive(int max_order, const std::map<int, NamedProbe>& probes,
                                           const std::vector<double>& lambdas, const KSource& source,
                                           const TimeWindow& window, const CascadeOptions& options = {});

}  // namespace nlkg
