#include <cmath>

#include "doctest.h"
#include "nlkg/errors.hpp"
#include "nlkg/probes.hpp"
#include "nlkg/reconstruction.hpp"
#include "nlkg/scattering.hpp"
#include "support.hpp"

using namespace nlkg;
using namespace nlkg::testing;

namespace {

struct Setup {
    GridPtr grid = Grid2D::create(16, 12.0);
    TimeWindow window{3.0, 24};
    StateH phi = make_gaussian_probe(grid, {1.0, 1.5, 0.0, 0.0, 0.0});
};

SolverOptions tight() { return SolverOptions{1e-13, 200, 0.0, 10}; }

}  // namespace

TEST_CASE("zero nonlinearity leaves the free solution") {
    Setup s;
    const Solution sol = solve(s.phi, Nonlinearity::zero(), s.window);
    CHECK(sol.diagnostics.iterations == 1);
    CHECK(sol.diagnostics.converged);
    CHECK(max_abs_diff(sol.u, free_series(s.phi, s.window)) == 0.0);
    CHECK(state_diff(scattering_map(s.phi, Nonlinearity::zero(), s.window), s.phi) == 0.0);
    CHECK(K_functional(s.phi, 0.3, Nonlinearity::zero(), s.window) == 0.0);
}

TEST_CASE("zero data gives the zero solution") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    const Solution sol = solve(StateH::zero(s.grid), spec, s.window);
    CHECK(max_abs(sol.u) == 0.0);
    CHECK(energy_norm(scattering_map(StateH::zero(s.grid), spec, s.window)) == 0.0);
    CHECK(K_functional(s.phi, 0.0, spec, s.window) == 0.0);
}

TEST_CASE("converged solves satisfy the tolerance and contract geometrically") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    const Solution sol = solve(0.2 * s.phi, spec, s.window, tight());
    CHECK(sol.diagnostics.converged);
    CHECK(sol.diagnostics.final_residual <= 1e-13);
    const auto& h = sol.diagnostics.residual_history;
    CHECK(h.size() == static_cast<std::size_t>(sol.diagnostics.iterations));
    for (std::size_t i = 1; i < h.size(); ++i) {
        if (h[i - 1] < 1e-2 && h[i - 1] > 1e-14) CHECK(h[i] < 0.9 * h[i - 1]);
    }
}

TEST_CASE("leading-order Picard correction") {
    Setup s;
    const auto spec = Nonlinearity::cubic(6.0);
    std::vector<double> lambdas{0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double lambda : lambdas) {
        const StateH data = lambda * s.phi;
        const Solution sol = solve(data, spec, s.window, tight());
        const FieldSeries w = free_series(data, s.window);
        const FieldSeries first = w + duhamel(dealias(pointwise_power(w, 3)));
        errs.push_back(sup_l2(sol.u - first));
    }
    CHECK(fit_rate(lambdas, errs).slope >= 4.5);
}

TEST_CASE("scattering output and the duality identity") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    const StateH data = 0.3 * s.phi;
    const Solution sol = solve(data, spec, s.window, tight());
    const StateH plus = scattering_output(sol.u, data, spec);
    const StateH psi = random_state(s.grid, 17, 0.7);
    const double lhs = inner_product_H(plus - data, apply_J(psi));
    const double rhs = pairing_spacetime(nonlinear_forcing(spec, sol.u), psi);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
    CHECK(std::abs(rhs) > 0.0);
}

TEST_CASE("both K modes agree") {
    Setup s;
    for (const auto& spec : {Nonlinearity::cubic(6.0), Nonlinearity::exponential(1.0, 1.0)}) {
        for (double lambda : {0.05, 0.2}) {
            const double a = K_functional(s.phi, lambda, spec, s.window, tight(), KMode::ViaPairing);
            const double b = K_functional(s.phi, lambda, spec, s.window, tight(), KMode::ViaOutput);
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
        }
    }
}

TEST_CASE("K approaches its leading term at second order") {
    Setup s;
    const double a = 6.0;
    const auto spec = Nonlinearity::cubic(a);
    const double leading = a / 6.0 * spacetime_integral(pointwise_power(free_series(s.phi, s.window), 4));
    std::vector<double> lambdas{0.2, 0.1, 0.05, 0.025};
    std::vector<double> errs;
    for (double lambda : lambdas) {
        const double k = K_functional(s.phi, lambda, spec, s.window, tight());
        errs.push_back(std::abs(k / std::pow(lambda, 3) - leading));
    }
    CHECK(errs.back() <= 1e-2 * std::abs(leading));
    CHECK(fit_rate(lambdas, errs).slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("solver failures carry diagnostics") {
    Setup s;
    const auto spec = Nonlinearity::cubic(6.0);
    try {
        (void)solve(20.0 * s.phi, spec, s.window);
        FAIL("expected a solver failure");
    } catch (const SolverError& e) {
        CHECK_FALSE(e.diagnostics().converged);
        CHECK(e.diagnostics().iterations >= 1);
    }
    try {
        (void)solve(0.3 * s.phi, spec, s.window, SolverOptions{1e-13, 2, 0.0, 10});
        FAIL("expected max_iter failure");
    } catch (const SolverError& e) {
        CHECK(e.diagnostics().iterations == 2);
        CHECK(e.diagnostics().residual_history.size() == 2);
    }
    const double norm = energy_norm(s.phi);
    CHECK_THROWS_AS(solve(s.phi, spec, s.window, SolverOptions{1e-11, 200, 0.5 * norm, 10}), SolverError);
    CHECK_NOTHROW(solve(0.1 * s.phi, spec, s.window, SolverOptions{1e-11, 200, norm, 10}));
    // An input on the ceiling is admitted despite rounding in (m+1) lambda phi.
    const double base = 0.1 / (4 * norm);
    CHECK_NOTHROW(solve((3 + 1) * base * s.phi, spec, s.window, SolverOptions{1e-11, 200, 0.1, 10}));
    CHECK_THROWS_AS(solve(s.phi, spec, s.window, SolverOptions{0.0, 200, 0.0, 10}), InvalidInput);
    CHECK_THROWS_AS(solve(s.phi, spec, s.window, SolverOptions{1e-11, 0, 0.0, 10}), InvalidInput);
    CHECK_THROWS_AS(K_functional(s.phi, 20.0, spec, s.window), SolverError);
}

TEST_CASE("K samples") {
    Setup s;
    const auto spec = Nonlinearity::cubic(6.0);
    CHECK(K_samples(s.phi, {}, spec, s.window).empty());
    const std::vector<double> lambdas{0.1, 0.05, 20.0};
    const auto samples = K_samples(s.phi, lambdas, spec, s.window);
    REQUIRE(samples.size() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(samples[i].value.has_value());
        CHECK(*samples[i].value == K_functional(s.phi, lambdas[i], spec, s.window));
        CHECK(samples[i].error.empty());
        CHECK(samples[i].diagnostics.converged);
    }
    CHECK_FALSE(samples[2].value.has_value());
    CHECK_FALSE(samples[2].error.empty());
}

TEST_CASE("solves are deterministic") {
    Setup s;
    const auto spec = Nonlinearity::exponential(1.0, 0.5);
    const Solution a = solve(0.25 * s.phi, spec, s.window);
    const Solution b = solve(0.25 * s.phi, spec, s.window);
    CHECK(max_abs_diff(a.u, b.u) == 0.0);
    CHECK(a.diagnostics.residual_history == b.diagnostics.residual_history);
}
