#include <cmath>

#include "doctest.h"
#include "nlkg/errors.hpp"
#include "nlkg/gateaux.hpp"
#include "nlkg/probes.hpp"
#include "nlkg/reconstruction.hpp"
#include "nlkg/term_algebra.hpp"
#include "support.hpp"

using namespace nlkg;
using namespace nlkg::testing;

namespace {

struct Setup {
    GridPtr grid = Grid2D::create(16, 8.0);
    TimeWindow window{3.0, 24};
    StateH phi = make_gaussian_probe(grid, {1.0, 1.0, 0.0, 0.0, 0.3});
    SolverOptions solver{1e-13, 200, 0.0, 10};
};

}  // namespace

TEST_CASE("first and second differentials") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, 0.5, 1.0});
    CHECK(state_diff(gateaux_formula(1, s.phi, spec, s.window), s.phi) == 0.0);
    CHECK(energy_norm(gateaux_formula(2, s.phi, spec, s.window)) == 0.0);
    CHECK_THROWS_AS(gateaux_formula(0, s.phi, spec, s.window), InvalidInput);
}

TEST_CASE("even differentials of a cubic nonlinearity vanish") {
    Setup s;
    const auto spec = Nonlinearity::cubic(1.7);
    for (int n : {4, 6, 8}) CHECK(energy_norm(gateaux_formula(n, s.phi, spec, s.window)) == 0.0);
    CHECK(energy_norm(gateaux_formula(3, s.phi, spec, s.window)) > 0.0);
}

TEST_CASE("numeric differentials of the free flow") {
    Setup s;
    const auto zero = Nonlinearity::zero();
    CHECK(state_diff(gateaux_numeric(1, s.phi, zero, s.window, 0.1), s.phi) <= 1e-14 * energy_norm(s.phi));
    // Rounding in the n-th difference grows like 2^n eps / lambda^(n-1).
    for (int n = 2; n <= 5; ++n) {
        const double bound = 8.0 * std::ldexp(2.2e-16, n) * energy_norm(s.phi) / std::pow(0.1, n - 1);
        CHECK(energy_norm(gateaux_numeric(n, s.phi, zero, s.window, 0.1)) <= bound);
    }
    CHECK_THROWS_AS(gateaux_numeric(0, s.phi, zero, s.window, 0.1), InvalidInput);
    CHECK_THROWS_AS(gateaux_numeric(1, s.phi, zero, s.window, 0.0), InvalidInput);
}

TEST_CASE("numeric third differential converges to the formula") {
    Setup s;
    const auto spec = Nonlinearity::cubic(6.0);
    const StateH formula = gateaux_formula(3, s.phi, spec, s.window);
    std::vector<double> ls;
    std::vector<double> errs;
    const double base = default_lambda_base(s.phi, 3, 1.0);
    for (int j = 0; j < 4; ++j) {
        const double lambda = std::ldexp(base, -j);
        ls.push_back(lambda);
        errs.push_back(state_diff(gateaux_numeric(3, s.phi, spec, s.window, lambda, s.solver), formula));
    }
    CHECK(fit_rate(ls, errs).slope >= 0.9);
    CHECK(errs.back() <= 0.05 * energy_norm(formula));
}

TEST_CASE("cubic-case differential") {
    Setup s;
    const StateH d3 = cubic_differential(3, 1.0, s.phi, s.window);
    const StateH direct = output_integral(dealias(pointwise_power(free_series(s.phi, s.window), 3)));
    CHECK(state_diff(d3, direct) <= 1e-13 * energy_norm(direct));

    const StateH a1 = cubic_differential(5, 1.0, s.phi, s.window);
    const StateH a3 = cubic_differential(5, 3.0, s.phi, s.window);
    CHECK(state_diff(a3, 9.0 * a1) <= 1e-13 * energy_norm(a3));

    for (int n : {3, 5, 7}) {
        const double a = 1.5;
        const StateH c = cubic_differential(n, a, s.phi, s.window);
        const StateH f = gateaux_formula(n, s.phi, Nonlinearity::cubic(a), s.window);
        CHECK(state_diff(c, f) <= 1e-10 * energy_norm(c));
    }
    CHECK_THROWS_AS(cubic_differential(4, 1.0, s.phi, s.window), InvalidInput);
    CHECK_THROWS_AS(cubic_differential(1, 1.0, s.phi, s.window), InvalidInput);
}

TEST_CASE("formula differentials are homogeneous") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, -0.5, 1.0, 0.25});
    for (int n = 1; n <= 6; ++n) {
        const StateH base = gateaux_formula(n, s.phi, spec, s.window);
        const StateH scaled = gateaux_formula(n, 1.3 * s.phi, spec, s.window);
        CHECK(state_diff(scaled, std::pow(1.3, n) * base) <= 1e-10 * std::max(energy_norm(scaled), 1e-300));
    }
}

TEST_CASE("formula differentials satisfy the pairing identity") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, -0.5, 1.0, 0.125});
    for (int n = 3; n <= 6; ++n) {
        const StateH psi = random_state(s.grid, static_cast<std::uint64_t>(n), 0.8);
        const StateH d = gateaux_formula(n, s.phi, spec, s.window);
        std::vector<double> ys;
        for (int k = 3; k <= n; ++k) ys.push_back(spec.taylor_coefficient(k));
        const FieldSeries wt = evaluate(specialize(build_W_tilde(n), ys), s.phi, s.window);
        const double rhs = pairing_spacetime(dealias(wt), psi);
        CHECK(std::abs(inner_product_H(d, apply_J(psi)) - rhs) <= 1e-10 * std::abs(rhs));
    }
}
