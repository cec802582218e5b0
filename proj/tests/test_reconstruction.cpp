#include <cmath>
#include <random>

#include "doctest.h"
#include "nlkg/errors.hpp"
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
    StateH phi = make_gaussian_probe(grid, {1.0, 1.0, 0.0, 0.0, 0.0});
    ReconstructionOptions options{SolverOptions{1e-13, 200, 0.0, 10}, 1e-6};

    std::vector<double> lambdas(int max_order) const {
        return geometric_lambda_grid(default_lambda_base(phi, max_order, 1.0), 5);
    }
    KSource solver(const Nonlinearity& spec) const { return solver_K_source(spec, window, options.solver); }
};

SampleMap sample(const std::function<double(double)>& h, int n, double lambda) {
    SampleMap m;
    for (double p : difference_points(n, lambda)) m[p] = h(p);
    return m;
}

std::vector<double> errors_against(const std::vector<Estimate>& est, double truth) {
    std::vector<double> out;
    for (const auto& e : est) out.push_back(std::abs(e.value - truth));
    return out;
}

std::vector<double> lambdas_of(const std::vector<Estimate>& est) {
    std::vector<double> out;
    for (const auto& e : est) out.push_back(e.lambda);
    return out;
}

}  // namespace

TEST_CASE("finite differences") {
    CHECK(difference_points(3, 0.5) == std::vector<double>{0.5, 1.0, 1.5, 2.0});
    CHECK(finite_difference(sample([](double) { return 4.2; }, 1, 0.1), 1, 0.1) == doctest::Approx(0.0));
    for (int n = 1; n <= 7; ++n) {
        const double lambda = 0.125;
        const double got = finite_difference(sample([n](double x) { return std::pow(x, n); }, n, lambda), n, lambda);
        CHECK(got / std::pow(lambda, n) == doctest::Approx(std::tgamma(n + 1.0)).epsilon(1e-10));
    }
    SampleMap partial{{0.1, 1.0}};
    CHECK_THROWS_AS(finite_difference(partial, 1, 0.1), InvalidInput);
    CHECK_THROWS_AS(finite_difference(partial, 0, 0.1), InvalidInput);
}

TEST_CASE("finite differences are linear") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 6;
        const double lambda = 0.01 * (1 + trial);
        SampleMap a;
        SampleMap b;
        SampleMap c;
        const double alpha = u(rng);
        const double beta = u(rng);
        for (double p : difference_points(n, lambda)) {
            a[p] = u(rng);
            b[p] = u(rng);
            c[p] = alpha * a[p] + beta * b[p];
        }
        const double lhs = finite_difference(c, n, lambda);
        const double rhs = alpha * finite_difference(a, n, lambda) + beta * finite_difference(b, n, lambda);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 << n));
    }
}

TEST_CASE("scaled differences converge to derivatives at first order") {
    // h(x) = sin(x + 0.3); h^(n)(0) = sin(0.3 + n pi / 2).
    auto h = [](double x) { return std::sin(x + 0.3); };
    for (int n = 1; n <= 5; ++n) {
        const double exact = std::sin(0.3 + n * std::numbers::pi / 2);
        std::vector<double> ls;
        std::vector<double> errs;
        for (int j = 0; j < 5; ++j) {
            const double lambda = std::ldexp(0.05, -j);
            ls.push_back(lambda);
            errs.push_back(std::abs(finite_difference(sample(h, n, lambda), n, lambda) / std::pow(lambda, n) - exact));
        }
        CHECK(fit_rate(ls, errs).slope >= 0.9);
    }
}

TEST_CASE("lambda grids") {
    const auto grid = geometric_lambda_grid(0.3, 5);
    REQUIRE(grid.size() == 5);
    CHECK(grid[0] == 0.3);
    CHECK(grid[4] == 0.3 / 16);
    CHECK_THROWS_AS(geometric_lambda_grid(0.0, 5), InvalidInput);
    CHECK_THROWS_AS(geometric_lambda_grid(0.1, 0), InvalidInput);
    Setup s;
    const double base = default_lambda_base(s.phi, 5, 1.0);
    CHECK(6 * base * energy_norm(s.phi) == doctest::Approx(1.0));
    CHECK_THROWS_AS(default_lambda_base(StateH::zero(s.grid), 5, 1.0), InvalidInput);
}

TEST_CASE("rate fits") {
    const std::vector<double> ls{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> lin;
    std::vector<double> quad;
    std::vector<double> noisy;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (double l : ls) {
        lin.push_back(3.0 * l);
        quad.push_back(0.5 * l * l);
        noisy.push_back(2.0 * l * (1.0 + u(rng)));
    }
    CHECK(fit_rate(ls, lin).slope == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit_rate(ls, lin).residual <= 1e-12);
    CHECK(fit_rate(ls, quad).slope == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(fit_rate(ls, noisy).slope - 1.0) <= 0.1);
    CHECK_THROWS_AS(fit_rate({0.1, 0.05}, {1.0, 0.5}), InvalidInput);
    CHECK_THROWS_AS(fit_rate(ls, {1.0, 0.0, 1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(fit_rate(ls, {1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(fit_rate({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}), InvalidInput);
}

TEST_CASE("moments") {
    Setup s;
    CHECK(moment(StateH::zero(s.grid), 3, s.window) == 0.0);
    CHECK(moment(s.phi, 3, s.window) > 0.0);
    CHECK(moment(s.phi, 3, s.window) >= default_moment_floor(s.phi, 3, s.window));

    // Refinement: a wide Gaussian is resolved on both grids.
    const GaussianProbe wide{0.8, 2.0, 0.0, 0.0, 0.2};
    const TimeWindow win(2.0, 16);
    const double coarse = moment(make_gaussian_probe(Grid2D::create(32, 16.0), wide), 3, win);
    const double fine = moment(make_gaussian_probe(Grid2D::create(64, 16.0), wide), 3, win);
    CHECK(rel_diff(coarse, fine) <= 1e-6);

    // Odd initial data: the even power integrates to something finite and nonzero.
    StateH odd = StateH::zero(s.grid);
    odd.f = dealias(plane_wave(s.grid, 1, 0, std::numbers::pi / 2));
    const double m = moment(odd, 3, s.window);
    CHECK(std::isfinite(m));
    CHECK(m != 0.0);
}

TEST_CASE("low orders: zero and cubic nonlinearities") {
    Setup s;
    const auto ls = s.lambdas(4);
    for (int n : {3, 4}) {
        const auto est = reconstruct_low(n, s.phi, ls, s.solver(Nonlinearity::zero()), s.window, s.options);
        for (const auto& e : est) CHECK(e.value == 0.0);
    }
    const auto cubic = reconstruct_low(3, s.phi, ls, s.solver(Nonlinearity::cubic(6.0)), s.window, s.options);
    CHECK(std::abs(cubic.back().value - 6.0) <= 0.01);
    CHECK(fit_rate(lambdas_of(cubic), errors_against(cubic, 6.0)).slope >= 0.9);
    CHECK_THROWS_AS(reconstruct_low(5, s.phi, ls, s.solver(Nonlinearity::cubic(6.0)), s.window), InvalidInput);
}

TEST_CASE("known-lower estimator degenerates to the low-order one") {
    Setup s;
    const auto ls = s.lambdas(4);
    const auto src = s.solver(Nonlinearity::polynomial({1.0, 0.5}));
    for (int n : {3, 4}) {
        const auto a = reconstruct_low(n, s.phi, ls, src, s.window, s.options);
        const auto b = reconstruct_known_lower(n, s.phi, ls, {}, src, s.window, s.options);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].value == b[i].value);
            CHECK(a[i].correction == 0.0);
        }
    }
}

TEST_CASE("re-parameterising the probe leaves the estimates unchanged") {
    Setup s;
    const auto src = s.solver(Nonlinearity::cubic(6.0));
    const auto ls = s.lambdas(3);
    std::vector<double> half;
    for (double l : ls) half.push_back(0.5 * l);
    const auto a = reconstruct_low(3, s.phi, ls, src, s.window, s.options);
    const auto b = reconstruct_low(3, 2.0 * s.phi, half, src, s.window, s.options);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(rel_diff(b[i].value, a[i].value) <= 1e-12);
}

TEST_CASE("known-lower reconstruction at order five") {
    Setup s;
    const auto ls = s.lambdas(5);
    const auto quintic = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    const auto e1 = reconstruct_known_lower(5, s.phi, ls, {6.0, 0.0}, s.solver(quintic), s.window, s.options);
    CHECK(std::abs(e1.back().value - 120.0) <= 0.02 * 120.0);
    CHECK(fit_rate(lambdas_of(e1), errors_against(e1, 120.0)).slope >= 0.9);

    const auto e2 =
        reconstruct_known_lower(5, s.phi, ls, {6.0, 0.0}, s.solver(Nonlinearity::cubic(6.0)), s.window, s.options);
    CHECK(std::abs(e2.back().value) < std::abs(e2.front().value));
    CHECK(std::abs(e2.back().value) <= 0.5);

    const auto e3 = reconstruct_known_lower(5, s.phi, ls, {6.0, 0.0}, s.solver(Nonlinearity::exponential(1.0, 1.0)),
                                            s.window, s.options);
    CHECK(std::abs(e3.back().value - 60.0) <= 0.02 * 60.0);

    CHECK_THROWS_AS(reconstruct_known_lower(6, s.phi, ls, {6.0}, s.solver(quintic), s.window), InvalidInput);
    CHECK_THROWS_AS(reconstruct_known_lower(2, s.phi, ls, {}, s.solver(quintic), s.window), InvalidInput);
}

TEST_CASE("probe admissibility") {
    Setup s;
    const auto src = s.solver(Nonlinearity::cubic(6.0));
    ReconstructionOptions strict = s.options;
    strict.moment_floor_scale = 1e6;
    try {
        (void)reconstruct_low(3, s.phi, s.lambdas(3), src, s.window, strict);
        FAIL("expected rejection");
    } catch (const ProbeRejected& e) {
        CHECK(e.order() == 3);
        CHECK(e.moment() == doctest::Approx(moment(s.phi, 3, s.window)));
    }
    CHECK_THROWS_AS(reconstruct_low(3, StateH::zero(s.grid), {0.1}, src, s.window), ProbeRejected);
    const StateH rough{noise_field(s.grid, 2), Field(s.grid)};
    CHECK_THROWS_AS(reconstruct_low(3, 0.1 * rough, {0.1}, src, s.window), InvalidInput);
}

TEST_CASE("recursive cascade recovers the Taylor data without supplying it") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    std::map<int, NamedProbe> probes;
    for (int n = 3; n <= 5; ++n) probes.emplace(n, NamedProbe{"gauss", s.phi});
    const auto ls = s.lambdas(5);
    CascadeOptions opts{s.options, spec};
    const auto report = reconstruct_recursive(5, probes, ls, s.solver(spec), s.window, opts);
    REQUIRE(report.complete);
    REQUIRE(report.orders.size() == 3);
    CHECK(report.lambdas == ls);
    const double truths[] = {6.0, 0.0, 120.0};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& o = report.orders[i];
        CHECK(o.order == static_cast<int>(i) + 3);
        CHECK(o.probe_id == "gauss");
        REQUIRE(o.truth.has_value());
        CHECK(*o.truth == truths[i]);
        REQUIRE(o.rate.has_value());
        CHECK(o.rate->slope >= 0.9);
        CHECK(o.abs_errors.size() == ls.size());
        CHECK_FALSE(o.extrapolated.has_value());
    }
    CHECK(std::abs(report.orders[0].estimates.back().value - 6.0) <= 0.01);
    CHECK(std::abs(report.orders[2].estimates.back().value - 120.0) <= 0.02 * 120.0);
}

TEST_CASE("order-five estimator matches its closed form term by term") {
    Setup s;
    const auto spec = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    std::map<int, NamedProbe> probes;
    for (int n = 3; n <= 5; ++n) probes.emplace(n, NamedProbe{"gauss", s.phi});
    const auto ls = s.lambdas(5);
    const auto report = reconstruct_recursive(5, probes, ls, s.solver(spec), s.window, {s.options, std::nullopt});
    REQUIRE(report.complete);

    const FieldSeries w = free_series(s.phi, s.window);
    const double w4 = spacetime_integral(pointwise_power(w, 4));
    const double w6 = spacetime_integral(pointwise_power(w, 6));
    const double w3gw3 =
        spacetime_integral(pointwise_product(pointwise_power(w, 3), duhamel(dealias(pointwise_power(w, 3)))));
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const double d3 = report.orders[0].estimates[i].difference_term;
        const double d5 = report.orders[2].estimates[i].difference_term;
        const double correction = d3 * d3 * 10.0 * w3gw3 / (w4 * w4);
        CHECK(rel_diff(report.orders[2].estimates[i].correction, correction) <= 1e-10);
        CHECK(rel_diff(report.orders[2].estimates[i].value, (d5 - correction) / w6) <= 1e-10);
    }
}

TEST_CASE("zero nonlinearity gives a zero cascade") {
    Setup s;
    std::map<int, NamedProbe> probes;
    for (int n = 3; n <= 6; ++n) probes.emplace(n, NamedProbe{"gauss", s.phi});
    const auto report =
        reconstruct_recursive(6, probes, s.lambdas(6), s.solver(Nonlinearity::zero()), s.window, {s.options, std::nullopt});
    REQUIRE(report.complete);
    for (const auto& o : report.orders) {
        for (const auto& e : o.estimates) CHECK(e.value == 0.0);
        REQUIRE(o.extrapolated.has_value());
        CHECK(*o.extrapolated == 0.0);
        CHECK_FALSE(o.truth.has_value());
        CHECK(o.abs_errors.empty());
    }
}

TEST_CASE("series oracle and solver pipelines agree") {
    Setup s;
    const std::vector<double> taylor{6.0, 0.0, 120.0};
    const auto spec = Nonlinearity::polynomial({1.0, 0.0, 1.0});
    std::map<int, NamedProbe> probes;
    for (int n = 3; n <= 7; ++n) probes.emplace(n, NamedProbe{"gauss", s.phi});
    const auto ls = s.lambdas(7);
    // The order-7 moment of this probe sits just under the default floor.
    CascadeOptions opts{s.options, spec};
    opts.base.moment_floor_scale = 1e-7;
    opts.base.solver.tolerance = 1e-15;
    const auto series = reconstruct_recursive(7, probes, ls, series_K_source(taylor, 21, s.window), s.window, opts);
    const auto solver = reconstruct_recursive(7, probes, ls, solver_K_source(spec, s.window, opts.base.solver), s.window, opts);
    REQUIRE(series.complete);
    REQUIRE(solver.complete);
    for (std::size_t i = 0; i < series.orders.size(); ++i) {
        const auto& a = series.orders[i];
        const auto& b = solver.orders[i];
        CAPTURE(a.order);
        REQUIRE(a.rate.has_value());
        CHECK(a.rate->slope >= 0.9);
        // The truncated series loses accuracy at the guard edge, and double-precision
        // cancellation in the order-n difference grows like lambda^-n at the small end.
        const std::size_t last = a.order >= 7 ? 3 : 4;
        for (std::size_t i = 1; i < last; ++i) {
            const double va = a.estimates[i].value;
            const double vb = b.estimates[i].value;
            CHECK(std::abs(va - vb) <= 1e-6 * std::abs(vb));
        }
    }
}

TEST_CASE("cascade failures are reported with the completed orders") {
    Setup s;
    const auto spec = Nonlinearity::cubic(6.0);
    std::map<int, NamedProbe> probes;
    for (int n = 3; n <= 5; ++n) probes.emplace(n, NamedProbe{"gauss", s.phi});

    const auto solver_fail =
        reconstruct_recursive(5, probes, {5.0, 2.5, 1.25}, s.solver(spec), s.window, {s.options, spec});
    CHECK_FALSE(solver_fail.complete);
    CHECK(solver_fail.failed_order == 3);
    CHECK(solver_fail.failure_kind == "solver");
    CHECK(solver_fail.orders.empty());

    // Order 4 gets a probe whose fourth-order moment vanishes by symmetry.
    std::map<int, NamedProbe> mixed = probes;
    StateH odd = StateH::zero(s.grid);
    odd.f = 0.5 * dealias(plane_wave(s.grid, 1, 0, std::numbers::pi / 2));
    mixed.insert_or_assign(4, NamedProbe{"odd", odd});
    const auto probe_fail = reconstruct_recursive(5, mixed, s.lambdas(5), s.solver(spec), s.window, {s.options, spec});
    CHECK_FALSE(probe_fail.complete);
    CHECK(probe_fail.failed_order == 4);
    CHECK(probe_fail.failure_kind == "probe");
    CHECK(probe_fail.orders.size() == 1);

    std::map<int, NamedProbe> missing{{3, NamedProbe{"gauss", s.phi}}};
    CHECK_THROWS_AS(reconstruct_recursive(4, missing, {0.1}, s.solver(spec), s.window), InvalidInput);
    CHECK_THROWS_AS(reconstruct_recursive(2, probes, {0.1}, s.solver(spec), s.window), InvalidInput);
}

TEST_CASE("order report finalisation") {
    OrderReport rep;
    rep.estimates = {{0.1, 0, 0, 6.4}, {0.05, 0, 0, 6.2}, {0.025, 0, 0, 6.1}};
    finalize_order_report(rep, 6.0);
    REQUIRE(rep.rate.has_value());
    CHECK(rep.rate->slope == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.abs_errors[2] == doctest::Approx(0.1));
    finalize_order_report(rep, std::nullopt);
    CHECK_FALSE(rep.rate.has_value());
    CHECK(rep.abs_errors.empty());
    REQUIRE(rep.extrapolated.has_value());
    CHECK(*rep.extrapolated == doctest::Approx(6.0));
}
