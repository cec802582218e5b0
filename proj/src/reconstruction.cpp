#include "nlkg/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "nlkg/errors.hpp"
#include "nlkg/probes.hpp"
#include "nlkg/term_algebra.hpp"

namespace nlkg {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// K samples for one probe, reused across orders and lambdas.
class SampleCache {
public:
    SampleCache(const KSource& source, const StateH& phi) : source_(source), phi_(phi) {}

    const SampleMap& ensure(const std::vector<double>& points) {
        for (double p : points) {
            if (!samples_.contains(p)) samples_.emplace(p, source_(phi_, p));
        }
        return samples_;
    }

private:
    const KSource& source_;
    const StateH& phi_;
    SampleMap samples_;
};

double checked_moment(const StateH& phi, int order, const TimeWindow& window, double floor_scale) {
    // K pairs the dealiased forcing with w_phi; the moment and the corrections
    // pair raw products. The two agree only for band-limited probes.
    if (!is_band_limited(phi, 1e-10)) throw InvalidInput("probe is not band-limited to the dealias mask");
    const double m = moment(phi, order, window);
    const double floor = default_moment_floor(phi, order, window, floor_scale);
    if (!(std::abs(m) >= floor) || floor == 0.0) {
        std::ostringstream os;
        os << "probe rejected at order " << order << ": |moment| = " << std::abs(m) << " below floor " << floor;
        throw ProbeRejected(os.str(), order, m);
    }
    return m;
}

std::vector<Estimate> estimate_order(int order, const std::vector<double>& lambdas,
                                     SampleCache& cache, double moment_value, const std::vector<PairedTerm>& paired,
                                     const std::function<std::vector<double>(std::size_t)>& lower_values) {
    std::vector<Estimate> out;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double lambda = lambdas[i];
        const SampleMap& k = cache.ensure(difference_points(order, lambda));
        Estimate e;
        e.lambda = lambda;
        e.difference_term = finite_difference(k, order, lambda) / std::pow(lambda, order);
        if (!paired.empty()) e.correction = evaluate_paired(paired, lower_values(i));
        e.value = (e.difference_term - e.correction) / moment_value;
        out.push_back(e);
    }
    return out;
}

}  // namespace

std::vector<double> difference_points(int n, double lambda) {
    std::vector<double> pts;
    for (int m = 0; m <= n; ++m) pts.push_back((m + 1) * lambda);
    return pts;
}

double finite_difference(const SampleMap& h, int n, double lambda) {
    if (n < 1) throw InvalidInput("finite_difference: n must be >= 1");
    double acc = 0.0;
    for (int m = 0; m <= n; ++m) {
        const double point = (m + 1) * lambda;
        const auto it = h.find(point);
        if (it == h.end()) {
            std::ostringstream os;
            os.precision(17);
            os << "finite_difference: missing sample at lambda = " << point;
            throw InvalidInput(os.str());
        }
        const double sign = ((n - m) % 2 == 0) ? 1.0 : -1.0;
        acc += binomial(n, m) * sign * it->second;
    }
    return acc;
}

std::vector<double> geometric_lambda_grid(double base, int count) {
    if (!(base > 0.0) || count < 1) throw InvalidInput("geometric_lambda_grid: need base > 0 and count >= 1");
    std::vector<double> out;
    for (int j = 0; j < count; ++j) out.push_back(std::ldexp(base, -j));
    return out;
}

double default_lambda_base(const StateH& phi, int max_order, double amplitude_guard) {
    const double norm = energy_norm(phi);
    if (!(norm > 0.0)) throw InvalidInput("default_lambda_base: zero probe");
    return amplitude_guard / ((max_order + 1) * norm);
}

double moment(const StateH& phi, int order, const TimeWindow& window) {
    return spacetime_integral(pointwise_power(free_series(phi, window), order + 1));
}

double default_moment_floor(const StateH& phi, int order, const TimeWindow& window, double scale) {
    const double len = phi.grid()->box_length();
    return scale * std::pow(energy_norm(phi), order + 1) * 2.0 * window.half_width() * len * len;
}

RateFit fit_rate(const std::vector<double>& lambdas, const std::vector<double>& errors) {
    if (lambdas.size() != errors.size()) throw InvalidInput("fit_rate: size mismatch");
    if (lambdas.size() < 3) throw InvalidInput("fit_rate: need at least 3 points");
    const std::size_t n = lambdas.size();
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lambdas[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(errors[i])) {
            throw InvalidInput("fit_rate: lambdas and errors must be positive");
        }
        x[i] = std::log(lambdas[i]);
        y[i] = std::log(errors[i]);
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidInput("fit_rate: degenerate lambda grid");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

KSource solver_K_source(const Nonlinearity& spec, const TimeWindow& window, const SolverOptions& options) {
    return [spec, window, options](const StateH& phi, double lambda) {
        return K_functional(phi, lambda, spec, window, options, KMode::ViaPairing);
    };
}

KSource series_K_source(std::vector<double> taylor, int max_order, const TimeWindow& window) {
    struct Entry {
        StateH phi;
        std::vector<double> coefficients;  // lambda^k coefficient of K
    };
    auto cache = std::make_shared<std::vector<Entry>>();
    return [taylor = std::move(taylor), max_order, window, cache](const StateH& phi, double lambda) {
        const Entry* hit = nullptr;
        for (const auto& e : *cache) {
            if (e.phi.grid()->same_as(*phi.grid()) &&
                std::equal(e.phi.f.values().begin(), e.phi.f.values().end(), phi.f.values().begin()) &&
                std::equal(e.phi.g.values().begin(), e.phi.g.values().end(), phi.g.values().begin())) {
                hit = &e;
                break;
            }
        }
        if (hit == nullptr) {
            const auto series = picard_series(phi, taylor, max_order, window);
            Entry e{phi, {}};
            for (const auto& g : series) e.coefficients.push_back(pairing_spacetime(dealias(g), phi));
            cache->push_back(std::move(e));
            hit = &cache->back();
        }
        double acc = 0.0;
        for (std::size_t k = hit->coefficients.size(); k-- > 0;) acc = acc * lambda + hit->coefficients[k];
        return acc;
    };
}

std::vector<Estimate> reconstruct_low(int order, const StateH& phi, const std::vector<double>& lambdas,
                                      const KSource& source, const TimeWindow& window,
                                      const ReconstructionOptions& options) {
    if (order != 3 && order != 4) throw InvalidInput("reconstruct_low: order must be 3 or 4");
    return reconstruct_known_lower(order, phi, lambdas, {}, source, window, options);
}

std::vector<Estimate> reconstruct_known_lower(int order, const StateH& phi, const std::vector<double>& lambdas,
                                              const std::vector<double>& known, const KSource& source,
                                              const TimeWindow& window, const ReconstructionOptions& options) {
    if (order < 3) throw InvalidInput("reconstruct_known_lower: order must be >= 3");
    if (order >= 5 && static_cast<int>(known.size()) < order - 4) {
        throw InvalidInput("reconstruct_known_lower: need known values y3..y" + std::to_string(order - 2));
    }
    const double m = checked_moment(phi, order, window, options.moment_floor_scale);
    std::vector<PairedTerm> paired;
    if (order >= 5) {
        TermEvaluator ev(phi, window);
        paired = pair_with_free(build_W(order), ev);
    }
    SampleCache cache(source, phi);
    return estimate_order(order, lambdas, cache, m, paired, [&](std::size_t) { return known; });
}

void finalize_order_report(OrderReport& rep, std::optional<double> truth) {
    rep.truth = truth;
    rep.abs_errors.clear();
    rep.rate.reset();
    rep.extrapolated.reset();
    if (truth) {
        bool all_positive = true;
        for (const auto& e : rep.estimates) {
            rep.abs_errors.push_back(std::abs(e.value - *truth));
            all_positive = all_positive && rep.abs_errors.back() > 0.0;
        }
        if (rep.estimates.size() >= 3 && all_positive) {
            std::vector<double> ls;
            for (const auto& e : rep.estimates) ls.push_back(e.lambda);
            rep.rate = fit_rate(ls, rep.abs_errors);
        }
    } else if (rep.estimates.size() >= 2) {
        // Two smallest lambdas; the grid may come in any order.
        std::vector<Estimate> sorted = rep.estimates;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
        const auto& a = sorted[0];
        const auto& b = sorted[1];
        rep.extrapolated = (b.lambda * a.value - a.lambda * b.value) / (b.lambda - a.lambda);
    }
}

ReconstructionReport reconstruct_recursive(int max_order, const std::map<int, NamedProbe>& probes,
                                           const std::vector<double>& lambdas, const KSource& source,
                                           const TimeWindow& window, const CascadeOptions& options) {
    if (max_order < 3) throw InvalidInput("reconstruct_recursive: max_order must be >= 3");
    ReconstructionReport report;
    report.lambdas = lambdas;

    std::map<std::string, std::unique_ptr<SampleCache>> caches;
    // estimates_by_order[n - 3][i] = I^{lambda_i}_n
    std::vector<std::vector<double>> values_by_order;

    for (int n = 3; n <= max_order; ++n) {
        const auto pit = probes.find(n);
        if (pit == probes.end()) throw InvalidInput("reconstruct_recursive: no probe for order " + std::to_string(n));
        const NamedProbe& probe = pit->second;
        OrderReport rep;
        rep.order = n;
        rep.probe_id = probe.id;
        try {
            rep.moment = checked_moment(probe.state, n, window, options.base.moment_floor_scale);
            std::vector<PairedTerm> paired;
            if (n >= 5) {
                TermEvaluator ev(probe.state, window);
                paired = pair_with_free(build_W(n), ev);
            }
            auto& cache = caches[probe.id];
            if (!cache) cache = std::make_unique<SampleCache>(source, probe.state);
            rep.estimates = estimate_order(n, lambdas, *cache, rep.moment, paired, [&](std::size_t i) {
                std::vector<double> v;
                for (const auto& row : values_by_order) v.push_back(row[i]);
                return v;
            });
        } catch (const ProbeRejected& e) {
            report.complete = false;
            report.failed_order = n;
            report.failure_kind = "probe";
            report.failure = e.what();
            return report;
        } catch (const SolverError& e) {
            report.complete = false;
            report.failed_order = n;
            report.failure_kind = "solver";
            report.failure = e.what();
            return report;
        }

        std::vector<double> row;
        for (const auto& e : rep.estimates) row.push_back(e.value);
        values_by_order.push_back(row);

        finalize_order_report(rep, options.truth ? std::optional<double>(options.truth->taylor_coefficient(n))
                                                 : std::nullopt);
        report.orders.push_back(std::move(rep));
    }
    return report;
}

}  // namespace nlkg
