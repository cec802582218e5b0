#include "nlkg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlkg/errors.hpp"
#include "nlkg/gateaux.hpp"
#include "nlkg/probes.hpp"
#include "nlkg/scattering.hpp"
#include "nlkg/term_algebra.hpp"

namespace nlkg {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void write_series(const fs::path& path, const RunConfig& config, const std::string& columns,
                  const std::vector<std::pair<double, double>>& points) {
    std::ostringstream os;
    os << "# config: " << to_json(config).dump() << "\n";
    os << "# " << columns << "\n";
    for (const auto& [x, y] : points) os << fmt(x) << " " << fmt(y) << "\n";
    write_file(path, os.str());
}

json diagnostics_json(const SolveDiagnostics& d) {
    return json{{"iterations", d.iterations},
                {"final_residual", d.final_residual},
                {"converged", d.converged},
                {"residual_history", d.residual_history}};
}

json state_json(const StateH& s) { return json{{"f", s.f.values()}, {"g", s.g.values()}}; }

int effective_max_order(const RunConfig& c) { return c.reconstruction.max_order; }

std::vector<double> taylor_range(const Nonlinearity& spec, int from, int to) {
    std::vector<double> out;
    for (int k = from; k <= to; ++k) out.push_back(spec.taylor_coefficient(k));
    return out;
}

fs::path prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

}  // namespace

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.seed) config.seed = *o.seed;
    if (o.blind) config.reconstruction.blind = true;
    if (o.order) {
        if (*o.order < 1) throw ConfigError("--order: must be >= 1");
        if (config.reconstruction.mode == "known_lower") {
            config.reconstruction.order = *o.order;
        } else {
            config.reconstruction.max_order = std::max(3, *o.order);
        }
        config.gateaux.orders = {*o.order};
    }
}

std::string expand_text(int order, ExpandKind kind) {
    if (order < 3) throw InvalidInput("expand: order must be >= 3");
    switch (kind) {
        case ExpandKind::W:
            return order < 5 ? std::string("0") : build_W(order).to_string();
        case ExpandKind::WTilde:
            return build_W_tilde(order).to_string();
        case ExpandKind::Cubic:
            return build_cubic_W(order).to_string();
    }
    return {};
}

SimulateResult run_simulate(const RunConfig& config) {
    const auto grid = make_grid(config);
    const auto window = make_window(config);
    const auto spec = make_nonlinearity(config);
    const StateH phi = make_probe(grid, config.probe, config.seed);
    const auto lambdas = make_lambda_grid(config, phi, effective_max_order(config));

    SimulateResult result;
    json runs = json::array();
    std::string failure;
    for (double lambda : lambdas) {
        const StateH scaled = lambda * phi;
        json run{{"lambda", lambda}};
        try {
            const Solution sol = solve(scaled, spec, window, config.solver);
            const StateH plus = scattering_output(sol.u, scaled, spec);
            run["K"] = pairing_spacetime(nonlinear_forcing(spec, sol.u), phi);
            run["scattering_gap"] = energy_norm(plus - scaled);
            run["phi_plus"] = state_json(plus);
            run["diagnostics"] = diagnostics_json(sol.diagnostics);
        } catch (const SolverError& e) {
            run["error"] = e.what();
            run["diagnostics"] = diagnostics_json(e.diagnostics());
            if (failure.empty()) failure = e.what();
            result.exit_code = kExitSolver;
        }
        runs.push_back(std::move(run));
    }
    result.payload = json{{"config", to_json(config)},
                          {"nonlinearity", spec.describe()},
                          {"probe", {{"energy_norm", energy_norm(phi)}, {"phi_minus", state_json(phi)}}},
                          {"lambdas", lambdas},
                          {"runs", runs},
                          {"status", failure.empty() ? "ok" : "solver_failure"}};
    if (!failure.empty()) result.payload["error"] = failure;
    return result;
}

ReconstructResult run_reconstruct(const RunConfig& config) {
    const auto grid = make_grid(config);
    const auto window = make_window(config);
    const auto spec = make_nonlinearity(config);
    const auto& rc = config.reconstruction;
    const KSource source = solver_K_source(spec, window, config.solver);
    ReconstructionOptions base{config.solver, rc.moment_floor_scale};

    ReconstructResult result;
    result.mode = rc.mode;
    if (rc.mode == "known_lower") {
        const int order = rc.order.value_or(rc.max_order);
        std::vector<double> known = rc.known;
        if (order >= 5 && known.empty()) {
            if (rc.blind) throw ConfigError("reconstruction.known: required for blind known_lower runs");
            known = taylor_range(spec, 3, order - 2);
        }
        const NamedProbe probe = probe_for_order(config, grid, order);
        result.report.lambdas = make_lambda_grid(config, probe.state, order);
        OrderReport rep;
        rep.order = order;
        rep.probe_id = probe.id;
        try {
            rep.moment = moment(probe.state, order, window);
            rep.estimates =
                reconstruct_known_lower(order, probe.state, result.report.lambdas, known, source, window, base);
        } catch (const ProbeRejected& e) {
            result.report.complete = false;
            result.report.failed_order = order;
            result.report.failure_kind = "probe";
            result.report.failure = e.what();
        } catch (const SolverError& e) {
            result.report.complete = false;
            result.report.failed_order = order;
            result.report.failure_kind = "solver";
            result.report.failure = e.what();
        }
        if (result.report.complete) {
            finalize_order_report(rep, rc.blind ? std::nullopt : std::optional<double>(spec.taylor_coefficient(order)));
            result.report.orders.push_back(std::move(rep));
        }
    } else {
        std::map<int, NamedProbe> probes;
        const StateH* reference = nullptr;
        for (int n = 3; n <= rc.max_order; ++n) {
            probes.emplace(n, probe_for_order(config, grid, n));
        }
        for (const auto& [n, p] : probes) {
            if (reference == nullptr || energy_norm(p.state) > energy_norm(*reference)) reference = &p.state;
        }
        const auto lambdas = make_lambda_grid(config, *reference, rc.max_order);
        CascadeOptions opts{base, std::nullopt};
        if (!rc.blind) opts.truth = spec;
        result.report = reconstruct_recursive(rc.max_order, probes, lambdas, source, window, opts);
    }
    if (!result.report.complete) {
        result.exit_code = result.report.failure_kind == "probe" ? kExitProbe : kExitSolver;
    }
    return result;
}

GateauxResult run_gateaux(const RunConfig& config) {
    const auto grid = make_grid(config);
    const auto window = make_window(config);
    const auto spec = make_nonlinearity(config);
    const StateH phi = make_probe(grid, config.probe, config.seed);
    if (config.gateaux.orders.empty()) throw ConfigError("gateaux.orders: empty");
    const int top = *std::max_element(config.gateaux.orders.begin(), config.gateaux.orders.end());

    GateauxResult result;
    result.lambdas = make_lambda_grid(config, phi, top);
    for (int order : config.gateaux.orders) {
        GateauxOrder go;
        go.order = order;
        const StateH formula = gateaux_formula(order, phi, spec, window);
        try {
            for (double lambda : result.lambdas) {
                const StateH numeric = gateaux_numeric(order, phi, spec, window, lambda, config.solver);
                go.rows.push_back({order, lambda, energy_norm(formula), energy_norm(numeric),
                                   energy_norm(numeric - formula)});
            }
        } catch (const SolverError& e) {
            result.exit_code = kExitSolver;
            result.failure = e.what();
            result.orders.push_back(std::move(go));
            return result;
        }
        std::vector<double> ls;
        std::vector<double> errs;
        for (const auto& r : go.rows) {
            ls.push_back(r.lambda);
            errs.push_back(r.error);
        }
        const bool positive = std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; });
        if (ls.size() >= 3 && positive) go.slope = fit_rate(ls, errs).slope;
        result.orders.push_back(std::move(go));
    }
    return result;
}

json report_json(const RunConfig& config, const ReconstructResult& result) {
    const bool blind = config.reconstruction.blind;
    const auto& report = result.report;
    json orders = json::array();
    for (const auto& o : report.orders) {
        json ests = json::array();
        for (std::size_t i = 0; i < o.estimates.size(); ++i) {
            const auto& e = o.estimates[i];
            json je{{"lambda", e.lambda},
                    {"difference_term", e.difference_term},
                    {"correction", e.correction},
                    {"estimate", e.value}};
            if (!blind && i < o.abs_errors.size()) je["abs_error"] = o.abs_errors[i];
            ests.push_back(std::move(je));
        }
        json jo{{"order", o.order}, {"probe", o.probe_id}, {"moment", o.moment}, {"estimates", ests}};
        if (!blind && o.truth) jo["truth"] = *o.truth;
        if (o.rate) jo["rate"] = {{"slope", o.rate->slope}, {"intercept", o.rate->intercept}, {"residual", o.rate->residual}};
        if (o.extrapolated) jo["extrapolated"] = *o.extrapolated;
        orders.push_back(std::move(jo));
    }
    json j{{"config", to_json(config)},
           {"mode", result.mode},
           {"blind", blind},
           {"lambdas", report.lambdas},
           {"complete", report.complete},
           {"orders", orders}};
    if (!report.complete) {
        j["failure"] = {{"order", report.failed_order}, {"kind", report.failure_kind}, {"message", report.failure}};
    }
    return j;
}

std::string report_csv(const ReconstructionReport& report, bool blind) {
    std::ostringstream os;
    os << (blind ? "order,lambda,estimate\n" : "order,lambda,estimate,truth,abs_error\n");
    for (const auto& o : report.orders) {
        for (std::size_t i = 0; i < o.estimates.size(); ++i) {
            const auto& e = o.estimates[i];
            os << o.order << "," << fmt(e.lambda) << "," << fmt(e.value);
            if (!blind) {
                os << "," << (o.truth ? fmt(*o.truth) : std::string()) << ","
                   << (i < o.abs_errors.size() ? fmt(o.abs_errors[i]) : std::string());
            }
            os << "\n";
        }
    }
    return os.str();
}

json gateaux_json(const RunConfig& config, const GateauxResult& result) {
    json orders = json::array();
    for (const auto& o : result.orders) {
        json rows = json::array();
        for (const auto& r : o.rows) {
            rows.push_back({{"lambda", r.lambda},
                            {"formula_norm", r.formula_norm},
                            {"numeric_norm", r.numeric_norm},
                            {"error", r.error}});
        }
        json jo{{"order", o.order}, {"rows", rows}};
        jo["slope"] = o.slope ? json(*o.slope) : json(nullptr);
        orders.push_back(std::move(jo));
    }
    json j{{"config", to_json(config)}, {"lambdas", result.lambdas}, {"orders", orders}};
    if (!result.failure.empty()) j["failure"] = result.failure;
    return j;
}

std::string gateaux_csv(const GateauxResult& result) {
    std::ostringstream os;
    os << "order,lambda,formula_norm,numeric_norm,error,slope\n";
    for (const auto& o : result.orders) {
        for (const auto& r : o.rows) {
            os << r.order << "," << fmt(r.lambda) << "," << fmt(r.formula_norm) << "," << fmt(r.numeric_norm) << ","
               << fmt(r.error) << "," << (o.slope ? fmt(*o.slope) : std::string()) << "\n";
        }
    }
    return os.str();
}

int cmd_simulate(const RunConfig& config, const fs::path& out_dir) {
    const auto result = run_simulate(config);
    write_json(prepare_dir(out_dir) / "simulation.json", result.payload);
    return result.exit_code;
}

int cmd_reconstruct(const RunConfig& config, const fs::path& out_dir) {
    const auto result = run_reconstruct(config);
    const bool blind = config.reconstruction.blind;
    prepare_dir(out_dir);
    write_json(out_dir / "reconstruction.json", report_json(config, result));
    write_file(out_dir / "reconstruction.csv", report_csv(result.report, blind));
    for (const auto& o : result.report.orders) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < o.estimates.size(); ++i) {
            const double y = blind || i >= o.abs_errors.size() ? o.estimates[i].value : o.abs_errors[i];
            pts.emplace_back(o.estimates[i].lambda, y);
        }
        const bool errors = !blind && !o.abs_errors.empty();
        write_series(out_dir / ("order" + std::to_string(o.order) + (errors ? "_error.dat" : "_estimate.dat")),
                     config, errors ? "lambda abs_error" : "lambda estimate", pts);
    }
    return result.exit_code;
}

int cmd_gateaux(const RunConfig& config, const fs::path& out_dir) {
    const auto result = run_gateaux(config);
    prepare_dir(out_dir);
    write_json(out_dir / "gateaux.json", gateaux_json(config, result));
    write_file(out_dir / "gateaux.csv", gateaux_csv(result));
    for (const auto& o : result.orders) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : o.rows) pts.emplace_back(r.lambda, r.error);
        write_series(out_dir / ("gateaux_order" + std::to_string(o.order) + ".dat"), config, "lambda error", pts);
    }
    return result.exit_code;
}

namespace {

int exit_code_for(const std::exception_ptr& ep, std::ostream& err) {
    try {
        std::rethrow_exception(ep);
    } catch (const ProbeRejected& e) {
        err << "error: " << e.what() << "\n";
        return kExitProbe;
    } catch (const SolverError& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_task(const std::string& task, const RunConfig& config, const fs::path& out_dir) {
    if (task == "simulate") return cmd_simulate(config, out_dir);
    if (task == "reconstruct") return cmd_reconstruct(config, out_dir);
    if (task == "gateaux") return cmd_gateaux(config, out_dir);
    throw ConfigError("sweep: unknown task '" + task + "'");
}

}  // namespace

int cmd_sweep(const std::vector<fs::path>& configs, const std::string& task, const Overrides& overrides,
              const fs::path& out_dir) {
    if (configs.empty()) throw ConfigError("sweep: no configs given");
    int first = kExitOk;
    json summary = json::array();
    prepare_dir(out_dir);
    for (const auto& path : configs) {
        int code = kExitOk;
        std::ostringstream err;
        try {
            RunConfig cfg = load_config(path);
            apply_overrides(cfg, overrides);
            code = run_task(task, cfg, out_dir / path.stem());
        } catch (...) {
            code = exit_code_for(std::current_exception(), err);
        }
        json entry{{"config", path.string()}, {"output", (out_dir / path.stem()).string()}, {"exit_code", code}};
        if (!err.str().empty()) entry["error"] = err.str();
        summary.push_back(std::move(entry));
        if (first == kExitOk) first = code;
    }
    write_json(out_dir / "sweep.json", json{{"task", task}, {"runs", summary}});
    return first;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlinear Klein-Gordon inverse scattering lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides overrides;
    std::optional<int> order;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config file (YAML or JSON)");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Seed for randomized probes");
    };

    int expand_order = 0;
    bool tilde = false;
    bool cubic = false;
    auto* expand = app.add_subcommand("expand", "Print the canonical correction functional W_N");
    expand->add_option("N", expand_order, "Order");
    expand->add_option("--order", order, "Order");
    expand->add_flag("--tilde", tilde, "Print W~_N instead");
    expand->add_flag("--cubic", cubic, "Print the cubic-case functional");
    auto* expand_cubic = app.add_subcommand("expand-cubic", "Print the cubic-case functional");
    expand_cubic->add_option("N", expand_order, "Order");
    expand_cubic->add_option("--order", order, "Order");

    auto* simulate = app.add_subcommand("simulate", "Solve the interaction equation on the lambda grid");
    add_common(simulate);
    auto* reconstruct = app.add_subcommand("reconstruct", "Recover Taylor coefficients from K samples");
    add_common(reconstruct);
    reconstruct->add_option("--order", order, "Highest order (recursive) or the order (known_lower)");
    reconstruct->add_flag("--blind", overrides.blind, "Omit ground-truth columns");
    std::string mode;
    reconstruct->add_option("--mode", mode, "recursive or known_lower")->check(CLI::IsMember({"recursive", "known_lower"}));
    auto* gateaux = app.add_subcommand("gateaux", "Compare numeric and closed-form Gateaux differentials");
    add_common(gateaux);
    gateaux->add_option("--order", order, "Single order to check");

    std::vector<std::string> sweep_configs;
    std::string task = "reconstruct";
    auto* sweep = app.add_subcommand("sweep", "Run a task over several configs");
    sweep->add_option("configs", sweep_configs, "Config files");
    sweep->add_option("--config", sweep_configs, "Config file (repeatable)");
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--task", task, "simulate, reconstruct or gateaux")
        ->check(CLI::IsMember({"simulate", "reconstruct", "gateaux"}));
    sweep->add_option("--order", order, "Order override");
    sweep->add_option("--seed", seed, "Seed override");
    sweep->add_flag("--blind", overrides.blind, "Omit ground-truth columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    overrides.order = order;
    overrides.seed = seed;

    try {
        if (expand->parsed() || expand_cubic->parsed()) {
            const int n = order.value_or(expand_order);
            const ExpandKind kind =
                expand_cubic->parsed() || cubic ? ExpandKind::Cubic : (tilde ? ExpandKind::WTilde : ExpandKind::W);
            out << expand_text(n, kind) << "\n";
            return kExitOk;
        }
        if (sweep->parsed()) {
            std::vector<fs::path> paths(sweep_configs.begin(), sweep_configs.end());
            return cmd_sweep(paths, task, overrides, out_dir);
        }
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!mode.empty()) cfg.reconstruction.mode = mode;
        apply_overrides(cfg, overrides);
        int code = kExitOk;
        if (simulate->parsed()) code = cmd_simulate(cfg, out_dir);
        if (reconstruct->parsed()) code = cmd_reconstruct(cfg, out_dir);
        if (gateaux->parsed()) code = cmd_gateaux(cfg, out_dir);
        if (code == kExitSolver) err << "error: interaction solve failed; see the report in " << out_dir << "\n";
        if (code == kExitProbe) err << "error: probe rejected; see the report in " << out_dir << "\n";
        return code;
    } catch (...) {
        return exit_code_for(std::current_exception(), err);
    }
}

}  // namespace nlkg
