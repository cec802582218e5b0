#include "nlkg/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "nlkg/errors.hpp"

namespace nlkg {

namespace {

using json = nlohmann::json;

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T read(const YAML::Node& node, const std::string& where) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": value has the wrong type");
    }
}

template <typename T>
void read_if(const YAML::Node& parent, const char* key, T& out, const std::string& where) {
    if (const auto n = parent[key]) out = read<T>(n, where + "." + key);
}

void parse_probe(const YAML::Node& node, ProbeConfig& p, const std::string& where) {
    check_keys(node, {"type", "amplitude", "sigma", "center", "velocity_amplitude", "norm", "cutoff", "seed",
                      "with_velocity"},
               where);
    read_if(node, "type", p.type, where);
    if (p.type != "gaussian" && p.type != "random") throw ConfigError(where + ".type: expected gaussian or random");
    read_if(node, "amplitude", p.gaussian.amplitude, where);
    read_if(node, "sigma", p.gaussian.sigma, where);
    read_if(node, "velocity_amplitude", p.gaussian.velocity_amplitude, where);
    if (const auto c = node["center"]) {
        const auto xy = read<std::vector<double>>(c, where + ".center");
        if (xy.size() != 2) throw ConfigError(where + ".center: expected [x, y]");
        p.gaussian.center_x = xy[0];
        p.gaussian.center_y = xy[1];
    }
    read_if(node, "norm", p.random.norm, where);
    read_if(node, "cutoff", p.random.cutoff, where);
    read_if(node, "with_velocity", p.random.with_velocity, where);
    if (const auto s = node["seed"]) p.seed = read<std::uint64_t>(s, where + ".seed");
    if (p.type == "random" && (!(p.random.norm > 0.0) || !(p.random.cutoff > 0.0))) {
        throw ConfigError(where + ": random probe needs norm > 0 and cutoff > 0");
    }
}

json probe_json(const ProbeConfig& p) {
    json j{{"type", p.type}};
    if (p.type == "gaussian") {
        j["amplitude"] = p.gaussian.amplitude;
        j["sigma"] = p.gaussian.sigma;
        j["center"] = {p.gaussian.center_x, p.gaussian.center_y};
        j["velocity_amplitude"] = p.gaussian.velocity_amplitude;
    } else {
        j["norm"] = p.random.norm;
        j["cutoff"] = p.random.cutoff;
        j["with_velocity"] = p.random.with_velocity;
    }
    if (p.seed) j["seed"] = *p.seed;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    RunConfig cfg;
    if (!root || root.IsNull()) return cfg;
    check_keys(root,
               {"grid", "window", "nonlinearity", "probe", "probes", "lambda", "solver", "reconstruction", "gateaux",
                "seed"},
               "config");

    if (const auto g = root["grid"]) {
        check_keys(g, {"points", "box_length"}, "grid");
        read_if(g, "points", cfg.grid.points, "grid");
        read_if(g, "box_length", cfg.grid.box_length, "grid");
    }
    if (cfg.grid.points < 8 || (cfg.grid.points & (cfg.grid.points - 1)) != 0) {
        throw ConfigError("grid.points: must be a power of two >= 8");
    }
    if (!(cfg.grid.box_length > 0.0)) throw ConfigError("grid.box_length: must be positive");

    if (const auto w = root["window"]) {
        check_keys(w, {"half_width", "steps"}, "window");
        read_if(w, "half_width", cfg.window.half_width, "window");
        read_if(w, "steps", cfg.window.steps, "window");
    }
    if (!(cfg.window.half_width > 0.0)) throw ConfigError("window.half_width: must be positive");
    if (cfg.window.steps < 8 || cfg.window.steps % 2 != 0) throw ConfigError("window.steps: must be even and >= 8");

    if (const auto n = root["nonlinearity"]) {
        check_keys(n, {"type", "coefficients", "c1", "c2", "max_derivative_order"}, "nonlinearity");
        read_if(n, "type", cfg.nonlinearity.type, "nonlinearity");
        read_if(n, "coefficients", cfg.nonlinearity.coefficients, "nonlinearity");
        read_if(n, "c1", cfg.nonlinearity.c1, "nonlinearity");
        read_if(n, "c2", cfg.nonlinearity.c2, "nonlinearity");
        read_if(n, "max_derivative_order", cfg.nonlinearity.max_derivative_order, "nonlinearity");
    }
    const auto& nt = cfg.nonlinearity.type;
    if (nt != "polynomial" && nt != "exponential" && nt != "zero") {
        throw ConfigError("nonlinearity.type: expected polynomial, exponential or zero");
    }
    if (nt == "exponential" && !(cfg.nonlinearity.c2 >= 0.0)) throw ConfigError("nonlinearity.c2: must be >= 0");
    if (cfg.nonlinearity.max_derivative_order < 3) throw ConfigError("nonlinearity.max_derivative_order: must be >= 3");

    if (const auto p = root["probe"]) parse_probe(p, cfg.probe, "probe");
    if (const auto ps = root["probes"]) {
        if (!ps.IsMap()) throw ConfigError("probes: expected a mapping from order to probe");
        for (const auto& kv : ps) {
            const int order = read<int>(kv.first, "probes");
            if (order < 3) throw ConfigError("probes: order keys must be >= 3");
            ProbeConfig pc;
            parse_probe(kv.second, pc, "probes." + std::to_string(order));
            cfg.order_probes[order] = pc;
        }
    }

    if (const auto l = root["lambda"]) {
        check_keys(l, {"values", "base", "count"}, "lambda");
        read_if(l, "values", cfg.lambda.values, "lambda");
        read_if(l, "base", cfg.lambda.base, "lambda");
        read_if(l, "count", cfg.lambda.count, "lambda");
    }
    for (double v : cfg.lambda.values) {
        if (!(v > 0.0)) throw ConfigError("lambda.values: entries must be positive");
    }
    if (cfg.lambda.count < 1) throw ConfigError("lambda.count: must be >= 1");

    if (const auto s = root["solver"]) {
        check_keys(s, {"tolerance", "max_iter", "amplitude_guard", "contraction_window"}, "solver");
        read_if(s, "tolerance", cfg.solver.tolerance, "solver");
        read_if(s, "max_iter", cfg.solver.max_iter, "solver");
        read_if(s, "amplitude_guard", cfg.solver.amplitude_guard, "solver");
        read_if(s, "contraction_window", cfg.solver.contraction_window, "solver");
    }
    if (!(cfg.solver.tolerance > 0.0)) throw ConfigError("solver.tolerance: must be positive");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");

    if (const auto r = root["reconstruction"]) {
        check_keys(r, {"max_order", "mode", "order", "known", "blind", "moment_floor_scale"}, "reconstruction");
        read_if(r, "max_order", cfg.reconstruction.max_order, "reconstruction");
        read_if(r, "mode", cfg.reconstruction.mode, "reconstruction");
        if (const auto o = r["order"]) cfg.reconstruction.order = read<int>(o, "reconstruction.order");
        read_if(r, "known", cfg.reconstruction.known, "reconstruction");
        read_if(r, "blind", cfg.reconstruction.blind, "reconstruction");
        read_if(r, "moment_floor_scale", cfg.reconstruction.moment_floor_scale, "reconstruction");
    }
    const auto& rc = cfg.reconstruction;
    if (rc.mode != "recursive" && rc.mode != "known_lower") {
        throw ConfigError("reconstruction.mode: expected recursive or known_lower");
    }
    if (rc.max_order < 3) throw ConfigError("reconstruction.max_order: must be >= 3");
    if (rc.order && *rc.order < 3) throw ConfigError("reconstruction.order: must be >= 3");

    if (const auto g = root["gateaux"]) {
        check_keys(g, {"orders"}, "gateaux");
        read_if(g, "orders", cfg.gateaux.orders, "gateaux");
    }
    for (int o : cfg.gateaux.orders) {
        if (o < 1) throw ConfigError("gateaux.orders: entries must be >= 1");
    }

    read_if(root, "seed", cfg.seed, "config");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const RunConfig& c) {
    json probes = json::object();
    for (const auto& [order, p] : c.order_probes) probes[std::to_string(order)] = probe_json(p);
    json recon{{"max_order", c.reconstruction.max_order},
               {"mode", c.reconstruction.mode},
               {"known", c.reconstruction.known},
               {"blind", c.reconstruction.blind},
               {"moment_floor_scale", c.reconstruction.moment_floor_scale}};
    if (c.reconstruction.order) recon["order"] = *c.reconstruction.order;
    return json{
        {"grid", {{"points", c.grid.points}, {"box_length", c.grid.box_length}}},
        {"window", {{"half_width", c.window.half_width}, {"steps", c.window.steps}}},
        {"nonlinearity",
         {{"type", c.nonlinearity.type},
          {"coefficients", c.nonlinearity.coefficients},
          {"c1", c.nonlinearity.c1},
          {"c2", c.nonlinearity.c2},
          {"max_derivative_order", c.nonlinearity.max_derivative_order}}},
        {"probe", probe_json(c.probe)},
        {"probes", probes},
        {"lambda", {{"values", c.lambda.values}, {"base", c.lambda.base}, {"count", c.lambda.count}}},
        {"solver",
         {{"tolerance", c.solver.tolerance},
          {"max_iter", c.solver.max_iter},
          {"amplitude_guard", c.solver.amplitude_guard},
          {"contraction_window", c.solver.contraction_window}}},
        {"reconstruction", recon},
        {"gateaux", {{"orders", c.gateaux.orders}}},
        {"seed", c.seed},
    };
}

GridPtr make_grid(const RunConfig& c) { return Grid2D::create(c.grid.points, c.grid.box_length); }

TimeWindow make_window(const RunConfig& c) { return TimeWindow(c.window.half_width, c.window.steps); }

Nonlinearity make_nonlinearity(const RunConfig& c) {
    const auto& n = c.nonlinearity;
    if (n.type == "zero") return Nonlinearity(ZeroFamily{}, n.max_derivative_order);
    if (n.type == "exponential") return Nonlinearity(ExponentialFamily{n.c1, n.c2}, n.max_derivative_order);
    return Nonlinearity(PolynomialFamily{n.coefficients}, n.max_derivative_order);
}

StateH make_probe(const GridPtr& grid, const ProbeConfig& probe, std::uint64_t run_seed) {
    if (probe.type == "random") {
        RandomProbe r = probe.random;
        r.seed = probe.seed.value_or(run_seed);
        return make_random_probe(grid, r);
    }
    return make_gaussian_probe(grid, probe.gaussian);
}

NamedProbe probe_for_order(const RunConfig& c, const GridPtr& grid, int order) {
    if (auto it = c.order_probes.find(order); it != c.order_probes.end()) {
        return {"order" + std::to_string(order), make_probe(grid, it->second, c.seed)};
    }
    return {"default", make_probe(grid, c.probe, c.seed)};
}

std::vector<double> make_lambda_grid(const RunConfig& c, const StateH& reference, int max_order) {
    if (!c.lambda.values.empty()) return c.lambda.values;
    const double base = c.lambda.base > 0.0
                            ? c.lambda.base
                            : default_lambda_base(reference, max_order, c.solver.amplitude_guard > 0.0
                                                                            ? c.solver.amplitude_guard
                                                                            : 1.0);
    return geometric_lambda_grid(base, c.lambda.count);
}

}  // namespace nlkg
