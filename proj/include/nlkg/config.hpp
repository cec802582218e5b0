#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlkg/nonlinearity.hpp"
#include "nlkg/probes.hpp"
#include "nlkg/reconstruction.hpp"
#include "nlkg/scattering.hpp"
#include "json.hpp"

namespace nlkg {

struct GridConfig {
    int points = 32;
    double box_length = 16.0;
};

struct WindowConfig {
    double half_width = 6.0;
    int steps = 48;
};

struct NonlinearityConfig {
    // "polynomial" | "exponential" | "zero"
    std::string type = "polynomial";
    // P(y) coefficients for N(y) = P(y) y^3.
    std::vector<double> coefficients{1.0};
    double c1 = 1.0;
    double c2 = 1.0;
    int max_derivative_order = Nonlinearity::kDefaultMaxOrder;
};

struct ProbeConfig {
    // "gaussian" | "random"
    std::string type = "gaussian";
    GaussianProbe gaussian;
    RandomProbe random;
    // Random probes take their seed from the run seed unless set here.
    std::optional<std::uint64_t> seed;
};

struct LambdaConfig {
    // Explicit grid; takes precedence over base/count.
    std::vector<double> values;
    // Geometric grid base; <= 0 selects the default from the amplitude guard.
    double base = 0.0;
    int count = 5;
};

struct ReconstructionConfig {
    int max_order = 5;
    // "recursive" | "known_lower"
    std::string mode = "recursive";
    // known_lower: the order to reconstruct (defaults to max_order).
    std::optional<int> order;
    // known_lower: y3..y_{N-2}; empty means take them from the nonlinearity.
    std::vector<double> known;
    bool blind = false;
    double moment_floor_scale = 1e-6;
};

struct GateauxConfig {
    std::vector<int> orders{1, 2, 3};
};

struct RunConfig {
    GridConfig grid;
    WindowConfig window;
    NonlinearityConfig nonlinearity;
    ProbeConfig probe;
    std::map<int, ProbeConfig> order_probes;
    LambdaConfig lambda;
    SolverOptions solver{1e-11, 200, 1.0, 10};
    ReconstructionConfig reconstruction;
    GateauxConfig gateaux;
    std::uint64_t seed = 0;
};

// Parse a YAML document (JSON is accepted as the same schema). Unknown keys,
// wrong types and out-of-range values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Fully resolved config, every default written out.
nlohmann::json to_json(const RunConfig& config);

GridPtr make_grid(const RunConfig& config);
TimeWindow make_window(const RunConfig& config);
Nonlinearity make_nonlinearity(const RunConfig& config);
StateH make_probe(const GridPtr& grid, const ProbeConfig& probe, std::uint64_t run_seed);
// Probe used at `order`: the per-order override if present, else the default.
NamedProbe probe_for_order(const RunConfig& config, const GridPtr& grid, int order);
// Explicit values, or a geometric grid from `base`, or the default base for `reference`.
std::vector<double> make_lambda_grid(const RunConfig& config, const StateH& reference, int max_order);

}  // namespace nlkg
