#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlkg/config.hpp"
#include "nlkg/reconstruction.hpp"
#include "json.hpp"

namespace nlkg {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSolver = 3,
    kExitProbe = 4,
};

struct Overrides {
    std::optional<int> order;
    bool blind = false;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

enum class ExpandKind { W, WTilde, Cubic };

// Canonical text of build_W / build_W_tilde / build_cubic_W. Invalid orders raise InvalidInput.
std::string expand_text(int order, ExpandKind kind);

struct SimulateResult {
    nlohmann::json payload;
    int exit_code = kExitOk;
};

// One interaction solve per lambda: K, phi_+ and solver diagnostics.
SimulateResult run_simulate(const RunConfig& config);

struct ReconstructResult {
    std::string mode;
    ReconstructionReport report;
    int exit_code = kExitOk;
};

ReconstructResult run_reconstruct(const RunConfig& config);

struct GateauxRow {
    int order = 0;
    double lambda = 0.0;
    double formula_norm = 0.0;
    double numeric_norm = 0.0;
    // ||numeric - formula||_H
    double error = 0.0;
};

struct GateauxOrder {
    int order = 0;
    std::vector<GateauxRow> rows;
    std::optional<double> slope;
};

struct GateauxResult {
    std::vector<double> lambdas;
    std::vector<GateauxOrder> orders;
    int exit_code = kExitOk;
    std::string failure;
};

GateauxResult run_gateaux(const RunConfig& config);

nlohmann::json report_json(const RunConfig& config, const ReconstructResult& result);
std::string report_csv(const ReconstructionReport& report, bool blind);
nlohmann::json gateaux_json(const RunConfig& config, const GateauxResult& result);
std::string gateaux_csv(const GateauxResult& result);

// Writers: every file carries the resolved config (CSV excepted, whose header is fixed).
int cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir);
int cmd_reconstruct(const RunConfig& config, const std::filesystem::path& out_dir);
int cmd_gateaux(const RunConfig& config, const std::filesystem::path& out_dir);
// Runs `task` on each config into out_dir/<config stem>; returns the first nonzero code.
int cmd_sweep(const std::vector<std::filesystem::path>& configs, const std::string& task,
              const Overrides& overrides, const std::filesystem::path& out_dir);

// Command-line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlkg
