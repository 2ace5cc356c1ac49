#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "beamgraph/config.hpp"
#include "beamgraph/simulator.hpp"

namespace beamgraph::cli {

inline constexpr const char* kVersion = "1.0.0";

// Stable exit codes for scripting.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kValidation = 2,
    kIo = 3,
    kSize = 4,
};

// Dispatches `gen`, `run`, `compare`, `oracle` and `sweep`. args[0] is the
// program name. Errors are reported on `err` and mapped to an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Empirical CDF rows (value, fraction <= value) over distinct values.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);
void write_cdf_csv(std::ostream& out, std::span<const double> values);

nlohmann::json metrics_to_json(const RunMetrics& m);

struct RunInputs {
    std::string trace_path;
    std::string gnbs_path;
    Config config;
    Method method = Method::cawbm;
    std::uint64_t seed = 0;
};

// Report for one run; wall time is left out so reports are reproducible.
nlohmann::json run_report(const RunInputs& inputs, const ZoneGrid& grid, const RunMetrics& metrics);

// Side-by-side comparison; ratios are null when undefined.
nlohmann::json compare_report(const nlohmann::json& cawbm, const nlohmann::json& dbscan, const RunMetrics& a,
                              const RunMetrics& b);

}  // namespace beamgraph::cli
