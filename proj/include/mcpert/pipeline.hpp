#pragma once

// Scenario pipelines behind the command-line tool.

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcpert/report.hpp"
#include "mcpert/scenario.hpp"

namespace mcpert {

enum class Command { analyze, bounds, run, compare };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;  ///< bad arguments or unreadable files
inline constexpr int parse = 2;
inline constexpr int validation = 3;  ///< also model evaluation and solver failures
inline constexpr int infeasible = 4;
inline constexpr int violation = 5;  ///< measured distance above the reported bound
}  // namespace exit_code

int exit_code_for(const std::exception& e);

/// ok when measured <= bound (1 + 1e-6), violation otherwise.
int soundness_exit_code(double measured, double bound);

struct PipelineOptions {
  std::optional<std::size_t> grid;
  std::optional<double> step;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool write_files = true;
};

struct PipelineResult {
  Report report;
  int exit_code = exit_code::ok;
  std::vector<std::string> artifacts;
};

/// analyze: certificates. bounds/compare: certificates and bounds (needs
/// [perturbation]). run: everything the present sections describe.
PipelineResult run_pipeline(Scenario s, Command cmd, const PipelineOptions& opts = {});

/// id is "1", "2" or "counterexample". Throws std::invalid_argument otherwise.
PipelineResult reproduce(std::string_view id, const PipelineOptions& opts = {});

std::vector<std::string> bundled_scenario_names();
/// Text of a bundled scenario, by file name ("mtmtnn.scn").
std::optional<std::string_view> bundled_scenario(std::string_view name);
/// A file path, or a bundled scenario name when no such file exists.
Scenario load_scenario_or_bundled(const std::string& path_or_name);

}  // namespace mcpert
