#include <filesystem>

#include "mcpert/pipeline.hpp"

namespace mcpert {

namespace {

struct Bundled {
  std::string_view name;
  std::string_view text;
};

constexpr Bundled kBundled[] = {
#include "bundled_scenarios.inc"
};

}  // namespace

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> out;
  for (const auto& b : kBundled) out.emplace_back(b.name);
  return out;
}

std::optional<std::string_view> bundled_scenario(std::string_view name) {
  for (const auto& b : kBundled)
    if (b.name == name) return b.text;
  return std::nullopt;
}

Scenario load_scenario_or_bundled(const std::string& path_or_name) {
  if (std::filesystem::exists(path_or_name)) return load_scenario(path_or_name);
  if (const auto text = bundled_scenario(path_or_name)) return parse_scenario(*text, path_or_name);
  return load_scenario(path_or_name);
}

}  // namespace mcpert
