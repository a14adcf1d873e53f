#pragma once

// Scenario files: line-oriented `[section]` headers with `key = value` pairs.
//
//   [chain]         class, states | truncation, period, L, label, grid, base,
//                   <family>, <family>.multipliers, <family>.first,
//                   <family>.tail, transition (repeatable)
//   [weights]       kind = unit | geometric | list, delta, values
//   [perturbation]  mode, epsilon, draws, seed, clamp_at_zero, <family>
//   [solve]         t_end, step, stride, initial, tolerance, max_horizon,
//                   limit_start, samples_per_period, states, probe_levels,
//                   probe_epsilon
//   [outputs]       dir, prefix, trajectories, means, limit, distance, report
//
// Families are births, deaths, arrivals, services and catastrophes. A family
// value is a quoted rate ("2+sin(2*pi*t)") shared by every index, or a list
// of quoted rates, one per index. Multipliers are `k`, `min(k, c)` or a list
// of numbers. Comments start with `#` outside quotes.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcpert/analysis.hpp"
#include "mcpert/model.hpp"

namespace mcpert {

struct FamilyConfig {
  enum class Multipliers { none, index, capped_index, list };

  std::vector<std::string> rates;
  bool listed = false;
  Multipliers multipliers = Multipliers::none;
  double cap = 0.0;
  std::vector<double> multiplier_list;
  std::optional<std::size_t> first;
  std::optional<bool> tail_zero;

  friend bool operator==(const FamilyConfig&, const FamilyConfig&) = default;
};

struct TransitionConfig {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string rate;

  friend bool operator==(const TransitionConfig&, const TransitionConfig&) = default;
};

struct ChainConfig {
  std::string chain_class = "I";
  std::string base;  ///< class V: I..IV, or "transitions"
  std::size_t top = 0;
  bool truncated = false;
  std::optional<double> period;
  std::optional<double> L;
  std::string label;
  std::size_t grid = 4096;
  std::map<std::string, FamilyConfig> families;
  std::vector<TransitionConfig> transitions;

  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

struct WeightsConfig {
  std::string kind = "unit";
  double delta = 1.0;
  std::vector<double> values;

  friend bool operator==(const WeightsConfig&, const WeightsConfig&) = default;
};

struct PerturbationConfig {
  std::string mode = "none";
  double epsilon = 0.0;
  std::size_t draws = 1;
  std::uint64_t seed = 20240601;
  bool clamp_at_zero = false;
  std::map<std::string, std::vector<double>> offsets;

  friend bool operator==(const PerturbationConfig&, const PerturbationConfig&) = default;
};

struct SolveConfig {
  double t_end = 20.0;
  std::optional<double> step;
  double stride = 0.01;
  std::vector<std::size_t> initial;  ///< empty: states 0 and n
  double tolerance = 1e-6;
  double max_horizon = 1000.0;
  std::optional<double> limit_start;
  std::size_t samples_per_period = 100;
  std::vector<std::size_t> states;  ///< limit-interval probabilities to export
  std::vector<std::size_t> probe_levels;
  double probe_epsilon = 0.1;

  friend bool operator==(const SolveConfig&, const SolveConfig&) = default;
};

struct OutputsConfig {
  std::string dir = ".";
  std::string prefix;
  bool trajectories = false;
  bool means = true;
  bool limit = true;
  bool distance = true;
  bool report = true;

  friend bool operator==(const OutputsConfig&, const OutputsConfig&) = default;
};

struct Scenario {
  std::string name;
  ChainConfig chain;
  std::optional<WeightsConfig> weights;
  std::optional<PerturbationConfig> perturbation;
  std::optional<SolveConfig> solve;
  OutputsConfig outputs;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ParseError for malformed text, ValidationError for unknown or
/// inconsistent keys. Messages name the section and key.
Scenario parse_scenario(std::string_view text, std::string name = "scenario");
Scenario load_scenario(const std::string& path);

/// Every field written explicitly; parse_scenario(to_canonical(s)) == s.
std::string to_canonical(const Scenario& s);

ChainSpec build_chain(const Scenario& s);
/// Weights for states 1..n; unit weights when the section is absent.
WeightSequence build_weights(const Scenario& s, std::size_t n);
/// One perturbation per draw. Random offsets in [-eps, eps] when the mode is
/// `offsets` without explicit lists.
std::vector<Perturbation> build_perturbations(const Scenario& s, const ChainSpec& spec);

}  // namespace mcpert
