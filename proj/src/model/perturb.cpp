#include <algorithm>
#include <limits>
#include <string>

#include "mcpert/errors.hpp"
#include "mcpert/model.hpp"

namespace mcpert {

namespace {

struct FamilyRange {
  std::size_t first;
  std::size_t last;  // inclusive; first > last means empty
};

// In-range indices [first, last] a class uses for each family slot.
FamilyRange births_range(std::size_t n) { return {0, n == 0 ? 0 : n - 1}; }
FamilyRange upper_range(std::size_t n) { return {1, n}; }

// Number of offset entries that cover the in-range support of `fam`.
std::size_t offset_count(const RateFamily& fam, FamilyRange r) {
  if (fam.is_zero() || r.first > r.last) return 0;
  const std::size_t first = std::max(r.first, fam.first_index());
  if (first > r.last) return 0;
  std::size_t count = r.last - fam.first_index() + 1;
  if (!fam.is_uniform()) count = std::min(count, fam.table_size());
  return count;
}

}  // namespace

std::string_view to_string(PerturbationMode m) {
  switch (m) {
    case PerturbationMode::none:
      return "none";
    case PerturbationMode::uniform:
      return "uniform";
    case PerturbationMode::offsets:
      return "offsets";
    case PerturbationMode::mass_arrival:
      return "mass_arrival";
    case PerturbationMode::multiplicative:
      return "multiplicative";
  }
  return "?";
}

PerturbationMode perturbation_mode_from_string(std::string_view s) {
  if (s == "none") return PerturbationMode::none;
  if (s == "uniform") return PerturbationMode::uniform;
  if (s == "offsets") return PerturbationMode::offsets;
  if (s == "mass_arrival") return PerturbationMode::mass_arrival;
  if (s == "multiplicative") return PerturbationMode::multiplicative;
  throw ValidationError("unknown perturbation mode '" + std::string(s) +
                        "' (expected none, uniform, offsets, mass_arrival or multiplicative)");
}

ChainSpec perturb_spec(const ChainSpec& spec, const Perturbation& pert) {
  if (!(pert.epsilon >= 0.0)) throw ValidationError("perturbation epsilon must be nonnegative");
  ChainSpec out = spec;
  const std::size_t n = spec.top();

  switch (pert.mode) {
    case PerturbationMode::none:
      return out;
    case PerturbationMode::uniform:
    case PerturbationMode::offsets: {
      RateOffsets offs = pert.offsets;
      if (offs.empty()) {
        if (pert.mode == PerturbationMode::offsets) throw ValidationError("offsets mode needs explicit offsets");
        // Shift every rate in use by +epsilon.
        auto fill = [&](std::vector<double>& v, const RateFamily& fam, FamilyRange r) {
          v.assign(offset_count(fam, r), pert.epsilon);
        };
        fill(offs.births, spec.births(), births_range(n));
        fill(offs.deaths, spec.deaths(), upper_range(n));
        fill(offs.arrivals, spec.arrivals(), upper_range(n));
        fill(offs.services, spec.services(), upper_range(n));
        fill(offs.catastrophes, spec.catastrophes(), upper_range(n));
      }
      auto apply = [&](RateFamily& fam, const std::vector<double>& v, const char* what) {
        if (v.empty()) return;
        if (fam.is_zero()) throw ValidationError(std::string("offsets given for unused ") + what + " rates");
        fam = fam.with_offsets(v, pert.clamp_at_zero);
      };
      apply(out.births_, offs.births, "birth");
      apply(out.deaths_, offs.deaths, "death");
      apply(out.arrivals_, offs.arrivals, "group-arrival");
      apply(out.services_, offs.services, "group-service");
      apply(out.catastrophes_, offs.catastrophes, "catastrophe");
      break;
    }
    case PerturbationMode::mass_arrival: {
      if (pert.epsilon == 0.0 || n == 0) return out;
      const double eps = pert.epsilon;
      for (std::size_t k = 1; k < n; ++k)
        out.extra_.push_back({0, k, RateFunction::constant(eps / (static_cast<double>(k) * static_cast<double>(k + 1))), 1.0});
      out.extra_.push_back({0, n, RateFunction::constant(eps / static_cast<double>(n)), 1.0});
      break;
    }
    case PerturbationMode::multiplicative: {
      const double f = 1.0 + pert.epsilon;
      for (RateFamily* fam : {&out.births_, &out.deaths_, &out.arrivals_, &out.services_, &out.catastrophes_})
        *fam = fam->scaled_by(f);
      for (auto& tr : out.extra_) tr.scale *= f;
      break;
    }
  }

  BuildOptions opts;
  opts.grid_samples = spec.grid_samples();
  opts.label = spec.label();
  try {
    out.finalize(opts);
  } catch (const EvaluationError& e) {
    throw ValidationError(std::string("perturbation would make a rate negative: ") + e.what());
  }
  return out;
}

RateOffsets random_offsets(const ChainSpec& spec, double magnitude, std::mt19937_64& rng) {
  if (!(magnitude >= 0.0)) throw ValidationError("offset magnitude must be nonnegative");
  std::uniform_real_distribution<double> draw(-magnitude, magnitude);
  const std::size_t n = spec.top();
  RateOffsets out;
  auto fill = [&](std::vector<double>& v, const RateFamily& fam, FamilyRange r) {
    v.resize(offset_count(fam, r));
    for (double& x : v) x = magnitude == 0.0 ? 0.0 : draw(rng);
  };
  fill(out.births, spec.births(), births_range(n));
  fill(out.deaths, spec.deaths(), upper_range(n));
  fill(out.arrivals, spec.arrivals(), upper_range(n));
  fill(out.services, spec.services(), upper_range(n));
  fill(out.catastrophes, spec.catastrophes(), upper_range(n));
  return out;
}

}  // namespace mcpert
