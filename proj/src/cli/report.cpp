#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "mcpert/report.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

void Report::put(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries_.emplace_back(key, std::move(value));
}

void Report::set(const std::string& key, double value) { put(key, format_double(value)); }
void Report::set(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
void Report::set(const std::string& key, bool value) { put(key, value ? "true" : "false"); }
void Report::set(const std::string& key, const std::string& value) { put(key, value); }

std::optional<std::string> Report::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

double Report::number(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw std::out_of_range("report has no key " + key);
  double x = 0.0;
  const char* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, x);
  if (ec != std::errc() || ptr != end) throw std::out_of_range("report key " + key + " is not numeric");
  return x;
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (const auto& [k, v] : other.entries_) put(prefix + "." + k, v);
}

std::string Report::to_kv() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::string Report::to_human() const {
  std::size_t width = 0;
  std::vector<std::string> groups;
  for (const auto& [k, v] : entries_) {
    width = std::max(width, k.size());
    const std::string g = k.substr(0, k.find('.'));
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    os << (i ? "\n" : "") << groups[i] << '\n';
    for (const auto& [k, v] : entries_)
      if (k.substr(0, k.find('.')) == groups[i]) os << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
  return os.str();
}

Report parse_report(const std::string& text) {
  Report r;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    r.set(line.substr(0, eq), line.substr(eq + 3));
  }
  return r;
}

void add_certificate(Report& r, const std::string& p, const ErgodicityCertificate& c) {
  r.set(p + ".approach", std::string(to_string(c.approach)));
  r.set(p + ".certified", c.certified);
  if (!c.certified) {
    r.set(p + ".reason", c.reason);
    return;
  }
  r.set(p + ".period", c.period);
  if (c.approach == Approach::weighted) {
    r.set(p + ".M", c.M);
    r.set(p + ".a", c.a);
    r.set(p + ".alpha_star", c.alpha_star);
    r.set(p + ".K_star", c.K_star);
    r.set(p + ".K_osc", c.K_osc);
    r.set(p + ".d", c.d);
    r.set(p + ".W", c.W);
    r.set(p + ".norm_D", c.norm_D);
    r.set(p + ".B_sup", c.B_sup);
    r.set(p + ".f_sup", c.f_sup);
    r.set(p + ".L", c.L);
    r.set(p + ".grid", c.grid);
    r.set(p + ".B_grid_delta", c.B_grid_delta);
    r.set(p + ".f_grid_delta", c.f_grid_delta);
  } else {
    r.set(p + ".c", c.c);
    r.set(p + ".b", c.b);
    r.set(p + ".beta_mean", c.beta_mean);
    r.set(p + ".K_osc", c.K_osc);
    r.set(p + ".L", c.L);
    r.set(p + ".grid", c.grid);
  }
}

void add_gaps(Report& r, const std::string& p, const PerturbationGaps& g) {
  r.set(p + ".A", g.A);
  r.set(p + ".weighted", g.weighted);
  if (g.weighted) {
    r.set(p + ".B", g.B);
    r.set(p + ".f", g.f);
  }
  r.set(p + ".grid", g.grid);
  r.set(p + ".grid_delta", g.grid_delta);
  if (g.rate_eps) {
    r.set(p + ".rate_eps", *g.rate_eps);
    if (g.weighted && *g.rate_eps > 0.0) {
      r.set(p + ".B_over_eps", g.B_over_eps);
      r.set(p + ".f_over_eps", g.f_over_eps);
      r.set(p + ".B_within_5eps", g.B_within_5eps);
      r.set(p + ".f_within_5eps", g.f_within_5eps);
    }
  }
}

void add_bounds(Report& r, const std::string& p, const BoundReport& b) {
  r.set(p + ".epsilon", b.epsilon);
  r.set(p + ".uniform.available", b.uniform_available);
  if (b.uniform_available) {
    r.set(p + ".uniform.tv", b.uniform_tv);
    r.set(p + ".uniform.c_below_2", b.uniform_c_below_2);
    if (b.uniform_mean_available) r.set(p + ".uniform.mean", b.uniform_mean);
  } else {
    r.set(p + ".uniform.reason", b.uniform_reason);
  }
  r.set(p + ".weighted.available", b.weighted_available);
  if (b.weighted_available) {
    r.set(p + ".weighted.feasible", b.weighted_feasible);
    r.set(p + ".weighted.critical_gap_B", b.gap_B_critical);
    r.set(p + ".weighted.eps_max", b.eps_max);
    if (b.weighted_feasible) {
      r.set(p + ".weighted.bound_1D", b.weighted_1D);
      r.set(p + ".weighted.tv", b.weighted_tv);
      if (b.weighted_mean_available) r.set(p + ".weighted.mean", b.weighted_mean);
    }
  }
  if (!b.weighted_feasible) r.set(p + ".weighted.reason", b.weighted_reason);
  r.set(p + ".smaller", b.smaller);
}

}  // namespace mcpert
