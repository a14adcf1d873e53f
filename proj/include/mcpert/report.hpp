#pragma once

// Flat key-value reports with dot-namespaced keys (`cert.uniform.c = 1196`).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcpert/analysis.hpp"
#include "mcpert/bounds.hpp"

namespace mcpert {

class Report {
public:
  /// Keys keep insertion order; setting an existing key overwrites it.
  void set(const std::string& key, double value);
  void set(const std::string& key, std::size_t value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  std::optional<std::string> get(const std::string& key) const;
  /// Throws std::out_of_range when the key is absent or not numeric.
  double number(const std::string& key) const;
  bool has(const std::string& key) const { return get(key).has_value(); }

  /// Adds every entry of `other` under `prefix.`.
  void merge(const Report& other, const std::string& prefix);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  /// One `key = value` per line.
  std::string to_kv() const;
  /// Grouped by the first key segment, values aligned.
  std::string to_human() const;

private:
  void put(const std::string& key, std::string value);
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses the to_kv form.
Report parse_report(const std::string& text);

void add_certificate(Report& r, const std::string& prefix, const ErgodicityCertificate& c);
void add_gaps(Report& r, const std::string& prefix, const PerturbationGaps& g);
void add_bounds(Report& r, const std::string& prefix, const BoundReport& b);

}  // namespace mcpert
