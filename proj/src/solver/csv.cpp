#include <cstdio>
#include <string>

#include "mcpert/errors.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const std::size_t d = tr.states.empty() ? 0 : tr.states.front().size();
  os << 't';
  for (std::size_t k = 0; k < d; ++k) os << ",p_" << k;
  os << '\n';
  for (std::size_t r = 0; r < tr.size(); ++r) {
    os << format_double(tr.times[r]);
    for (double v : tr.states[r]) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_mean_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,mean\n";
  for (std::size_t r = 0; r < tr.size(); ++r)
    os << format_double(tr.times[r]) << ',' << format_double(mean_of(tr.states[r])) << '\n';
}

void write_states_csv(std::ostream& os, const Trajectory& tr, const std::vector<std::size_t>& states) {
  const std::size_t d = tr.states.empty() ? 0 : tr.states.front().size();
  for (std::size_t k : states)
    if (k >= d) throw ValidationError("state " + std::to_string(k) + " is outside the trajectory");
  os << 't';
  for (std::size_t k : states) os << ",p_" << k;
  os << '\n';
  for (std::size_t r = 0; r < tr.size(); ++r) {
    os << format_double(tr.times[r]);
    for (std::size_t k : states) os << ',' << format_double(tr.states[r][k]);
    os << '\n';
  }
}

}  // namespace mcpert
