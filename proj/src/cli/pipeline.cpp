#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "mcpert/bounds.hpp"
#include "mcpert/errors.hpp"
#include "mcpert/kernels.hpp"
#include "mcpert/pipeline.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

int soundness_exit_code(double measured, double bound) {
  return measured <= bound * (1.0 + 1e-6) ? exit_code::ok : exit_code::violation;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return exit_code::parse;
  if (dynamic_cast<const InfeasibleError*>(&e)) return exit_code::infeasible;
  if (dynamic_cast<const Error*>(&e)) return exit_code::validation;
  return exit_code::usage;
}

namespace {

int worse(int a, int b) {
  auto rank = [](int c) { return c == exit_code::ok ? 0 : c == exit_code::infeasible ? 1 : 2; };
  return rank(b) > rank(a) ? b : a;
}

std::string stem_of(const std::string& name) {
  const auto dot = name.rfind(".scn");
  return dot == std::string::npos ? name : name.substr(0, dot);
}

class Artifacts {
public:
  Artifacts(const Scenario& s, bool enabled, std::vector<std::string>& list)
      : dir_(s.outputs.dir), prefix_(s.outputs.prefix.empty() ? stem_of(s.name) : s.outputs.prefix),
        enabled_(enabled), list_(list) {}

  template <class F>
  void write(const std::string& suffix, F&& body) {
    if (!enabled_) return;
    std::filesystem::create_directories(dir_);
    const std::string path = (std::filesystem::path(dir_) / (prefix_ + "_" + suffix)).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    body(out);
    if (!out) throw std::runtime_error("write failed for " + path);
    list_.push_back(path);
  }

private:
  std::string dir_;
  std::string prefix_;
  bool enabled_;
  std::vector<std::string>& list_;
};

struct Certificates {
  std::optional<WeightSequence> w;
  ErgodicityCertificate weighted;
  ErgodicityCertificate uniform;
};

Certificates certify(const Scenario& s, const ChainSpec& spec, Report& r) {
  Certificates c;
  c.uniform.approach = Approach::uniform;
  const CertificateOptions co{s.chain.grid};
  if (spec.chain_class() == ChainClass::V) {
    c.weighted.reason = "class V chains are certified through catastrophe intensities";
    try {
      c.uniform = uniform_certificate_classV(spec, co);
    } catch (const ValidationError& e) {
      c.uniform.reason = e.what();
    }
  } else if (spec.top() == 0) {
    c.weighted.reason = "single-state chain";
    c.uniform.reason = c.weighted.reason;
  } else {
    c.w = build_weights(s, spec.top());
    try {
      c.weighted = weighted_certificate(spec, *c.w, co);
    } catch (const ValidationError& e) {
      c.weighted.reason = e.what();
    }
    if (c.weighted.certified)
      c.uniform = uniform_from_weighted(c.weighted, *c.w);
    else
      c.uniform.reason = "no weighted certificate: " + c.weighted.reason;
  }
  add_certificate(r, "cert.weighted", c.weighted);
  add_certificate(r, "cert.uniform", c.uniform);
  return c;
}

PerturbationGaps combine(const std::vector<PerturbationGaps>& all) {
  PerturbationGaps g = all.front();
  for (const auto& x : all) {
    g.A = std::max(g.A, x.A);
    g.B = std::max(g.B, x.B);
    g.f = std::max(g.f, x.f);
    g.grid_delta = std::max(g.grid_delta, x.grid_delta);
    if (x.rate_eps && g.rate_eps) g.rate_eps = std::max(*g.rate_eps, *x.rate_eps);
    g.B_over_eps = std::max(g.B_over_eps, x.B_over_eps);
    g.f_over_eps = std::max(g.f_over_eps, x.f_over_eps);
    g.B_within_5eps = g.B_within_5eps && x.B_within_5eps;
    g.f_within_5eps = g.f_within_5eps && x.f_within_5eps;
  }
  return g;
}

struct Perturbed {
  std::vector<ChainSpec> specs;
  BoundReport bounds;
  double tv_bound = 0.0;  ///< smallest available TV bound
  bool has_bound = false;
};

Perturbed bound_stage(const Scenario& s, const ChainSpec& spec, const Certificates& certs, Command cmd, Report& r,
                      int& code) {
  Perturbed out;
  const PerturbationConfig& pc = *s.perturbation;
  const std::vector<Perturbation> draws = build_perturbations(s, spec);
  std::vector<PerturbationGaps> gaps;
  for (const auto& p : draws) {
    try {
      out.specs.push_back(perturb_spec(spec, p));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("[perturbation] mode: ") + e.what());
    }
    gaps.push_back(structured_gaps(spec, out.specs.back(), certs.w ? &*certs.w : nullptr, rate_epsilon(p),
                                   s.chain.grid));
  }
  const PerturbationGaps g = combine(gaps);
  r.set("perturbation.mode", pc.mode);
  r.set("perturbation.epsilon", pc.epsilon);
  r.set("perturbation.draws", draws.size());
  r.set("perturbation.seed", static_cast<std::size_t>(pc.seed));
  add_gaps(r, "gaps", g);

  const ErgodicityCertificate* wc = certs.weighted.certified ? &certs.weighted : nullptr;
  const ErgodicityCertificate* uc = certs.uniform.certified ? &certs.uniform : nullptr;
  out.bounds = evaluate_bounds(wc, uc, g, pc.epsilon, spec.top(), spec.space().countable);
  if (!wc) out.bounds.weighted_reason = certs.weighted.reason;
  if (!uc) out.bounds.uniform_reason = certs.uniform.reason;
  add_bounds(r, "bounds", out.bounds);
  if (uc) r.set("bounds.uniform.tv_nominal", uniform_bound(*uc, pc.epsilon));

  const BoundReport& b = out.bounds;
  const bool wf = b.weighted_available && b.weighted_feasible;
  if (b.uniform_available) out.tv_bound = b.uniform_tv;
  if (wf) out.tv_bound = b.uniform_available ? std::min(out.tv_bound, b.weighted_tv) : b.weighted_tv;
  out.has_bound = b.uniform_available || wf;
  const bool trivial = g.A == 0.0 && (!g.weighted || (g.B == 0.0 && g.f == 0.0));
  if (trivial && !out.has_bound) {
    out.has_bound = true;
    out.tv_bound = 0.0;
  }
  r.set("verdict.feasible", out.has_bound);
  if (out.has_bound) r.set("verdict.bound", out.tv_bound);
  if (!out.has_bound) code = worse(code, exit_code::infeasible);

  if (cmd == Command::compare) {
    r.set("compare.smaller", b.smaller);
    if (b.uniform_available) r.set("compare.uniform", b.uniform_tv);
    if (wf) r.set("compare.weighted", b.weighted_tv);
    if (b.uniform_available && wf && b.uniform_tv > 0.0) r.set("compare.ratio", b.weighted_tv / b.uniform_tv);
  }
  return out;
}

void probe_stage(const SolveConfig& sc, const ChainSpec& spec, Artifacts& files, Report& r) {
  if (spec.chain_class() != ChainClass::I || !spec.homogeneous() || !spec.births().is_uniform() ||
      !spec.deaths().is_uniform())
    throw ValidationError("[solve] probe_levels: the tail probe needs a homogeneous class-I chain with one "
                          "birth rate and one death rate");
  const double lambda = spec.births().eval(0, 0.0);
  const double mu = spec.deaths().eval(1, 0.0);
  const auto rows = stationary_tail_probe(lambda, mu, sc.probe_epsilon, sc.probe_levels);
  bool decreasing = true;
  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string key = "probe.level." + std::to_string(rows[i].level);
    r.set(key + ".p0", rows[i].p0);
    r.set(key + ".recursion_residual", rows[i].recursion_residual);
    if (i > 0 && !(rows[i].p0 < rows[i - 1].p0)) decreasing = false;
    table.push_back({static_cast<double>(rows[i].level), rows[i].p0, rows[i].recursion_residual});
  }
  r.set("probe.epsilon", sc.probe_epsilon);
  r.set("probe.p0_decreasing", decreasing);
  files.write("tail_probe.csv", [&](std::ostream& os) { write_table_csv(os, {"level", "p0", "residual"}, table); });

  const StationaryResult base = stationary_distribution(spec);
  const ChainSpec scaled =
      perturb_spec(spec, Perturbation{PerturbationMode::multiplicative, sc.probe_epsilon, {}, false});
  const StationaryResult pert = stationary_distribution(scaled);
  r.set("probe.multiplicative.distance", kernels::l1_distance(base.p, pert.p));
}

void solve_stage(const Scenario& s, const ChainSpec& spec, const Perturbed* perturbed, Artifacts& files,
                 Report& r, int& code) {
  const SolveConfig& sc = *s.solve;
  const double step = sc.step.value_or(default_step(spec));
  const double P = spec.period().value_or(1.0);
  r.set("solve.step", step);
  r.set("solve.t_end", sc.t_end);

  std::vector<std::size_t> initial = sc.initial;
  if (initial.empty()) initial = spec.top() > 0 ? std::vector<std::size_t>{0, spec.top()} : std::vector<std::size_t>{0};
  for (std::size_t k : initial)
    if (k >= spec.dim()) throw ValidationError("[solve] initial: state " + std::to_string(k) + " is outside 0.." +
                                               std::to_string(spec.top()));

  IntegrateOptions io;
  io.step = step;
  io.stride = sc.stride;
  std::vector<Trajectory> trs;
  for (std::size_t k : initial) {
    io.initial = "state " + std::to_string(k);
    trs.push_back(integrate(spec, ProbabilityVector{0.0, delta_vector(spec.dim(), k)}, sc.t_end, io));
    const Trajectory& tr = trs.back();
    r.set("empirical.mean_end.from_" + std::to_string(k), mean_of(tr.states.back()));
    if (s.outputs.means)
      files.write("mean_from_" + std::to_string(k) + ".csv", [&](std::ostream& os) { write_mean_csv(os, tr); });
    if (s.outputs.trajectories)
      files.write("trajectory_from_" + std::to_string(k) + ".csv",
                  [&](std::ostream& os) { write_trajectory_csv(os, tr); });
  }
  if (trs.size() >= 2) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < trs[0].size(); ++i)
      rows.push_back({trs[0].times[i], kernels::l1_distance(trs[0].states[i], trs[1].states[i])});
    r.set("empirical.decay.final", rows.back()[1]);
    if (s.outputs.distance)
      files.write("decay.csv", [&](std::ostream& os) { write_table_csv(os, {"t", "distance"}, rows); });
  }

  std::optional<double> horizon_T;
  if (spec.top() > 0) {
    RegimeOptions ro;
    ro.tolerance = sc.tolerance;
    ro.max_horizon = sc.max_horizon;
    ro.min_horizon = sc.limit_start.value_or(0.0);
    ro.step = step;
    ro.samples_per_period = sc.samples_per_period;
    try {
      const RegimeReport reg = limiting_regime(spec, ro);
      horizon_T = reg.horizon;
      r.set("empirical.regime.reached", true);
      r.set("empirical.regime.T", reg.horizon);
      r.set("empirical.regime.period", reg.period);
      r.set("empirical.regime.distance_at_T", reg.boundary_distances.back());
      r.set("empirical.regime.phi_min", reg.phi_min);
      r.set("empirical.regime.phi_max", reg.phi_max);
      if (s.outputs.limit) {
        files.write("limit.csv", [&](std::ostream& os) {
          if (sc.states.empty())
            write_trajectory_csv(os, reg.limit);
          else
            write_states_csv(os, reg.limit, sc.states);
        });
        files.write("phi.csv", [&](std::ostream& os) { write_mean_csv(os, reg.limit); });
      }
    } catch (const ConvergenceError& e) {
      r.set("empirical.regime.reached", false);
      r.set("empirical.regime.final_distance", e.final_distance());
    }
  }

  if (perturbed && !perturbed->specs.empty()) {
    const double horizon = horizon_T ? std::max(sc.t_end, *horizon_T + P) : sc.t_end;
    IntegrateOptions po;
    po.stride = sc.stride;
    po.step = step;
    for (const auto& ps : perturbed->specs) po.step = std::min(*po.step, default_step(ps));
    double measured = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < perturbed->specs.size(); ++i) {
      const PerturbationDistance d = empirical_perturbation_distance(
          spec, perturbed->specs[i], ProbabilityVector{0.0, delta_vector(spec.dim(), 0)}, horizon, po);
      r.set("empirical.draw." + std::to_string(i) + ".final_period_sup", d.final_period_sup);
      measured = std::max(measured, d.final_period_sup);
      if (rows.empty())
        for (double t : d.times) rows.push_back({t});
      for (std::size_t k = 0; k < rows.size(); ++k) rows[k].push_back(d.distances[k]);
    }
    r.set("empirical.horizon", horizon);
    r.set("empirical.measured_sup", measured);
    r.set("verdict.measured", measured);
    if (s.outputs.distance) {
      std::vector<std::string> header{"t"};
      for (std::size_t i = 0; i < perturbed->specs.size(); ++i) header.push_back("d_" + std::to_string(i));
      files.write("perturbation.csv", [&](std::ostream& os) { write_table_csv(os, header, rows); });
    }
    if (perturbed->has_bound) {
      const int verdict = soundness_exit_code(measured, perturbed->tv_bound);
      r.set("verdict.sound", verdict == exit_code::ok);
      if (measured > 0.0) r.set("verdict.margin", perturbed->tv_bound / measured);
      code = worse(code, verdict);
    }
  }

  if (!sc.probe_levels.empty()) probe_stage(sc, spec, files, r);
}

}  // namespace

PipelineResult run_pipeline(Scenario s, Command cmd, const PipelineOptions& opts) {
  if (opts.grid) s.chain.grid = *opts.grid;
  if (opts.out_dir) s.outputs.dir = *opts.out_dir;
  if (opts.seed && s.perturbation) s.perturbation->seed = *opts.seed;
  if (opts.step && s.solve) s.solve->step = *opts.step;

  PipelineResult res;
  Report& r = res.report;
  Artifacts files(s, opts.write_files, res.artifacts);
  r.set("scenario.name", s.name);
  r.set("scenario.grid", s.chain.grid);
  r.set("kernels.backend", std::string(kernels::backend_name(kernels::active_backend())));

  const ChainSpec spec = build_chain(s);
  r.set("chain.class", std::string(to_string(spec.chain_class())));
  r.set("chain.top", spec.top());
  r.set("chain.countable", spec.space().countable);
  r.set("chain.L", spec.L());
  r.set("chain.period", spec.period() ? format_double(*spec.period()) : std::string("none"));
  r.set("chain.homogeneous", spec.homogeneous());

  const Certificates certs = certify(s, spec, r);
  if (cmd == Command::analyze) return res;

  std::optional<Perturbed> perturbed;
  if (s.perturbation) {
    perturbed = bound_stage(s, spec, certs, cmd, r, res.exit_code);
  } else if (cmd != Command::run) {
    throw ValidationError("[perturbation]: missing section, needed for bounds");
  }

  if (cmd == Command::run) {
    if (!s.solve) throw ValidationError("[solve]: missing section, needed for run");
    solve_stage(s, spec, perturbed ? &*perturbed : nullptr, files, r, res.exit_code);
  }
  r.set("verdict.exit_code", static_cast<std::size_t>(res.exit_code));
  if (s.outputs.report) {
    files.write("report.kv", [&](std::ostream& os) { os << r.to_kv(); });
    files.write("report.txt", [&](std::ostream& os) { os << r.to_human(); });
  }
  return res;
}

PipelineResult reproduce(std::string_view id, const PipelineOptions& opts) {
  std::vector<std::string> names;
  if (id == "1")
    names = {"mtmtnn.scn", "mtmtnn_half.scn"};
  else if (id == "2")
    names = {"pair_arrivals.scn"};
  else if (id == "counterexample")
    names = {"counterexample.scn"};
  else
    throw std::invalid_argument("unknown example '" + std::string(id) + "' (expected 1, 2 or counterexample)");

  PipelineResult out;
  for (const auto& name : names) {
    const auto text = bundled_scenario(name);
    if (!text) throw std::runtime_error("bundled scenario " + name + " is missing");
    PipelineResult one = run_pipeline(parse_scenario(*text, name), Command::run, opts);
    out.report.merge(one.report, stem_of(name));
    out.artifacts.insert(out.artifacts.end(), one.artifacts.begin(), one.artifacts.end());
    out.exit_code = worse(out.exit_code, one.exit_code);
  }
  return out;
}

}  // namespace mcpert
