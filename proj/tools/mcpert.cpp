#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "mcpert/errors.hpp"
#include "mcpert/pipeline.hpp"

namespace {

struct Args {
  std::string target;
  std::size_t grid = 0;
  double step = 0.0;
  std::string out;
  std::uint64_t seed = 0;
  std::string format = "kv";
};

mcpert::PipelineOptions options_from(const Args& a, CLI::App& app, bool files_by_default) {
  mcpert::PipelineOptions o;
  if (app.count("--grid")) o.grid = a.grid;
  if (app.count("--step")) o.step = a.step;
  if (app.count("--seed")) o.seed = a.seed;
  if (app.count("--out")) o.out_dir = a.out;
  o.write_files = files_by_default || o.out_dir.has_value();
  return o;
}

int emit(const mcpert::PipelineResult& res, const Args& a) {
  std::cout << (a.format == "human" ? res.report.to_human() : res.report.to_kv());
  for (const auto& path : res.artifacts) std::cerr << "wrote " << path << '\n';
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation bounds and transient solutions for inhomogeneous Markov chains"};
  app.require_subcommand(1);
  app.fallthrough();
  Args args;
  app.add_option("--grid", args.grid, "Analysis grid samples per period")->check(CLI::PositiveNumber);
  app.add_option("--step", args.step, "Integrator step override")->check(CLI::PositiveNumber);
  app.add_option("--out", args.out, "Output directory for CSV and reports");
  app.add_option("--seed", args.seed, "Seed for random perturbation draws");
  app.add_option("--format", args.format, "Report format on stdout")->check(CLI::IsMember({"kv", "human"}));

  struct Sub {
    const char* name;
    const char* help;
    mcpert::Command cmd;
  };
  const Sub subs[] = {
      {"analyze", "Ergodicity certificates only", mcpert::Command::analyze},
      {"bounds", "Certificates and perturbation bounds", mcpert::Command::bounds},
      {"run", "Full pipeline including trajectories and empirical checks", mcpert::Command::run},
      {"compare", "Uniform and weighted bounds side by side", mcpert::Command::compare},
  };
  std::vector<std::pair<CLI::App*, mcpert::Command>> commands;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("scenario", args.target, "Scenario file or bundled scenario name")->required();
    commands.emplace_back(sub, s.cmd);
  }
  CLI::App* repro = app.add_subcommand("reproduce", "Run the bundled examples");
  repro->add_option("example", args.target, "1, 2 or counterexample")
      ->required()
      ->check(CLI::IsMember({"1", "2", "counterexample"}));
  CLI::App* canonical = app.add_subcommand("canonical", "Print a scenario in canonical form");
  canonical->add_option("scenario", args.target, "Scenario file or bundled scenario name")->required();
  app.add_subcommand("list", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mcpert::exit_code::usage;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& n : mcpert::bundled_scenario_names()) std::cout << n << '\n';
      return 0;
    }
    if (app.got_subcommand(canonical)) {
      std::cout << mcpert::to_canonical(mcpert::load_scenario_or_bundled(args.target));
      return 0;
    }
    if (app.got_subcommand(repro)) return emit(mcpert::reproduce(args.target, options_from(args, app, true)), args);
    for (const auto& [sub, cmd] : commands) {
      if (!app.got_subcommand(sub)) continue;
      const auto opts = options_from(args, app, cmd == mcpert::Command::run);
      return emit(mcpert::run_pipeline(mcpert::load_scenario_or_bundled(args.target), cmd, opts), args);
    }
  } catch (const std::exception& e) {
    std::cerr << "mcpert: " << e.what() << '\n';
    return mcpert::exit_code_for(e);
  }
  return mcpert::exit_code::usage;
}
