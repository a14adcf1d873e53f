#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcpert/errors.hpp"
#include "mcpert/pipeline.hpp"

namespace mcpert {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSmall = R"scn(# small periodic chain
[chain]
class = I
states = 8
period = 1
births = "2*(1.5+sin(2*pi*t))"
deaths = "1"
deaths.multipliers = k

[weights]
kind = unit

[perturbation]
mode = offsets
epsilon = 0.01
draws = 5
seed = 5

[solve]
t_end = 3
stride = 0.05
initial = [0, 8]
states = [1, 2]

[outputs]
prefix = "small"
trajectories = true
)scn";

PipelineOptions no_files() {
  PipelineOptions o;
  o.write_files = false;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("mcpert_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(ScenarioParser, ReadsSections) {
  const Scenario s = parse_scenario(kSmall, "small");
  EXPECT_EQ(s.chain.chain_class, "I");
  EXPECT_EQ(s.chain.top, 8u);
  EXPECT_FALSE(s.chain.truncated);
  EXPECT_EQ(s.chain.families.at("deaths").multipliers, FamilyConfig::Multipliers::index);
  ASSERT_TRUE(s.perturbation);
  EXPECT_EQ(s.perturbation->draws, 5u);
  ASSERT_TRUE(s.solve);
  EXPECT_EQ(s.solve->initial, (std::vector<std::size_t>{0, 8}));
  EXPECT_TRUE(s.outputs.trajectories);
}

TEST(ScenarioParser, RejectsMalformedInput) {
  EXPECT_THROW(parse_scenario("[chain\nclass = I\n"), ParseError);
  EXPECT_THROW(parse_scenario("[chain]\nclass I\n"), ParseError);
  EXPECT_THROW(parse_scenario("[chain]\nbirths = \"1\n"), ParseError);
  EXPECT_THROW(parse_scenario("[chain]\nclass = I\nstates = 3\ncolour = blue\n"), ValidationError);
  EXPECT_THROW(parse_scenario("[chain]\nclass = I\nclass = II\n"), ValidationError);
  EXPECT_THROW(parse_scenario("[chain]\nstates = 3\n[chain]\nstates = 4\n"), ValidationError);
  EXPECT_THROW(parse_scenario("[colours]\nx = 1\n"), ValidationError);
  EXPECT_THROW(parse_scenario("[chain]\nstates = -3\n"), Error);
  try {
    parse_scenario("[chain]\nclass = I\nstates = 3\ncolour = blue\n");
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("[chain] colour"), std::string::npos) << e.what();
  }
}

TEST(ScenarioParser, BadRateIsAParseError) {
  const Scenario s = parse_scenario("[chain]\nclass = I\nstates = 3\nbirths = \"1 + * t\"\ndeaths = \"1\"\n");
  EXPECT_THROW(build_chain(s), ParseError);
}

TEST(ScenarioParser, CanonicalFormRoundTrips) {
  std::vector<std::string> names = bundled_scenario_names();
  ASSERT_GE(names.size(), 4u);
  for (const auto& name : names) {
    const Scenario s = parse_scenario(*bundled_scenario(name), name);
    EXPECT_EQ(parse_scenario(to_canonical(s), name), s) << name;
    EXPECT_EQ(to_canonical(parse_scenario(to_canonical(s), name)), to_canonical(s)) << name;
  }
  const Scenario small = parse_scenario(kSmall, "small");
  EXPECT_EQ(parse_scenario(to_canonical(small), "small"), small);
}

TEST(ScenarioBuild, SeededOffsetsAreReproducible) {
  const Scenario s = parse_scenario(kSmall, "small");
  const ChainSpec spec = build_chain(s);
  const auto a = build_perturbations(s, spec), b = build_perturbations(s, spec);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[0].offsets.births, b[0].offsets.births);
  EXPECT_NE(a[0].offsets.births, a[1].offsets.births);
  for (double x : a[1].offsets.deaths) EXPECT_LE(std::abs(x), 0.01);
}

TEST(Pipeline, AnalyzeLossChain) {
  const auto r = run_pipeline(load_scenario_or_bundled("mtmtnn.scn"), Command::analyze, no_files());
  EXPECT_EQ(r.exit_code, exit_code::ok);
  EXPECT_EQ(r.report.get("cert.uniform.c"), "1196");
  EXPECT_EQ(r.report.get("cert.weighted.M"), "1");
  EXPECT_NEAR(r.report.number("cert.uniform.b"), 1.0, 1e-9);
  EXPECT_NEAR(r.report.number("cert.weighted.W"), 1.0 / 299.0, 1e-15);
}

TEST(Pipeline, AnalyzePairArrivals) {
  const auto r = run_pipeline(load_scenario_or_bundled("pair_arrivals.scn"), Command::analyze, no_files());
  EXPECT_NEAR(r.report.number("cert.weighted.alpha_star"), 0.5, 1e-9);
  EXPECT_EQ(r.report.number("cert.weighted.W"), 1.0);
}

TEST(Pipeline, CompareLossChainPrefersUniform) {
  PipelineOptions o = no_files();
  o.grid = 256;
  const auto r = run_pipeline(load_scenario_or_bundled("mtmtnn.scn"), Command::compare, o);
  EXPECT_EQ(r.report.get("compare.smaller"), "uniform");
  EXPECT_NEAR(r.report.number("bounds.uniform.tv_nominal"), (1 + std::log(598.0)) * 0.01, 1e-12);
  EXPECT_GT(r.report.number("compare.weighted"), r.report.number("compare.uniform"));
}

TEST(Pipeline, ZeroEpsilonTies) {
  Scenario s = parse_scenario(kSmall, "small");
  s.perturbation->epsilon = 0.0;
  const auto r = run_pipeline(s, Command::compare, no_files());
  EXPECT_EQ(r.report.get("compare.smaller"), "tie");
  EXPECT_EQ(r.report.number("verdict.bound"), 0.0);
  EXPECT_EQ(r.exit_code, exit_code::ok);
}

TEST(Pipeline, LargeEpsilonLeavesUniformOnly) {
  Scenario s = parse_scenario(kSmall, "small");
  s.perturbation->epsilon = 0.5;
  s.perturbation->clamp_at_zero = true;
  const auto r = run_pipeline(s, Command::compare, no_files());
  EXPECT_EQ(r.report.get("bounds.weighted.feasible"), "false");
  EXPECT_EQ(r.report.get("bounds.uniform.available"), "true");
  EXPECT_EQ(r.report.get("compare.smaller"), "uniform");
  EXPECT_FALSE(r.report.has("compare.weighted"));
}

TEST(Pipeline, RunIsSoundAndDeterministic) {
  const Scenario s = parse_scenario(kSmall, "small");
  PipelineOptions a, b;
  a.out_dir = fresh_dir("a").string();
  b.out_dir = fresh_dir("b").string();
  const auto ra = run_pipeline(s, Command::run, a);
  const auto rb = run_pipeline(s, Command::run, b);
  EXPECT_EQ(ra.exit_code, exit_code::ok);
  EXPECT_EQ(ra.report.get("verdict.sound"), "true");
  ASSERT_FALSE(ra.artifacts.empty());
  ASSERT_EQ(ra.artifacts.size(), rb.artifacts.size());
  for (std::size_t i = 0; i < ra.artifacts.size(); ++i) {
    const fs::path pa = ra.artifacts[i], pb = rb.artifacts[i];
    EXPECT_EQ(pa.filename(), pb.filename());
    EXPECT_EQ(slurp(pa), slurp(pb)) << pa;
  }
  const std::string mean = slurp(fs::path(*a.out_dir) / "small_mean_from_0.csv");
  EXPECT_EQ(mean.substr(0, mean.find('\n')), "t,mean");
  EXPECT_EQ(parse_report(slurp(fs::path(*a.out_dir) / "small_report.kv")).to_kv(), ra.report.to_kv());
}

TEST(Pipeline, MissingSectionsAreValidationErrors) {
  Scenario s = parse_scenario(kSmall, "small");
  s.perturbation.reset();
  EXPECT_THROW(run_pipeline(s, Command::bounds, no_files()), ValidationError);
  s = parse_scenario(kSmall, "small");
  s.solve.reset();
  EXPECT_THROW(run_pipeline(s, Command::run, no_files()), ValidationError);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ParseError("x", 0)), exit_code::parse);
  EXPECT_EQ(exit_code_for(ValidationError("x")), exit_code::validation);
  EXPECT_EQ(exit_code_for(EvaluationError("x", 0.0)), exit_code::validation);
  EXPECT_EQ(exit_code_for(ConvergenceError("x", 1.0)), exit_code::validation);
  EXPECT_EQ(exit_code_for(InfeasibleError("x")), exit_code::infeasible);
  EXPECT_EQ(exit_code_for(std::runtime_error("io")), exit_code::usage);
  EXPECT_EQ(soundness_exit_code(0.07, 0.0739), exit_code::ok);
  EXPECT_EQ(soundness_exit_code(0.08, 0.0739), exit_code::violation);
}

TEST(ExitCodes, InfeasibleScenario) {
  const Scenario s = parse_scenario(
      "[chain]\nclass = I\ntruncation = 20\nbirths = \"1\"\ndeaths = \"4\"\n"
      "[perturbation]\nmode = mass_arrival\nepsilon = 0.1\n");
  const auto r = run_pipeline(s, Command::bounds, no_files());
  EXPECT_EQ(r.exit_code, exit_code::infeasible);
  EXPECT_EQ(r.report.get("verdict.feasible"), "false");
}

TEST(Report, KeyValueAndHumanForms) {
  Report r;
  r.set("a.x", 1.5);
  r.set("b.y", std::size_t{3});
  r.set("a.z", true);
  r.set("a.x", 2.0);
  EXPECT_EQ(r.to_kv(), "a.x = 2\nb.y = 3\na.z = true\n");
  EXPECT_EQ(r.to_human(), "a\n  a.x  2\n  a.z  true\n\nb\n  b.y  3\n");
  EXPECT_EQ(parse_report(r.to_kv()).to_kv(), r.to_kv());
  EXPECT_THROW(r.number("a.z"), std::out_of_range);
  Report outer;
  outer.merge(r, "run");
  EXPECT_EQ(outer.number("run.b.y"), 3.0);
}

TEST(Reproduce, UnknownIdIsRejected) { EXPECT_THROW(reproduce("3", no_files()), std::invalid_argument); }

TEST(Reproduce, CounterexampleTable) {
  const auto r = reproduce("counterexample", no_files());
  EXPECT_EQ(r.exit_code, exit_code::ok);
  EXPECT_EQ(r.report.get("counterexample.probe.p0_decreasing"), "true");
  EXPECT_LT(r.report.number("counterexample.probe.multiplicative.distance"), 1e-8);
}

}  // namespace
}  // namespace mcpert
