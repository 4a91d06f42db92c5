#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "digits/bench/benchmark.hpp"
#include "digits/core/error.hpp"
#include "digits/sketch/parser.hpp"
#include "digits/sketch/solver.hpp"

using namespace digits;
using namespace digits::bench;
namespace fs = std::filesystem;

namespace {

const fs::path kBench = fs::path(DIGITS_SOURCE_DIR) / "bench";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("digits_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(DIGITS_CLI) + " " + args + " 2>/dev/null";
  FILE* f = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  const int status = ::pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// Exact probabilities for a 1-D box [l,u] under U[-1,1].
double len(double a, double b) { return std::max(0.0, b - a); }

}  // namespace

TEST(Synthetic, Generator) {
  const auto s = gen_synthetic(1, 0.1);
  EXPECT_EQ(s.name, "synthetic_d1_b01");
  EXPECT_EQ(s.spec_program.at("lo").get<std::vector<double>>(), std::vector<double>{0.0});
  EXPECT_EQ(s.spec_program.at("hi").get<std::vector<double>>(), std::vector<double>{0.2});
  EXPECT_EQ(*s.optimum_error, 0.1);
  EXPECT_EQ(*s.vc_dimension, 2u);
  std::vector<double> fixed;
  int adaptive = 0;
  for (const auto& r : s.runs) {
    if (r.tau_mode == search::TauMode::fixed) fixed.push_back(r.tau);
    adaptive += r.tau_mode == search::TauMode::adaptive;
    EXPECT_EQ(r.time_budget_s, 120.0);
  }
  EXPECT_EQ(fixed, (std::vector<double>{0.15, 0.3, 0.5, 1.0}));
  EXPECT_EQ(adaptive, 1);

  const auto s2 = gen_synthetic(2, 0.05);
  EXPECT_EQ(s2.spec_program.at("lo").get<std::vector<double>>(), (std::vector<double>{0.0, -1.0}));
  EXPECT_EQ(s2.spec_program.at("hi").get<std::vector<double>>(), (std::vector<double>{0.1, 1.0}));
  EXPECT_EQ(*s2.vc_dimension, 4u);
  EXPECT_EQ(s2.runs.size(), 6u);
  EXPECT_THROW(gen_synthetic(4, 0.1), ConfigError);
  EXPECT_THROW(gen_synthetic(1, 0.5), ConfigError);
}

TEST(Synthetic, OptimumUnderExactMasses) {
  // With d = 1 the density is 1/2 and each half of [-1,1] has mass 1/2.
  auto post_holds = [](double l, double u, double b) {
    const double left = len(std::max(l, -1.0), std::min(u, 0.0)) / 1.0;   // Pr[ret=1 | x<=0]
    const double right = len(std::max(l, 0.0), std::min(u, 1.0)) / 1.0;  // Pr[ret=1 | x>=0]
    const double total = len(l, u) / 2.0;
    return left >= right && total >= b;
  };
  auto error = [](double l, double u) { return (len(l, u) + 0.2 - 2 * len(std::max(l, 0.0), std::min(u, 0.2))) / 2.0; };
  EXPECT_TRUE(post_holds(-0.1, 0.1, 0.1));
  EXPECT_NEAR(error(-0.1, 0.1), 0.1, 1e-12);
  // [-0.1, 0.3] accepts 0.1 on the left and 0.3 on the right of 0.
  EXPECT_FALSE(post_holds(-0.1, 0.3, 0.1));
  EXPECT_NEAR(error(-0.1, 0.3), 0.1, 1e-12);
  // No correct box does better than b on a fine grid.
  double best = 1.0;
  for (int i = -100; i <= 100; ++i) {
    for (int j = i; j <= 100; ++j) {
      const double l = i / 100.0, u = j / 100.0;
      if (post_holds(l, u, 0.1)) best = std::min(best, error(l, u));
    }
  }
  EXPECT_NEAR(best, 0.1, 1e-9);

  // The verifier agrees on the clear cases.
  const auto spec = gen_synthetic(1, 0.1);
  const auto built = build_problem(spec, 5);
  std::vector<double> lo{-0.1}, hi{0.3};
  EXPECT_FALSE(built.problem.verifier->verify(make_box(lo, hi)).accepted);
  std::vector<double> lo2{-0.12}, hi2{0.1};
  const auto a = built.problem.verifier->assess(make_box(lo2, hi2));
  EXPECT_TRUE(a.verdict.accepted);
  EXPECT_NEAR(a.error.value, 0.11, 3 * a.error.half_width);
}

TEST(Thermostat, GeneratorShape) {
  const auto s = gen_thermostat(5, 8);
  EXPECT_EQ(s.name, "thermostat_u5_n8");
  EXPECT_TRUE(s.uses_sketch());
  EXPECT_TRUE(s.postcondition.empty());
  EXPECT_EQ(s.distribution.dimension(), 2u);
  EXPECT_EQ(s.runs.size(), 1u);
  EXPECT_EQ(s.runs[0].time_budget_s, 600.0);
  EXPECT_THROW(gen_thermostat(6, 8), ConfigError);
  EXPECT_THROW(gen_thermostat(5, 3), ConfigError);

  auto loaded = BenchmarkSpec::load(kBench / "thermostat_u5_n8.json");
  if (!sketch::find_solver()) {
    EXPECT_THROW(build_problem(loaded, 1), InfrastructureError);
    GTEST_SKIP() << "no SMT-LIB2 solver on PATH";
  }
  const auto built = build_problem(loaded, 1);
  EXPECT_EQ(built.problem.verifier->postcondition().term_count(), 8u);
  EXPECT_EQ(built.problem.synthesizer->family()->param_count(), 3u);
  auto big = BenchmarkSpec::load(kBench / "thermostat_u40_n2.json");
  EXPECT_EQ(build_problem(big, 1).problem.verifier->postcondition().term_count(), 43u);
}

TEST(Fairness, StandIns) {
  for (const char* size : {"s", "m", "l"}) {
    const auto s = gen_fairness_standin(size);
    EXPECT_EQ(s.runs.size(), 6u);
    const auto built = build_problem(s, 3);
    // The spec itself violates the 80% rule.
    EXPECT_FALSE(built.problem.verifier->verify(built.problem.spec).accepted) << size;
  }
  EXPECT_THROW(gen_fairness_standin("xl"), ConfigError);
}

TEST(Spec, JsonRoundTripAndShippedFiles) {
  const auto s = gen_synthetic(3, 0.2);
  const auto back = BenchmarkSpec::from_json(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(kBench)) {
    if (entry.path().extension() != ".json") continue;
    const auto loaded = BenchmarkSpec::load(entry.path());
    EXPECT_EQ(loaded.name + ".json", entry.path().filename().string());
    ++count;
  }
  EXPECT_EQ(count, 9u + 12u + 3u);
  EXPECT_THROW(BenchmarkSpec::load("missing.json"), ConfigError);
}

TEST(Spec, ValidationRejectsTauBelowB) {
  auto s = gen_synthetic(1, 0.1);
  s.runs.push_back({search::TauMode::fixed, 0.07, 120.0, std::nullopt, 1});
  EXPECT_THROW(validate(s), ConfigError);
  auto t = gen_thermostat(5, 8);
  t.class_spec["file"] = "nope.skh";
  t.base_dir = kBench;
  EXPECT_THROW(validate(t), ConfigError);
}

TEST(Experiment, ZeroBudgetRows) {
  auto s = gen_synthetic(1, 0.1);
  for (auto& r : s.runs) r.time_budget_s = 0.0;
  const auto out = scratch("zero");
  const auto res = run_experiment(s, out);
  ASSERT_EQ(res.rows.size(), 5u);
  for (const auto& r : res.rows) {
    EXPECT_EQ(r.final_depth, 0u);
    EXPECT_FALSE(r.best_error.has_value());
    EXPECT_EQ(r.status, "ok");
  }
  const auto summary = slurp(out / "summary.csv");
  EXPECT_EQ(summary.rfind("benchmark,tau_mode,seed,final_depth,best_error,synth_queries,wall_s,", 0), 0u);
  EXPECT_TRUE(fs::exists(out / "adaptive_seed1" / "report.json"));
  EXPECT_TRUE(fs::exists(out / "tau1_seed1" / "depth.csv"));
  EXPECT_TRUE(fs::exists(out / "tau1_seed1" / "error.csv"));
  EXPECT_TRUE(fs::exists(out / "comparison.csv"));
  fs::remove_all(out);
}

TEST(Experiment, ReproducibleAndSharedSamples) {
  auto s = gen_synthetic(1, 0.1);
  for (auto& r : s.runs) {
    r.depth_budget = 25;
    r.time_budget_s = 60.0;
  }
  s.runs.push_back({search::TauMode::adaptive, 1.0, 60.0, 25, 2});
  const auto out1 = scratch("rep1"), out2 = scratch("rep2");
  const auto a = run_experiment(s, out1);
  const auto b = run_experiment(s, out2);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    auto ra = a.rows[i], rb = b.rows[i];
    ra.wall_s = rb.wall_s = 0;
    std::vector<SummaryRow> va{ra}, vb{rb};
    EXPECT_EQ(summary_csv(va), summary_csv(vb));
  }
  // Every seed-1 run drew the same first 25 points.
  for (const auto& r : a.rows) {
    if (r.seed == 1) {
      EXPECT_EQ(r.shared_prefix_hash, a.rows.front().shared_prefix_hash);
      EXPECT_EQ(r.sample_hash, a.rows.front().sample_hash);
    }
  }
  EXPECT_NE(a.rows.back().shared_prefix_hash, a.rows.front().shared_prefix_hash);
  // Accepted synthetic runs cannot beat b by more than the statistical slack.
  for (const auto& r : a.rows) {
    if (r.accepted) {
      EXPECT_GE(*r.best_error, 0.1 - 2 * *r.half_width);
    }
  }
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST(Experiment, MissingSolverSkips) {
  auto s = BenchmarkSpec::load(kBench / "thermostat_u5_n8.json");
  s.solver_path = "/nonexistent/solver";
  s.runs[0].time_budget_s = 1.0;
  const auto out = scratch("skip");
  const auto res = run_experiment(s, out);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].status, "skipped");
  EXPECT_NE(res.rows[0].note.find("solver"), std::string::npos);
  EXPECT_TRUE(res.all_failed);
  fs::remove_all(out);
}

TEST(Cli, ExitCodesAndOutputs) {
  const auto synth = cli("synth --class interval --spec 0.3 --post \"Pr[ret==1] >= 0.5\" --depth-budget 50");
  EXPECT_EQ(synth.code, 0);
  const auto j = nlohmann::json::parse(synth.out);
  EXPECT_EQ(j.at("depth").get<int>(), 50);
  EXPECT_TRUE(j.at("best").is_object());

  EXPECT_EQ(cli("run missing.json").code, 2);
  EXPECT_EQ(cli("--no-such-flag synth").code, 2);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("synth --class cubes --spec 1 --post \"Pr[ret==1] >= 0\"").code, 2);

  const auto analyze = cli("analyze --class interval --m-max 30");
  EXPECT_EQ(analyze.code, 0);
  std::istringstream rows(analyze.out);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "m,measured_queries,lemma1_prediction,sauer_envelope,tail_exact,tail_hoeffding,tail_kl");
  std::size_t m = 0;
  while (std::getline(rows, line)) {
    ++m;
    std::istringstream fields(line);
    std::string mm, measured, predicted;
    std::getline(fields, mm, ',');
    std::getline(fields, measured, ',');
    std::getline(fields, predicted, ',');
    EXPECT_EQ(std::stoul(mm), m);
    EXPECT_EQ(std::stoul(measured), m * (m + 1) / 2);
    EXPECT_EQ(predicted, measured);
  }
  EXPECT_EQ(m, 30u);

  const auto check = cli("sketch check " + (kBench / "thermostat.skh").string() + " --const Unrollings=5 --const N=8");
  EXPECT_EQ(check.code, 0);
  const auto cj = nlohmann::json::parse(check.out);
  EXPECT_EQ(cj.at("asserts_unrolled").get<int>(), 8);
  EXPECT_EQ(cj.at("holes").size(), 3u);
  EXPECT_EQ(cli("sketch check " + (kBench / "thermostat.skh").string()).code, 2);
}
