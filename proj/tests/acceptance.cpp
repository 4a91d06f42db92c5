// Acceptance checks. Usage: digits_acceptance [id...]   (default: all)
// Prints one PASS/FAIL/SKIP line per criterion. Exit code 0 when every
// selected criterion passed, 77 when the only non-passing ones were skipped,
// 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "digits/analysis/dichotomies.hpp"
#include "digits/analysis/learning.hpp"
#include "digits/bench/benchmark.hpp"
#include "digits/core/error.hpp"
#include "digits/search/engine.hpp"
#include "digits/search/naive.hpp"
#include "digits/sketch/solver.hpp"

using namespace digits;
using namespace digits::search;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::shared_ptr<Verifier> make_verifier(const InputDistribution& dist, const std::string& post, const Program& spec,
                                        std::uint64_t seed, std::size_t n) {
  VerifierConfig vc;
  vc.seed = seed;
  vc.samples = n;
  return std::make_shared<Verifier>(dist, Postcondition::parse(post, spec.family().input_names(), 0), spec, vc);
}

// [0,a] search problem on U[0,1]. The spec is a 1-D box so it lies outside
// the searched class.
Problem interval_problem(double a) {
  const auto dist = InputDistribution::uniform_box({0.0}, {1.0});
  std::vector<double> lo{0.0}, hi{a};
  const auto spec = make_box(lo, hi);
  return Problem{spec, dist, std::make_shared<BoxSynthesizer>(interval_family()),
                 make_verifier(dist, "Pr[ret == 1] >= 0.5", spec, 99, 10000)};
}

bool distinct_prefix(const InputDistribution& dist, std::uint64_t seed, std::size_t m) {
  const auto s = sample(dist, seed, m);
  std::set<double> xs;
  for (std::size_t i = 0; i < m; ++i) xs.insert(s[i][0]);
  return xs.size() == m;
}

Outcome interval_query_law() {
  const auto t0 = Clock::now();
  const auto dist = InputDistribution::uniform_box({0.0}, {1.0});
  int exact = 0, reseeded = 0;
  std::size_t worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::uint64_t s = seed;
    while (!distinct_prefix(dist, s, 30)) {
      s += 1000;
      ++reseeded;
    }
    SearchConfig cfg;
    cfg.seed = s;
    cfg.depth_budget = 30;
    const auto r = run(interval_problem(0.3), cfg);
    exact += r.depth == 30 && r.counters.synth_queries == 465;
    worst = std::max(worst, r.counters.synth_queries);
  }
  const double t = seconds_since(t0);
  const bool ok = exact == 20 && t < 5.0;
  return {ok ? Status::pass : Status::fail, std::to_string(exact) + "/20 runs with 465 queries at m=30 (max " +
                                                std::to_string(worst) + ", reseeded " + std::to_string(reseeded) +
                                                "), " + fmt("%.2f s", t)};
}

Outcome dichotomy_sum() {
  const auto t0 = Clock::now();
  int checks = 0, equal = 0;
  for (std::size_t d : {1u, 2u}) {
    const auto dist = InputDistribution::uniform_box(std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
    const auto spec = make_box(std::vector<double>(d, -0.5), std::vector<double>(d, 0.5));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto synth = std::make_shared<BoxSynthesizer>(box_family(d));
      SearchConfig cfg;
      cfg.seed = seed;
      cfg.depth_budget = 12;
      SearchEngine e(Problem{spec, dist, synth, make_verifier(dist, "Pr[ret == 1] >= 0", spec, 1, 500)}, cfg);
      const auto r = e.run();
      // queries_per_depth[l] counts queries for strings of length l.
      std::size_t cumulative = 0;
      for (std::size_t m = 1; m <= 12; ++m) {
        cumulative += m < r.queries_per_depth.size() ? r.queries_per_depth[m] : 0;
        ++checks;
        equal += cumulative == analysis::predicted_queries(*synth, e.samples(), m, true);
      }
      ++checks;
      equal += r.counters.synth_queries == cumulative;
    }
  }
  const double t = seconds_since(t0);
  const bool ok = equal == checks && t < 120.0;
  return {ok ? Status::pass : Status::fail, std::to_string(equal) + "/" + std::to_string(checks) +
                                                " depth counts equal the enumerated prediction (d=1,2; m<=12; 10 seeds), " +
                                                fmt("%.1f s", t)};
}

Outcome naive_equivalence() {
  const auto t0 = Clock::now();
  int matched = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto problem = interval_problem(0.3);
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.depth_budget = 10;
    SearchEngine e(problem, cfg);
    const auto r = e.run();
    const auto naive = naive_digits(*problem.synthesizer, *problem.verifier, e.samples(), 10);
    // Realizability is closed under prefixes, so the explored programs must be
    // exactly the prefixes of the naive realizable labelings.
    std::set<std::string> expected{""};
    for (const auto& full : naive.realizable) {
      for (std::size_t l = 1; l <= full.size(); ++l) expected.insert(full.substr(0, l));
    }
    std::set<std::string> explored;
    for (const auto& n : e.explored()) {
      if (n.outcome == SearchEngine::Outcome::program) explored.insert(n.sigma);
    }
    const bool same_best = r.best && naive.best && r.best->program.params() == naive.best->params() &&
                           r.best->error.value == naive.best_error->value;
    matched += explored == expected && same_best;
  }
  const double t = seconds_since(t0);
  const bool ok = matched == 10 && t < 60.0;
  return {ok ? Status::pass : Status::fail,
          std::to_string(matched) + "/10 seeds match the exhaustive reference at m=10, " + fmt("%.2f s", t)};
}

Outcome query_envelope() {
  const auto t0 = Clock::now();
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.depth_budget = 100;
  const auto r = run(interval_problem(0.3), cfg);
  // Least-squares slope of log(cumulative queries) on log m, m = 20..100.
  std::vector<double> xs, ys;
  std::size_t cumulative = 0;
  for (std::size_t m = 1; m < r.queries_per_depth.size(); ++m) {
    cumulative += r.queries_per_depth[m];
    if (m >= 20) {
      xs.push_back(std::log(static_cast<double>(m)));
      ys.push_back(std::log(static_cast<double>(cumulative)));
    }
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double t = seconds_since(t0);
  const bool ok = xs.size() == 81 && slope <= 2.2 && t < 120.0;
  return {ok ? Status::pass : Status::fail, "log-log slope " + fmt("%.4f", slope) + " over m=20..100 (" +
                                                std::to_string(cumulative) + " queries at m=100), " + fmt("%.2f s", t)};
}

Outcome tail_values() {
  const auto t0 = Clock::now();
  const double value = analysis::tail_exact({100, 0.1, 0.2});
  int dominated = 0, points = 0;
  double worst_ratio = 0.0;
  for (std::size_t m : {5u, 20u, 50u, 100u, 400u}) {
    for (int i = 0; i < 10; ++i) {
      const double k = 0.01 + 0.09 * i;
      for (int j = 1; j <= 10; ++j) {
        const double tau = std::min(1.0, k + (1.0 - k) * j / 10.0);
        const analysis::TailParams p{m, k, tau};
        const double exact = analysis::tail_exact(p);
        const auto b = analysis::tail_bounds(p);
        const double slack = 1e-12 * std::max(exact, 1e-300);
        ++points;
        dominated += b.hoeffding + slack >= exact && b.kl + slack >= exact;
        if (b.kl > 0) worst_ratio = std::max(worst_ratio, exact / b.kl);
      }
    }
  }
  const double t = seconds_since(t0);
  const bool ok = value < 0.001 && dominated == points && points == 500 && t < 10.0;
  return {ok ? Status::pass : Status::fail, "tail_exact(100, 0.1, 0.2) = " + fmt("%.3e", value) + "; bounds dominate on " +
                                                std::to_string(dominated) + "/" + std::to_string(points) +
                                                " grid points (max exact/kl " + fmt("%.3f", worst_ratio) + "), " +
                                                fmt("%.2f s", t)};
}

// Synthetic (d=1, b=0.1) runs shared by criteria 6 and 7.
struct SyntheticRun {
  std::size_t depth = 0;
  std::optional<double> error;
  bool accepted = false;
  std::uint64_t prefix_hash = 0;
};

std::map<std::pair<std::uint64_t, bool>, SyntheticRun> synthetic_cache;

SyntheticRun synthetic_run(std::uint64_t seed, bool adaptive) {
  const auto key = std::make_pair(seed, adaptive);
  if (auto it = synthetic_cache.find(key); it != synthetic_cache.end()) return it->second;
  const auto spec = bench::gen_synthetic(1, 0.1);
  auto built = bench::build_problem(spec, bench::verifier_seed_for(seed));
  SearchConfig cfg;
  cfg.seed = seed;
  cfg.tau_mode = adaptive ? TauMode::adaptive : TauMode::fixed;
  cfg.tau = 1.0;
  cfg.time_budget_s = 120.0;
  SearchEngine e(built.problem, cfg);
  const auto r = e.run();
  SyntheticRun out;
  out.depth = r.depth;
  if (r.best) {
    out.error = r.best->error.value;
    out.accepted = r.best->verdict.accepted;
  }
  out.prefix_hash = e.samples().hash(std::min<std::size_t>(r.depth, 40));
  std::fprintf(stderr, "  synthetic seed %llu %s: depth %zu, best error %s\n", static_cast<unsigned long long>(seed),
               adaptive ? "adaptive" : "fixed tau=1", r.depth, out.error ? fmt("%.4f", *out.error).c_str() : "none");
  synthetic_cache[key] = out;
  return out;
}

Outcome synthetic_optimum() {
  int good = 0;
  std::string errors;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = synthetic_run(seed, true);
    good += r.accepted && r.error && *r.error <= 0.15;
    errors += (seed > 1 ? ", " : "") + (r.error ? fmt("%.4f", *r.error) : std::string("none")) +
              (r.accepted ? "" : " (rejected)");
  }
  return {good >= 2 ? Status::pass : Status::fail,
          std::to_string(good) + "/3 adaptive seeds accepted with error <= 0.15 (errors " + errors + ")"};
}

Outcome adaptive_dominance() {
  int wins = 0, shared = 0;
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = synthetic_run(seed, true);
    const auto f = synthetic_run(seed, false);
    wins += a.depth >= f.depth;
    shared += a.prefix_hash == f.prefix_hash || std::min(a.depth, f.depth) < 40;
    ratio_sum += f.depth > 0 ? static_cast<double>(a.depth) / static_cast<double>(f.depth) : 0.0;
  }
  return {wins >= 4 && shared == 5 ? Status::pass : Status::fail,
          "adaptive depth >= fixed tau=1 depth in " + std::to_string(wins) + "/5 seeds; mean depth ratio " +
              fmt("%.2f", ratio_sum / 5.0) + "; shared samples in " + std::to_string(shared) + "/5"};
}

Outcome net_statistics() {
  const auto t0 = Clock::now();
  const std::size_t m = analysis::vc_cost(0.1, 0.1, 1);
  const auto dist = InputDistribution::uniform_box({0.0}, {1.0});
  std::mt19937_64 rng(2024);
  int nets = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto target = make_interval(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const auto s = sample(dist, 5000 + static_cast<std::uint64_t>(trial), m);
    nets += analysis::epsilon_net_check(*interval_family(), target, dist, 0.1, s, m);
  }
  const double t = seconds_since(t0);
  const bool ok = nets >= 180 && t < 120.0;
  return {ok ? Status::pass : Status::fail, std::to_string(nets) + "/200 eps-nets with m = " + std::to_string(m) +
                                                ", " + fmt("%.1f s", t)};
}

Outcome verifier_calibration() {
  const auto dist = InputDistribution::uniform_box({0.0}, {1.0});
  const std::size_t n = 10000;
  const double hw = hoeffding_half_width(n, 0.05);
  std::mt19937_64 rng(77);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Pr[ret == 1] = a exactly for [0,a] under U[0,1].
    const double a = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const double threshold = (rng() & 1) ? a - 2 * hw : a + 2 * hw;
    const auto post = Postcondition::parse("Pr[ret == 1] >= " + fmt("%.17g", threshold), {"x1"}, 0);
    VerifierConfig cfg;
    cfg.samples = n;
    cfg.seed = 9000 + static_cast<std::uint64_t>(trial);
    agree += verify(make_interval(a), dist, post, cfg).accepted == (a >= threshold);
  }
  return {agree >= 190 ? Status::pass : Status::fail,
          std::to_string(agree) + "/200 verdicts match the exact mass (n = 10000, margin 2 half-widths = " +
              fmt("%.4f", 2 * hw) + ")"};
}

Outcome thermostat_smoke() {
  const auto spec = bench::gen_thermostat(5, 8);
  if (!sketch::find_solver(spec.solver_path)) {
    return {Status::skip, "no SMT-LIB2 solver found (set PATH or the benchmark's solver.path)"};
  }
  auto resolved = spec;
  resolved.base_dir = DIGITS_SOURCE_DIR "/bench";
  auto built = bench::build_problem(resolved, bench::verifier_seed_for(1));
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.tau_mode = TauMode::adaptive;
  cfg.tau = 1.0;
  cfg.time_budget_s = 600.0;
  cfg.retry_unknown = spec.retry_unknown;
  const auto r = run(built.problem, cfg);
  if (!r.best) return {Status::fail, "no program found, depth " + std::to_string(r.depth)};
  const bool ok = r.best->verdict.accepted && r.best->error.value <= 0.1;
  return {ok ? Status::pass : Status::fail,
          "best error " + fmt("%.4f", r.best->error.value) + (r.best->verdict.accepted ? " (accepted)" : " (rejected)") +
              " at depth " + std::to_string(r.depth) + ", " + std::to_string(r.counters.unknown) + " unknown answers"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> ids;
  app.add_option("ids", ids, "Criteria to run (1-10); default all")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"interval query law", interval_query_law},
      {"query count equals dichotomy prediction", dichotomy_sum},
      {"agreement with the exhaustive reference", naive_equivalence},
      {"polynomial query envelope", query_envelope},
      {"binomial tail and its bounds", tail_values},
      {"synthetic optimum", synthetic_optimum},
      {"adaptive threshold depth", adaptive_dominance},
      {"eps-net frequency", net_statistics},
      {"verifier calibration", verifier_calibration},
      {"thermostat smoke", thermostat_smoke},
  };
  if (ids.empty()) {
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  }
  int failed = 0, skipped = 0;
  for (int id : ids) {
    const auto& [name, check] = criteria[static_cast<std::size_t>(id - 1)];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("error: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("[%s] criterion %d (%s): %s\n", tag, id, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.status == Status::fail;
    skipped += o.status == Status::skip;
  }
  if (failed) return 1;
  return skipped ? 77 : 0;
}
