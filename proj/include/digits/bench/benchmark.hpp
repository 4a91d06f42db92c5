#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "digits/core/distribution.hpp"
#include "digits/oracles/synth.hpp"
#include "digits/search/engine.hpp"

namespace digits::bench {

struct RunSpec {
  search::TauMode tau_mode = search::TauMode::adaptive;
  double tau = 1.0;
  double time_budget_s = 120.0;
  std::optional<std::size_t> depth_budget;
  std::uint64_t seed = 1;
};

/// One benchmark problem plus the runs to perform on it. JSON schema:
///
///   {
///     "name": "synthetic_d1_b01",
///     "kind": "synthetic" | "thermostat" | "fairness" | "custom",
///     "params": {"d": 1, "b": 0.1},
///     "problem": {
///       "class": {"kind": "interval"}
///              | {"kind": "hyperrectangle", "dim": 2}
///              | {"kind": "sketch", "file": "thermostat.skh", "constants": {"N": 8}},
///       "spec": {"kind": "interval", "a": 0.3}
///             | {"kind": "hyperrectangle", "lo": [...], "hi": [...]}
///             | {"kind": "constant", "value": 0},
///       "distribution": <InputDistribution>,
///       "postcondition": "Pr[ret == 1] >= 0.5" | {"kind": "sketch_asserts"}
///     },
///     "vc_dimension": 2,                 optional
///     "optimum_error": 0.1,              optional
///     "verifier": {"samples": 10000, "confidence": 0.95},
///     "search": {"denominator": "depth", "node_budget": 20000000, "retry_unknown": false},
///     "solver": {"path": "", "timeout_ms": 10000},
///     "runs": [{"tau_mode": "adaptive", "tau": 1, "time_budget_s": 120, "depth_budget": null, "seed": 1}]
///   }
///
/// A relative sketch path is resolved against the directory of the JSON file.
struct BenchmarkSpec {
  std::string name;
  std::string kind = "custom";
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json class_spec;
  nlohmann::json spec_program;
  InputDistribution distribution = InputDistribution::uniform_box({0.0}, {1.0});
  /// Postcondition text; empty means the conjunction of the sketch's asserts.
  std::string postcondition;
  std::optional<unsigned> vc_dimension;
  std::optional<double> optimum_error;
  std::size_t verify_samples = 10000;
  double confidence = 0.95;
  search::ThresholdDenominator denominator = search::ThresholdDenominator::depth;
  std::size_t node_budget = 20'000'000;
  bool retry_unknown = false;
  std::string solver_path;
  int solver_timeout_ms = 10000;
  std::vector<RunSpec> runs;
  std::filesystem::path base_dir = ".";

  static BenchmarkSpec from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
  /// Throws ConfigError when the file is missing or malformed.
  static BenchmarkSpec load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
  bool uses_sketch() const;
};

/// Throws ConfigError on invalid parameter combinations, including runs with
/// a fixed τ below the synthetic benchmark's b.
void validate(const BenchmarkSpec& spec);

/// The canonical threshold grid of the synthetic benchmarks.
const std::vector<double>& tau_grid();

/// Uniform[-1,1]^d, spec box [0,2b] x [-1,1]^(d-1), hyperrectangle class,
/// postcondition Pr[ret=1 | x1<=0] >= Pr[ret=1 | x1>=0] && Pr[ret=1] >= b.
/// Runs: every grid τ >= b (fixed) plus adaptive, 120 s each, seed 1.
BenchmarkSpec gen_synthetic(unsigned d, double b);

/// Thermostat sketch (Unrollings, N as constants), pre() distribution,
/// conjunction of the assert events, constant-zero spec; adaptive, 600 s.
BenchmarkSpec gen_thermostat(unsigned unrollings, unsigned n_threshold, const std::string& sketch_file = "thermostat.skh");

/// Fairness-style repair stand-in of size "s", "m" or "l" (d = 2, 3, 4):
/// a box spec whose acceptance rate differs between x1 <= 0 and x1 >= 0,
/// repaired under an 80%-ratio group-fairness postcondition. Runs: fixed
/// τ = 1 and adaptive on three shared seeds, 600 s each.
BenchmarkSpec gen_fairness_standin(const std::string& size);

/// A concrete, runnable problem built from a spec.
struct BuiltProblem {
  search::Problem problem;
  std::shared_ptr<const SketchSynthesizer> sketch_synth;  // null for box classes
};

/// Throws ConfigError on a bad spec and InfrastructureError when a sketch
/// benchmark has no solver available. `verifier_seed` addresses the
/// verification pool.
BuiltProblem build_problem(const BenchmarkSpec& spec, std::uint64_t verifier_seed);

/// Seed of a run's verification pool: a pure function of the run seed, so
/// every τ mode with the same seed shares samples and pool.
std::uint64_t verifier_seed_for(std::uint64_t run_seed);

struct SummaryRow {
  std::string benchmark;
  std::string tau_mode;  // "adaptive" or "fixed"
  double tau = 1.0;
  std::uint64_t seed = 0;
  std::size_t final_depth = 0;
  std::optional<double> best_error;
  std::optional<double> half_width;
  bool accepted = false;
  std::size_t synth_queries = 0;
  double wall_s = 0.0;
  std::uint64_t sample_hash = 0;
  /// Hash of the sample prefix shared by all runs with this seed.
  std::uint64_t shared_prefix_hash = 0;
  /// "ok", "skipped" or "failed".
  std::string status = "ok";
  std::string note;
  std::string run_dir;
};

struct ExperimentOptions {
  /// Run only this index of spec.runs.
  std::optional<std::size_t> run_index;
  bool quiet = true;
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  bool all_failed = false;
};

/// Runs every configured run and writes, under outdir:
///   <run>/report.json, <run>/depth.csv, <run>/error.csv, <run>/tau.csv
///   summary.csv     benchmark,tau_mode,seed,final_depth,best_error,synth_queries,wall_s,
///                   tau,accepted,half_width,sample_hash,shared_prefix_hash,status,note
///   comparison.csv  benchmark,seed,fixed_depth,adaptive_depth,depth_ratio,fixed_error,adaptive_error
/// where comparison pairs the adaptive run with the fixed τ = 1 run of each seed.
ExperimentResult run_experiment(const BenchmarkSpec& spec, const std::filesystem::path& outdir,
                                const ExperimentOptions& opts = {});

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string comparison_csv(const std::vector<SummaryRow>& rows);

}  // namespace digits::bench
