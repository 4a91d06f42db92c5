#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "digits/core/labels.hpp"
#include "digits/core/program.hpp"
#include "digits/core/samples.hpp"
#include "digits/oracles/synth.hpp"
#include "digits/oracles/verifier.hpp"

namespace digits::search {

enum class TauMode { fixed, adaptive };
/// What τ multiplies in the pruning test: the current search depth, or the
/// length of the constraint string being tested.
enum class ThresholdDenominator { depth, length };

const char* to_string(TauMode m);
const char* to_string(ThresholdDenominator d);

struct SearchConfig {
  TauMode tau_mode = TauMode::fixed;
  /// Fixed threshold, or the starting threshold in adaptive mode.
  double tau = 1.0;
  ThresholdDenominator denominator = ThresholdDenominator::depth;
  double time_budget_s = std::numeric_limits<double>::infinity();
  std::size_t depth_budget = std::numeric_limits<std::size_t>::max();
  /// Stop before the trie grows past this many nodes.
  std::size_t node_budget = 20'000'000;
  /// Seed of the sample sequence.
  std::uint64_t seed = 0;
  /// Re-ask the synthesizer once (longer timeout) after an unknown answer.
  bool retry_unknown = false;
};

/// Throws ConfigError on an invalid configuration.
void validate(const SearchConfig& cfg);

struct Problem {
  Program spec;
  InputDistribution dist;
  std::shared_ptr<const Synthesizer> synthesizer;
  std::shared_ptr<const Verifier> verifier;
};

/// Pruning test: flips <= τ · (depth or length).
bool unblocked(std::size_t flips, std::size_t length, std::size_t depth, double tau, ThresholdDenominator denom);

struct Counters {
  std::size_t synth_queries = 0;
  std::size_t propagations = 0;
  /// Children whose pruning test failed (counted each time a test fails).
  std::size_t blocked_nodes = 0;
  /// Blocked children later explored after the threshold grew.
  std::size_t unblocked_later = 0;
  std::size_t ver_calls = 0;
  std::size_t ver_cache_hits = 0;
  std::size_t unrealizable = 0;
  std::size_t unknown = 0;
  std::size_t retries = 0;
};

struct TimePoint {
  double time_s = 0.0;
  double value = 0.0;
};

struct BestSolution {
  Program program;
  Estimate error;
  Verdict verdict;
  /// Constraint string of the node whose query produced it (empty for P̂).
  std::string sigma;
  double found_at_s = 0.0;
};

struct SearchReport {
  std::string class_id;
  TauMode tau_mode = TauMode::fixed;
  ThresholdDenominator denominator = ThresholdDenominator::depth;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  double tau_initial = 1.0;
  double tau_final = 1.0;
  std::optional<BestSolution> best;
  Counters counters;
  std::vector<std::size_t> queries_per_depth;
  std::vector<TimePoint> tau_trace;
  std::vector<TimePoint> depth_series;
  std::vector<TimePoint> error_series;
  double wall_s = 0.0;
  std::uint64_t sample_hash = 0;
  std::string stop_reason;
  std::size_t node_count = 0;
  std::size_t verifier_samples = 0;
  double verifier_confidence = 0.0;
};

nlohmann::json to_json(const SearchReport& r);
/// time_s,value rows.
std::string series_csv(const std::vector<TimePoint>& series);

/// Trie search over constraint strings. Each rule application (one Explore
/// or one Deepen) is one step(). Children are explored breadth-first: every
/// pending child of length <= depth is explored before the next sample is
/// drawn; within a length, parents are taken in lexicographic order of their
/// strings and the child the parent's program already satisfies comes first.
class SearchEngine {
 public:
  SearchEngine(Problem problem, SearchConfig cfg);

  /// Applies one rule. Returns false once no rule can fire within the depth
  /// and node budgets (the time budget is enforced by run()).
  bool step();
  /// Steps until a budget is exhausted; returns the report.
  SearchReport run();

  std::size_t depth() const { return depth_; }
  double tau() const { return tau_; }
  const SampleSequence& samples() const { return samples_; }
  const Counters& counters() const { return counters_; }
  const std::optional<BestSolution>& best() const { return best_; }
  SearchReport report() const;

  /// The pruning test for an arbitrary string under the current depth/τ.
  bool unblocked(const ConstraintString& sigma) const;

  enum class Outcome { program, unrealizable, unknown };
  struct ExploredNode {
    std::string sigma;
    Outcome outcome;
    /// "root", "propagated" or "synthesized".
    std::string origin;
    /// Parameters of the node's program (empty unless outcome == program).
    std::vector<double> params;
  };
  /// Every node in the trie, in creation order.
  std::vector<ExploredNode> explored() const;

 private:
  enum class Origin : std::uint8_t { root, propagated, synthesized };

  struct Node {
    std::int32_t parent = -1;
    std::int32_t child[2] = {-1, -1};
    std::uint32_t length = 0;
    std::uint32_t flips = 0;
    std::int32_t program = -1;  // index into programs_, or -1
    Outcome outcome = Outcome::program;
    Origin origin = Origin::root;
    std::uint8_t bit = 0;
    std::uint32_t rank = 0;  // lexicographic position within its level
  };

  struct Slot {
    std::int32_t parent;
    std::uint8_t bit;
    bool propagates;
  };

  double elapsed() const;
  void initialize();
  void deepen();
  void explore(const Slot& slot);
  bool slot_unblocked(const Slot& slot, std::uint32_t* flips_out) const;
  Slot make_slot(std::int32_t parent, std::uint8_t bit) const;
  void schedule_children(std::int32_t node);
  /// Rebuilds the lexicographic level lists and ranks up to `length`.
  void refresh_levels(std::size_t length);
  void consider(std::int32_t program_index, const std::string& sigma);
  std::string sigma_of(std::int32_t node) const;
  void record_tau();

  Problem problem_;
  SearchConfig cfg_;
  std::chrono::steady_clock::time_point start_;
  bool started_ = false;
  bool spec_in_class_ = false;

  SampleSequence samples_;
  std::vector<char> spec_labels_;
  std::size_t depth_ = 0;
  double tau_ = 1.0;

  std::vector<Node> nodes_;
  std::vector<Program> programs_;
  std::vector<std::vector<std::int32_t>> levels_;
  /// Levels at or beyond this index may be out of lexicographic order.
  std::size_t stale_from_ = 1;
  std::vector<std::vector<Slot>> work_;
  std::size_t cursor_ = 0;
  std::size_t work_pos_ = 0;
  bool cursor_sorted_ = false;
  /// Blocked children keyed by flip count (depth denominator only; with the
  /// length denominator a blocked child can never become unblocked).
  std::map<std::uint32_t, std::vector<Slot>> blocked_;

  std::map<std::vector<double>, Verifier::Assessment> assessed_;
  std::optional<BestSolution> best_;
  Counters counters_;
  std::vector<std::size_t> queries_per_depth_;
  std::vector<TimePoint> tau_trace_;
  std::vector<TimePoint> depth_series_;
  std::vector<TimePoint> error_series_;
  std::string stop_reason_;
  double final_wall_s_ = 0.0;
};

SearchReport run(Problem problem, const SearchConfig& cfg);

}  // namespace digits::search
