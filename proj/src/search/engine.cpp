#include "digits/search/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "digits/core/error.hpp"

namespace digits::search {

const char* to_string(TauMode m) { return m == TauMode::fixed ? "fixed" : "adaptive"; }
const char* to_string(ThresholdDenominator d) { return d == ThresholdDenominator::depth ? "depth" : "length"; }

void validate(const SearchConfig& cfg) {
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) throw ConfigError("tau must lie in (0,1]");
  if (!(cfg.time_budget_s >= 0.0)) throw ConfigError("time budget must be non-negative");
  if (cfg.node_budget == 0) throw ConfigError("node budget must be positive");
}

bool unblocked(std::size_t flips, std::size_t length, std::size_t depth, double tau, ThresholdDenominator denom) {
  const double scale = denom == ThresholdDenominator::depth ? static_cast<double>(depth) : static_cast<double>(length);
  // The tolerance keeps exact products such as 0.2 * 10 from rounding below an integer.
  return static_cast<double>(flips) <= tau * scale + 1e-9;
}

SearchEngine::SearchEngine(Problem problem, SearchConfig cfg)
    : problem_(std::move(problem)), cfg_(cfg), samples_(problem_.dist.dimension(), cfg.seed) {
  validate(cfg_);
  if (!problem_.synthesizer || !problem_.verifier) throw ConfigError("search problem needs a synthesizer and a verifier");
  if (problem_.spec.input_dim() != problem_.dist.dimension() ||
      problem_.synthesizer->family()->input_dim() != problem_.dist.dimension()) {
    throw ConfigError("specification, program class and distribution disagree on the input dimension");
  }
  spec_in_class_ = problem_.spec.family_ptr() == problem_.synthesizer->family();
  tau_ = cfg_.tau;
}

double SearchEngine::elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void SearchEngine::record_tau() { tau_trace_.push_back({elapsed(), tau_}); }

void SearchEngine::initialize() {
  started_ = true;
  start_ = std::chrono::steady_clock::now();
  Node root;
  root.program = 0;
  root.origin = Origin::root;
  nodes_.push_back(root);
  programs_.push_back(problem_.spec);
  levels_.push_back({0});
  work_.emplace_back();
  queries_per_depth_.push_back(0);
  record_tau();
  depth_series_.push_back({elapsed(), 0.0});
  // P̂ competes for Best only when it belongs to the searched class.
  if (spec_in_class_) consider(0, "");
}

std::string SearchEngine::sigma_of(std::int32_t node) const {
  std::string s(nodes_[node].length, '0');
  for (std::int32_t n = node; nodes_[n].parent >= 0; n = nodes_[n].parent) {
    s[nodes_[n].length - 1] = static_cast<char>('0' + nodes_[n].bit);
  }
  return s;
}

SearchEngine::Slot SearchEngine::make_slot(std::int32_t parent, std::uint8_t bit) const {
  const Node& p = nodes_[parent];
  const auto& prog = programs_[p.program];
  const int out = prog.evaluate(samples_[p.length]);
  return Slot{parent, bit, out == bit};
}

bool SearchEngine::slot_unblocked(const Slot& slot, std::uint32_t* flips_out) const {
  const Node& p = nodes_[slot.parent];
  const std::uint32_t flips = p.flips + (slot.bit != spec_labels_[p.length] ? 1u : 0u);
  if (flips_out) *flips_out = flips;
  return search::unblocked(flips, p.length + 1, depth_, tau_, cfg_.denominator);
}

bool SearchEngine::unblocked(const ConstraintString& sigma) const {
  if (sigma.size() > depth_) throw ContractViolation("constraint string longer than the current depth");
  std::size_t flips = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) flips += sigma[i] != spec_labels_[i] ? 1 : 0;
  return search::unblocked(flips, sigma.size(), depth_, tau_, cfg_.denominator);
}

void SearchEngine::schedule_children(std::int32_t node) {
  const Node& n = nodes_[node];
  if (n.outcome != Outcome::program || n.length >= depth_) return;
  for (std::uint8_t b = 0; b < 2; ++b) work_[n.length + 1].push_back(make_slot(node, b));
}

void SearchEngine::deepen() {
  ++depth_;
  extend(samples_, problem_.dist);
  spec_labels_.push_back(static_cast<char>(problem_.spec.evaluate(samples_[depth_ - 1])));
  levels_.emplace_back();
  work_.emplace_back();
  queries_per_depth_.push_back(0);
  refresh_levels(depth_ - 1);

  // Children of the previous level, in lexicographic order of the parents.
  for (std::int32_t parent : levels_[depth_ - 1]) {
    if (nodes_[parent].outcome != Outcome::program) continue;
    for (std::uint8_t b = 0; b < 2; ++b) work_[depth_].push_back(make_slot(parent, b));
  }
  // Blocked children whose flip count now fits under τ · depth.
  if (cfg_.denominator == ThresholdDenominator::depth) {
    const double limit = tau_ * static_cast<double>(depth_) + 1e-9;
    while (!blocked_.empty() && static_cast<double>(blocked_.begin()->first) <= limit) {
      for (const Slot& s : blocked_.begin()->second) {
        work_[nodes_[s.parent].length + 1].push_back(s);
        ++counters_.unblocked_later;
      }
      blocked_.erase(blocked_.begin());
    }
  }
  cursor_ = 1;
  work_pos_ = 0;
  cursor_sorted_ = false;
  depth_series_.push_back({elapsed(), static_cast<double>(depth_)});
}

void SearchEngine::refresh_levels(std::size_t length) {
  // A lexicographically ordered level followed child-0-then-child-1 yields
  // the next level in lexicographic order.
  for (std::size_t l = std::max<std::size_t>(stale_from_, 1); l <= length; ++l) {
    auto& level = levels_[l];
    level.clear();
    for (std::int32_t parent : levels_[l - 1]) {
      for (std::int32_t c : nodes_[parent].child) {
        if (c >= 0) level.push_back(c);
      }
    }
    for (std::size_t i = 0; i < level.size(); ++i) nodes_[level[i]].rank = static_cast<std::uint32_t>(i);
  }
  stale_from_ = std::max(stale_from_, length + 1);
}

void SearchEngine::consider(std::int32_t program_index, const std::string& sigma) {
  const Program& p = programs_[program_index];
  auto it = assessed_.find(p.params());
  if (it == assessed_.end()) {
    ++counters_.ver_calls;
    it = assessed_.emplace(p.params(), problem_.verifier->assess(p)).first;
  } else {
    ++counters_.ver_cache_hits;
  }
  const auto& a = it->second;
  if (!a.verdict.accepted) return;
  if (best_ && a.error.value >= best_->error.value) return;
  best_ = BestSolution{p, a.error, a.verdict, sigma, elapsed()};
  error_series_.push_back({best_->found_at_s, a.error.value});
  if (cfg_.tau_mode == TauMode::adaptive && a.error.value < tau_) {
    tau_ = a.error.value;
    record_tau();
  }
}

void SearchEngine::explore(const Slot& slot) {
  std::uint32_t flips = 0;
  if (!slot_unblocked(slot, &flips)) {
    ++counters_.blocked_nodes;
    if (cfg_.denominator == ThresholdDenominator::depth) blocked_[flips].push_back(slot);
    return;
  }
  const std::int32_t parent = slot.parent;
  Node node;
  node.parent = parent;
  node.length = nodes_[parent].length + 1;
  node.flips = flips;
  node.bit = slot.bit;
  const auto id = static_cast<std::int32_t>(nodes_.size());

  if (slot.propagates) {
    node.origin = Origin::propagated;
    node.program = nodes_[parent].program;
    ++counters_.propagations;
  } else {
    node.origin = Origin::synthesized;
    ++counters_.synth_queries;
    ++queries_per_depth_[node.length];
    std::string sigma = sigma_of(parent);
    sigma.push_back(static_cast<char>('0' + slot.bit));
    const ConstraintString cs(sigma);
    auto result = problem_.synthesizer->synthesize(samples_, cs);
    if (result.status == SynthesisResult::Status::unknown && cfg_.retry_unknown) {
      ++counters_.retries;
      std::vector<Example> examples(cs.size());
      for (std::size_t i = 0; i < cs.size(); ++i) {
        examples[i].x.assign(samples_[i].begin(), samples_[i].end());
        examples[i].bit = cs[i];
      }
      result = problem_.synthesizer->retry(examples);
    }
    switch (result.status) {
      case SynthesisResult::Status::found:
        node.program = static_cast<std::int32_t>(programs_.size());
        programs_.push_back(std::move(*result.program));
        break;
      case SynthesisResult::Status::unrealizable:
        node.outcome = Outcome::unrealizable;
        ++counters_.unrealizable;
        break;
      case SynthesisResult::Status::unknown:
        node.outcome = Outcome::unknown;
        ++counters_.unknown;
        break;
    }
    nodes_[parent].child[slot.bit] = id;
    nodes_.push_back(node);
    levels_[node.length].push_back(id);
    stale_from_ = std::min<std::size_t>(stale_from_, node.length);
    if (node.outcome == Outcome::program) consider(node.program, sigma);
    schedule_children(id);
    return;
  }
  nodes_[parent].child[slot.bit] = id;
  nodes_.push_back(node);
  levels_[node.length].push_back(id);
  stale_from_ = std::min<std::size_t>(stale_from_, node.length);
  schedule_children(id);
}

bool SearchEngine::step() {
  if (!started_) {
    initialize();
    return true;
  }
  while (cursor_ >= 1 && cursor_ <= depth_) {
    auto& pending = work_[cursor_];
    if (!cursor_sorted_) {
      // Parents one level up are final for this pass.
      refresh_levels(cursor_ - 1);
      std::stable_sort(pending.begin(), pending.end(), [&](const Slot& a, const Slot& b) {
        const auto ra = nodes_[a.parent].rank;
        const auto rb = nodes_[b.parent].rank;
        if (ra != rb) return ra < rb;
        return a.propagates > b.propagates;
      });
      cursor_sorted_ = true;
    }
    if (work_pos_ < pending.size()) {
      if (nodes_.size() >= cfg_.node_budget) {
        stop_reason_ = "node budget";
        return false;
      }
      const Slot slot = pending[work_pos_++];
      explore(slot);
      return true;
    }
    pending.clear();
    pending.shrink_to_fit();
    ++cursor_;
    work_pos_ = 0;
    cursor_sorted_ = false;
  }
  if (depth_ >= cfg_.depth_budget) {
    stop_reason_ = "depth budget";
    return false;
  }
  deepen();
  return true;
}

SearchReport SearchEngine::run() {
  if (!started_) {
    start_ = std::chrono::steady_clock::now();
    if (cfg_.time_budget_s <= 0.0) {
      // No time at all: not even the root is set up.
      started_ = true;
      record_tau();
      depth_series_.push_back({0.0, 0.0});
      levels_.push_back({});
      stop_reason_ = "time budget";
      final_wall_s_ = elapsed();
      return report();
    }
  }
  while (true) {
    if (elapsed() >= cfg_.time_budget_s) {
      stop_reason_ = "time budget";
      break;
    }
    if (!step()) break;
  }
  final_wall_s_ = elapsed();
  return report();
}

SearchReport SearchEngine::report() const {
  SearchReport r;
  r.class_id = problem_.synthesizer->family()->class_id();
  r.tau_mode = cfg_.tau_mode;
  r.denominator = cfg_.denominator;
  r.seed = cfg_.seed;
  r.depth = depth_;
  r.tau_initial = cfg_.tau;
  r.tau_final = tau_;
  r.best = best_;
  r.counters = counters_;
  r.queries_per_depth = queries_per_depth_;
  r.tau_trace = tau_trace_;
  r.depth_series = depth_series_;
  r.error_series = error_series_;
  r.wall_s = final_wall_s_ > 0.0 ? final_wall_s_ : (started_ ? elapsed() : 0.0);
  r.sample_hash = samples_.hash(samples_.size());
  r.stop_reason = stop_reason_;
  r.node_count = nodes_.size();
  r.verifier_samples = problem_.verifier->config().samples;
  r.verifier_confidence = problem_.verifier->config().confidence;
  return r;
}

std::vector<SearchEngine::ExploredNode> SearchEngine::explored() const {
  std::vector<ExploredNode> out;
  out.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    ExploredNode e;
    e.sigma = sigma_of(static_cast<std::int32_t>(i));
    e.outcome = n.outcome;
    e.origin = n.origin == Origin::root ? "root" : n.origin == Origin::propagated ? "propagated" : "synthesized";
    if (n.outcome == Outcome::program) e.params = programs_[n.program].params();
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

nlohmann::json series_json(const std::vector<TimePoint>& s) {
  auto arr = nlohmann::json::array();
  for (const auto& p : s) arr.push_back({p.time_s, p.value});
  return arr;
}

nlohmann::json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"half_width", e.half_width}, {"ci", {e.value - e.half_width, e.value + e.half_width}},
          {"hits", e.hits}, {"samples", e.samples}};
}

}  // namespace

nlohmann::json to_json(const SearchReport& r) {
  nlohmann::json j;
  j["class"] = r.class_id;
  j["tau_mode"] = to_string(r.tau_mode);
  j["threshold_denominator"] = to_string(r.denominator);
  j["seed"] = r.seed;
  j["depth"] = r.depth;
  j["tau_initial"] = r.tau_initial;
  j["tau_final"] = r.tau_final;
  if (r.best) {
    nlohmann::json b;
    b["params"] = r.best->program.params();
    b["error"] = r.best->error.value;
    b["ci"] = {r.best->error.value - r.best->error.half_width, r.best->error.value + r.best->error.half_width};
    b["sigma"] = r.best->sigma;
    b["found_at_s"] = r.best->found_at_s;
    auto terms = nlohmann::json::array();
    for (const auto& t : r.best->verdict.terms) terms.push_back(estimate_json(t));
    b["terms"] = terms;
    b["low_conditioning"] = r.best->verdict.low_conditioning;
    j["best"] = b;
  } else {
    j["best"] = nullptr;
  }
  j["counters"] = {{"synth_queries", r.counters.synth_queries},
                   {"propagations", r.counters.propagations},
                   {"blocked_nodes", r.counters.blocked_nodes},
                   {"unblocked_later", r.counters.unblocked_later},
                   {"ver_calls", r.counters.ver_calls},
                   {"ver_cache_hits", r.counters.ver_cache_hits},
                   {"unrealizable", r.counters.unrealizable},
                   {"unknown", r.counters.unknown},
                   {"retries", r.counters.retries}};
  j["queries_per_depth"] = r.queries_per_depth;
  j["tau_trace"] = series_json(r.tau_trace);
  j["series"] = {{"depth", series_json(r.depth_series)}, {"best_error", series_json(r.error_series)}};
  j["wall_s"] = r.wall_s;
  j["sample_hash"] = r.sample_hash;
  j["stop_reason"] = r.stop_reason;
  j["node_count"] = r.node_count;
  j["verifier"] = {{"samples", r.verifier_samples},
                   {"confidence", r.verifier_confidence},
                   {"note", "acceptance is decided on point estimates; intervals are diagnostic"}};
  return j;
}

std::string series_csv(const std::vector<TimePoint>& series) {
  std::ostringstream os;
  os.precision(10);
  os << "time_s,value\n";
  for (const auto& p : series) os << p.time_s << "," << p.value << "\n";
  return os.str();
}

SearchReport run(Problem problem, const SearchConfig& cfg) {
  SearchEngine engine(std::move(problem), cfg);
  return engine.run();
}

}  // namespace digits::search
