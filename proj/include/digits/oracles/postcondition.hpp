#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "digits/sketch/ast.hpp"
#include "digits/sketch/evaluate.hpp"

namespace digits {

/// Boolean combination of comparisons between arithmetic expressions over
/// probability terms Pr[B], e.g.
///
///   Pr[ret == 1 && x1 <= 0] / Pr[x1 <= 0] >= Pr[ret == 1 && x1 >= 0] / Pr[x1 >= 0] && Pr[ret == 1] >= 0.1
///
/// An event B may mention `ret` (the program's output bit), the program's
/// input names, and `event_i` / `assert_i` (truth of the i-th assert, 0-based).
class Postcondition {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    enum class Kind { number, term, add, sub, mul, div, neg, lt, le, gt, ge, land, lor, lnot, constant };
    Kind kind = Kind::number;
    double value = 0.0;     // number; constant (0/1)
    std::size_t term = 0;   // index into terms()
    NodePtr lhs, rhs;
  };

  /// Throws sketch::SketchError (a ConfigError) on malformed text.
  static Postcondition parse(std::string_view text, const std::vector<std::string>& input_names,
                             std::size_t event_count);

  /// Pr[event_0] > theta_0 && Pr[event_1] > theta_1 && ...
  static Postcondition events_above(std::span<const double> thresholds, const std::vector<std::string>& input_names);

  const std::string& text() const { return text_; }
  std::size_t term_count() const { return term_texts_.size(); }
  const std::vector<std::string>& term_texts() const { return term_texts_; }
  const NodePtr& root() const { return root_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t event_count() const { return event_count_; }

  /// Marks, for one observation, which terms' events hold. `row` has
  /// term_count() entries.
  void mark_terms(int output, std::span<const double> x, std::span<const char> events, std::span<char> row) const;

  struct Outcome {
    bool holds = false;
    /// Some ratio had a zero denominator; `holds` is then false.
    bool degenerate = false;
    /// Smallest nonzero denominator seen (1 when there are no divisions).
    double min_denominator = 1.0;
  };
  Outcome evaluate(std::span<const double> term_values) const;

 private:
  std::string text_;
  NodePtr root_;
  std::vector<std::string> term_texts_;
  // Each event compiled as a hole-free function of (ret, inputs..., events...).
  std::vector<sketch::CompiledSketch> events_;
  std::size_t input_dim_ = 0;
  std::size_t event_count_ = 0;
};

}  // namespace digits
