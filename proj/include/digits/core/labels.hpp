#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "digits/core/program.hpp"
#include "digits/core/samples.hpp"

namespace digits {

/// Binary string naming a partial output labeling of a sample sequence:
/// bit i is the required output on sample i (0-based). The empty string is
/// the root of the trie.
class ConstraintString {
 public:
  ConstraintString() = default;
  /// Parses a string of '0'/'1' characters; throws ContractViolation otherwise.
  explicit ConstraintString(std::string_view bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }

  void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
  ConstraintString extended(int bit) const;
  const std::string& str() const { return bits_; }

  friend auto operator<=>(const ConstraintString&, const ConstraintString&) = default;

 private:
  std::string bits_;
};

/// Labels of the first `prefix` samples under `p`.
ConstraintString labels_of(const Program& p, const SampleSequence& s, std::size_t prefix);

/// Either a program (labels computed by evaluation) or a fixed string read
/// positionally.
class LabelView {
 public:
  LabelView(const Program& p) : source_(&p) {}             // NOLINT(google-explicit-constructor)
  LabelView(const ConstraintString& s) : source_(&s) {}    // NOLINT(google-explicit-constructor)

  int at(const SampleSequence& s, std::size_t i) const;
  /// Longest prefix this view can label; unlimited for programs.
  std::size_t capacity() const;

 private:
  std::variant<const Program*, const ConstraintString*> source_;
};

/// |{i < prefix : a(x_i) != b(x_i)}|. Throws ContractViolation when a string
/// argument is shorter than the prefix or the prefix exceeds the sequence.
std::size_t hamming(const SampleSequence& s, std::size_t prefix, LabelView a, LabelView b);

}  // namespace digits
