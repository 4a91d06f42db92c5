#include "digits/core/labels.hpp"

#include <limits>

#include "digits/core/error.hpp"

namespace digits {

ConstraintString::ConstraintString(std::string_view bits) : bits_(bits) {
  for (char c : bits_) {
    if (c != '0' && c != '1') throw ContractViolation("constraint string may only contain '0' and '1'");
  }
}

ConstraintString ConstraintString::extended(int bit) const {
  ConstraintString out = *this;
  out.push_back(bit);
  return out;
}

ConstraintString labels_of(const Program& p, const SampleSequence& s, std::size_t prefix) {
  if (prefix > s.size()) throw ContractViolation("prefix longer than the sample sequence");
  ConstraintString out;
  for (std::size_t i = 0; i < prefix; ++i) out.push_back(p.evaluate(s[i]));
  return out;
}

int LabelView::at(const SampleSequence& s, std::size_t i) const {
  if (const auto* p = std::get_if<const Program*>(&source_)) return (*p)->evaluate(s[i]);
  return (*std::get<const ConstraintString*>(source_))[i];
}

std::size_t LabelView::capacity() const {
  if (const auto* str = std::get_if<const ConstraintString*>(&source_)) return (*str)->size();
  return std::numeric_limits<std::size_t>::max();
}

std::size_t hamming(const SampleSequence& s, std::size_t prefix, LabelView a, LabelView b) {
  if (prefix > s.size()) throw ContractViolation("hamming prefix longer than the sample sequence");
  if (a.capacity() < prefix || b.capacity() < prefix) {
    throw ContractViolation("label string shorter than the hamming prefix");
  }
  std::size_t distance = 0;
  for (std::size_t i = 0; i < prefix; ++i) {
    if (a.at(s, i) != b.at(s, i)) ++distance;
  }
  return distance;
}

}  // namespace digits
