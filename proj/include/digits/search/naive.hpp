#pragma once

#include <optional>
#include <string>
#include <vector>

#include "digits/core/samples.hpp"
#include "digits/oracles/synth.hpp"
#include "digits/oracles/verifier.hpp"

namespace digits::search {

struct NaiveResult {
  /// Labelings of all m points for which synthesis succeeded, in
  /// lexicographic order.
  std::vector<std::string> realizable;
  std::vector<Program> programs;
  std::optional<Program> best;
  std::optional<Estimate> best_error;
  std::size_t synth_queries = 0;
};

/// The exhaustive procedure: one synthesis query per labeling of the first m
/// points (2^m queries, m <= 20), then the lowest-error verified program
/// (first in lexicographic order of labelings on ties).
NaiveResult naive_digits(const Synthesizer& synth, const Verifier& verifier, const SampleSequence& s, std::size_t m);

/// Exact query count of the trie search with threshold 1 up to depth m;
/// see analysis::predicted_queries.
std::size_t predicted_queries(const Synthesizer& synth, const SampleSequence& s, std::size_t m);

}  // namespace digits::search
