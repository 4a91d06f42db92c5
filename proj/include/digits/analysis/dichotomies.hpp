#pragma once

#include <cstddef>
#include <memory>
#include <optional>

#include "digits/core/parallel.hpp"
#include "digits/core/program.hpp"
#include "digits/core/samples.hpp"
#include "digits/oracles/synth.hpp"

namespace digits::analysis {

/// Largest prefix accepted by the 2^m enumeration.
inline constexpr std::size_t kMaxEnumerated = 20;

/// |Π(S)| for the first `prefix` points of s, by trying all 2^prefix
/// labelings against an exact synthesizer. Throws UnsupportedError for
/// oracles that may answer unknown and ConfigError when prefix exceeds
/// kMaxEnumerated.
std::size_t count_dichotomies_enumerated(const Synthesizer& synth, const SampleSequence& s, std::size_t prefix,
                                         Execution exec = Execution::parallel);

/// Closed forms: [0,a]: (distinct points in (0,1]) + 1; boxes in [-1,1]
/// with d = 1: k(k+1)/2 + 1 for k distinct points; d >= 2: the distinct
/// point sets cut out by boxes whose faces pass through sample coordinates
/// (polynomial, practical up to a few dozen points). nullopt for other
/// classes.
std::optional<std::size_t> count_dichotomies_closed_form(const ProgramFamily& family, const SampleSequence& s,
                                                         std::size_t prefix, Execution exec = Execution::parallel);

/// Closed form when the class has one, otherwise enumeration.
std::size_t count_dichotomies(const Synthesizer& synth, const SampleSequence& s, std::size_t prefix,
                              Execution exec = Execution::parallel);

/// Sum over l = 1..m of |Π(x_1..x_{l-1})|: the exact number of synthesis
/// queries the trie search issues up to depth m with threshold 1 and an
/// exact synthesizer.
std::size_t predicted_queries(const Synthesizer& synth, const SampleSequence& s, std::size_t m,
                              bool force_enumeration = false, Execution exec = Execution::parallel);

struct NetCheckOptions {
  /// Grid step per parameter.
  double resolution = 1e-3;
  Execution execution = Execution::parallel;
};

/// True iff no program on the parameter grid whose exact disagreement mass
/// with `target` exceeds epsilon labels the first `prefix` points of s the
/// same way target does. Supports the interval class and boxes with d = 1
/// under a uniform distribution; throws UnsupportedError otherwise.
bool epsilon_net_check(const ProgramFamily& family, const Program& target, const InputDistribution& dist,
                       double epsilon, const SampleSequence& s, std::size_t prefix, const NetCheckOptions& options = {});

}  // namespace digits::analysis
