#include "digits/search/naive.hpp"

#include "digits/analysis/dichotomies.hpp"
#include "digits/core/error.hpp"

namespace digits::search {

NaiveResult naive_digits(const Synthesizer& synth, const Verifier& verifier, const SampleSequence& s, std::size_t m) {
  if (m > 20) throw ConfigError("exhaustive search is limited to 20 points");
  if (m > s.size()) throw ContractViolation("m exceeds the sample sequence");
  NaiveResult out;
  const std::size_t total = std::size_t{1} << m;
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::string bits(m, '0');
    for (std::size_t i = 0; i < m; ++i) bits[i] = ((mask >> (m - 1 - i)) & 1u) ? '1' : '0';
    ++out.synth_queries;
    auto r = synth.synthesize(s, ConstraintString(bits));
    if (!r.found()) continue;
    out.realizable.push_back(bits);
    out.programs.push_back(*r.program);
  }
  for (const auto& p : out.programs) {
    const auto a = verifier.assess(p);
    if (!a.verdict.accepted) continue;
    if (!out.best_error || a.error.value < out.best_error->value) {
      out.best = p;
      out.best_error = a.error;
    }
  }
  return out;
}

std::size_t predicted_queries(const Synthesizer& synth, const SampleSequence& s, std::size_t m) {
  return analysis::predicted_queries(synth, s, m);
}

}  // namespace digits::search
