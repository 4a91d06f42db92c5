#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "digits/core/distribution.hpp"
#include "digits/core/estimate.hpp"
#include "digits/core/program.hpp"
#include "digits/core/samples.hpp"
#include "digits/oracles/postcondition.hpp"

namespace digits {

struct VerifierConfig {
  double confidence = 0.95;
  /// Points per estimate.
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;
};

/// Throws ConfigError unless 0 < confidence < 1 and samples >= 1.
void validate(const VerifierConfig& cfg);

struct Verdict {
  bool accepted = false;
  /// A ratio's denominator was estimated as 0; the program is rejected.
  bool degenerate = false;
  /// Some ratio's denominator was estimated below 0.01.
  bool low_conditioning = false;
  /// One estimate per Pr term. Half-widths use confidence 1 - (1 - c)/T for
  /// T terms; the decision itself is taken on the point estimates.
  std::vector<Estimate> terms;
};

/// Statistical verifier and error oracle over one shared pool of points
/// (sample(dist, cfg.seed, cfg.samples)). Every program is judged on the same
/// points, so comparisons between candidates are not blurred by resampling.
class Verifier {
 public:
  Verifier(InputDistribution dist, Postcondition post, Program spec, VerifierConfig cfg);

  struct Assessment {
    Verdict verdict;
    Estimate error;
  };
  /// verify and error in one pass over the pool.
  Assessment assess(const Program& p) const;
  Verdict verify(const Program& p) const { return assess(p).verdict; }
  Estimate error(const Program& p) const { return assess(p).error; }

  const VerifierConfig& config() const { return cfg_; }
  const Postcondition& postcondition() const { return post_; }
  const Program& spec() const { return spec_; }
  const InputDistribution& distribution() const { return dist_; }
  std::size_t calls() const { return calls_.load(); }

 private:
  InputDistribution dist_;
  Postcondition post_;
  Program spec_;
  VerifierConfig cfg_;
  SampleSequence pool_;
  std::vector<char> spec_out_;
  mutable std::atomic<std::size_t> calls_{0};
};

/// One-shot verification on sample(dist, cfg.seed, cfg.samples).
Verdict verify(const Program& p, const InputDistribution& dist, const Postcondition& post, const VerifierConfig& cfg);

/// empirical_error(p, spec, dist, cfg.samples, cfg.seed, cfg.confidence).
Estimate error(const Program& p, const Program& spec, const InputDistribution& dist, const VerifierConfig& cfg);

}  // namespace digits
