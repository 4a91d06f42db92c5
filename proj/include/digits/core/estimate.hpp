#pragma once

#include <cstddef>
#include <cstdint>

#include "digits/core/distribution.hpp"
#include "digits/core/parallel.hpp"
#include "digits/core/program.hpp"

namespace digits {

/// Point estimate of a probability with a two-sided Hoeffding half-width.
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// sqrt(ln(2/delta) / (2n)): with probability >= 1 - delta the empirical mean
/// of n bounded draws lies within this distance of the true mean.
double hoeffding_half_width(std::size_t n, double delta);

/// Fraction of n fresh draws (sample(dist, seed, n)) on which p and spec
/// disagree. The draws are the same points `sample` would return, so the hit
/// count equals hamming(sample(dist, seed, n), n, p, spec).
Estimate empirical_error(const Program& p, const Program& spec, const InputDistribution& dist, std::size_t n,
                         std::uint64_t seed, double confidence = 0.95,
                         Execution exec = Execution::parallel);

}  // namespace digits
