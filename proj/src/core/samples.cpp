#include "digits/core/samples.hpp"

#include <algorithm>
#include <cstring>

#include "digits/core/error.hpp"

namespace digits {

void SampleSequence::append(std::span<const double> point) {
  if (point.size() != dim_) throw ContractViolation("sample point has the wrong dimension");
  data_.insert(data_.end(), point.begin(), point.end());
}

std::uint64_t SampleSequence::hash(std::size_t prefix) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const std::size_t count = std::min(prefix, size()) * dim_;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data_[i], sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

void draw_point(const InputDistribution& dist, std::uint64_t seed, std::uint64_t index,
                std::span<double> out) {
  CounterRng rng(seed, index, /*stream=*/0);
  dist.draw(rng, out);
}

SampleSequence sample(const InputDistribution& dist, std::uint64_t seed, std::size_t n) {
  SampleSequence seq(dist.dimension(), seed);
  for (std::size_t i = 0; i < n; ++i) extend(seq, dist);
  return seq;
}

void extend(SampleSequence& seq, const InputDistribution& dist) {
  if (seq.dim() != dist.dimension()) throw ContractViolation("sequence/distribution dimension mismatch");
  std::vector<double> point(dist.dimension());
  draw_point(dist, seq.seed(), seq.size(), point);
  seq.append(point);
}

}  // namespace digits
