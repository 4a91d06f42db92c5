#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "digits/core/distribution.hpp"

namespace digits {

/// Ordered, append-only list of input points. Position i (0-based) holds
/// the point drawn when the search deepened from depth i to i + 1, i.e.
/// sample_{i+1} in 1-based notation.
class SampleSequence {
 public:
  SampleSequence(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> operator[](std::size_t i) const {
    return std::span<const double>(data_).subspan(i * dim_, dim_);
  }

  void append(std::span<const double> point);

  /// FNV-1a over the raw bytes of the first `prefix` points. Runs that share
  /// a sample prefix share this hash.
  std::uint64_t hash(std::size_t prefix) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<double> data_;
};

/// Point `index` of the sequence addressed by `seed`. Pure function of
/// (dist, seed, index).
void draw_point(const InputDistribution& dist, std::uint64_t seed, std::uint64_t index,
                std::span<double> out);

/// n i.i.d. points; a shorter run with the same seed is a prefix of a longer.
SampleSequence sample(const InputDistribution& dist, std::uint64_t seed, std::size_t n);

/// Appends the next point (index = current size) of `seq`'s seeded stream.
void extend(SampleSequence& seq, const InputDistribution& dist);

}  // namespace digits
