#pragma once

#include <optional>
#include <vector>

#include "digits/core/distribution.hpp"
#include "digits/core/program.hpp"

namespace digits {

/// Axis-aligned region on which a program outputs 1. Infinite bounds are
/// allowed (constant-1 programs).
struct AcceptRegion {
  std::vector<double> lo;
  std::vector<double> hi;
  bool empty = false;
};

/// Region for interval, hyperrectangle and constant programs; nullopt for
/// anything else.
std::optional<AcceptRegion> accept_region(const Program& p);

/// Exact probability of `region` under a uniform box distribution.
double uniform_mass(const AcceptRegion& region, const UniformBox& dist);

/// Exact Pr[a(x) != b(x)] for box-like programs under a uniform box.
/// Throws UnsupportedError for other program classes.
double disagreement_mass(const Program& a, const Program& b, const UniformBox& dist);

}  // namespace digits
