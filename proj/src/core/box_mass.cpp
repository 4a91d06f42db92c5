#include "digits/core/box_mass.hpp"

#include <algorithm>
#include <limits>

#include "digits/core/error.hpp"

namespace digits {

std::optional<AcceptRegion> accept_region(const Program& p) {
  const auto id = p.class_id();
  const auto& params = p.params();
  AcceptRegion r;
  if (id == "interval") {
    r.lo = {0.0};
    r.hi = {params[0]};
  } else if (id == "hyperrectangle") {
    for (std::size_t j = 0; j < p.input_dim(); ++j) {
      r.lo.push_back(params[2 * j]);
      r.hi.push_back(params[2 * j + 1]);
      if (params[2 * j] > params[2 * j + 1]) r.empty = true;
    }
  } else if (id == "constant") {
    const double inf = std::numeric_limits<double>::infinity();
    r.lo.assign(p.input_dim(), -inf);
    r.hi.assign(p.input_dim(), inf);
    r.empty = params[0] == 0.0;
  } else {
    return std::nullopt;
  }
  return r;
}

double uniform_mass(const AcceptRegion& region, const UniformBox& dist) {
  if (region.empty) return 0.0;
  if (region.lo.size() != dist.lo.size()) throw ContractViolation("region/distribution dimension mismatch");
  double mass = 1.0;
  for (std::size_t j = 0; j < dist.lo.size(); ++j) {
    const double width = dist.hi[j] - dist.lo[j];
    if (width == 0.0) {
      // Point mass on this axis.
      if (dist.lo[j] < region.lo[j] || dist.lo[j] > region.hi[j]) return 0.0;
      continue;
    }
    const double overlap = std::min(region.hi[j], dist.hi[j]) - std::max(region.lo[j], dist.lo[j]);
    if (overlap <= 0.0) return 0.0;
    mass *= overlap / width;
  }
  return mass;
}

double disagreement_mass(const Program& a, const Program& b, const UniformBox& dist) {
  const auto ra = accept_region(a);
  const auto rb = accept_region(b);
  if (!ra || !rb) throw UnsupportedError("analytic mass needs interval, hyperrectangle or constant programs");
  AcceptRegion both;
  both.empty = ra->empty || rb->empty;
  for (std::size_t j = 0; j < ra->lo.size() && !both.empty; ++j) {
    both.lo.push_back(std::max(ra->lo[j], rb->lo[j]));
    both.hi.push_back(std::min(ra->hi[j], rb->hi[j]));
    if (both.lo.back() > both.hi.back()) both.empty = true;
  }
  const double ma = uniform_mass(*ra, dist);
  const double mb = uniform_mass(*rb, dist);
  const double mab = both.empty ? 0.0 : uniform_mass(both, dist);
  return std::max(0.0, ma + mb - 2.0 * mab);
}

}  // namespace digits
