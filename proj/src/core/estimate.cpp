#include "digits/core/estimate.hpp"

#include <cmath>
#include <vector>

#include "digits/core/error.hpp"
#include "digits/core/samples.hpp"

namespace digits {

double hoeffding_half_width(std::size_t n, double delta) {
  if (n == 0) throw ContractViolation("half-width needs at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw ContractViolation("delta must lie in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

Estimate empirical_error(const Program& p, const Program& spec, const InputDistribution& dist, std::size_t n,
                         std::uint64_t seed, double confidence, Execution exec) {
  if (n == 0) throw ContractViolation("empirical_error needs n >= 1");
  if (p.input_dim() != dist.dimension() || spec.input_dim() != dist.dimension()) {
    throw ContractViolation("program and distribution dimensions differ");
  }
  const std::size_t dim = dist.dimension();
  const std::size_t hits = count_indices(n, exec, [&](std::size_t i) {
    thread_local std::vector<double> x;
    x.resize(dim);
    draw_point(dist, seed, i, x);
    return p.evaluate(x) != spec.evaluate(x);
  });
  Estimate e;
  e.hits = hits;
  e.samples = n;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.half_width = hoeffding_half_width(n, 1.0 - confidence);
  return e;
}

}  // namespace digits
