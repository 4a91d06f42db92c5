#include "digits/analysis/learning.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "digits/core/error.hpp"

namespace digits::analysis {

void validate(const LearningParams& p) {
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0,1]");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (p.vc_dim == 0) throw ConfigError("VC dimension must be positive");
  if (p.alpha && !(p.epsilon <= *p.alpha)) throw ConfigError("epsilon must not exceed alpha");
}

std::size_t vc_cost(const LearningParams& p) {
  validate(p);
  const double eps = p.epsilon;
  const double value = (1.0 / eps) * (4.0 * std::log2(2.0 / p.delta) + 8.0 * p.vc_dim * std::log2(13.0 / eps));
  return static_cast<std::size_t>(std::ceil(value));
}

std::size_t vc_cost(double epsilon, double delta, unsigned vc_dim) {
  return vc_cost(LearningParams{epsilon, delta, vc_dim, std::nullopt});
}

std::size_t hoeffding_n(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  const double n = std::ceil(std::log(2.0 / delta) / (2.0 * epsilon * epsilon));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

double sauer_bound(unsigned vc_dim, std::size_t m) {
  if (vc_dim == 0) throw ConfigError("VC dimension must be positive");
  if (m < vc_dim) throw ConfigError("Sauer bound requires m >= d");
  const double d = vc_dim;
  return std::pow(std::exp(1.0) * static_cast<double>(m) / d, d);
}

void validate(const TailParams& t) {
  if (!(t.k >= 0.0 && t.k < t.tau && t.tau <= 1.0)) throw ConfigError("tail parameters need 0 <= k < tau <= 1");
}

double tail_exact(const TailParams& t) {
  validate(t);
  const std::size_t m = t.m;
  const auto first = static_cast<std::size_t>(std::floor(t.tau * static_cast<double>(m) + 1e-9)) + 1;
  if (first > m || t.k == 0.0) return 0.0;
  const double log_k = std::log(t.k);
  const double log_q = std::log1p(-t.k);
  const double lgm = std::lgamma(static_cast<double>(m) + 1.0);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(m - first + 1);
  for (std::size_t i = first; i <= m; ++i) {
    const double di = static_cast<double>(i);
    const double term = lgm - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(m - i) + 1.0) + di * log_k +
                        static_cast<double>(m - i) * log_q;
    terms.push_back(term);
    max_term = std::max(max_term, term);
  }
  double sum = 0.0;
  for (double term : terms) sum += std::exp(term - max_term);
  return std::min(1.0, std::exp(max_term + std::log(sum)));
}

TailBounds tail_bounds(const TailParams& t) {
  validate(t);
  if (t.k == 0.0 || t.tau >= 1.0) {
    const double exact = tail_exact(t);
    return {exact, exact};
  }
  const double m = static_cast<double>(t.m);
  const double gap = t.tau - t.k;
  TailBounds b;
  b.hoeffding = std::exp(-2.0 * m * gap * gap);
  const double divergence = t.tau * std::log(t.tau / t.k) + (1.0 - t.tau) * std::log((1.0 - t.tau) / (1.0 - t.k));
  b.kl = std::exp(-m * divergence);
  return b;
}

FailureBound failure_bound(double net_failure, const TailParams& t) {
  if (!(net_failure >= 0.0 && net_failure <= 1.0)) throw ConfigError("net failure probability must lie in [0,1]");
  FailureBound f;
  f.net_failure = net_failure;
  f.tail = tail_exact(t);
  f.total = std::min(1.0, f.net_failure + f.tail);
  return f;
}

}  // namespace digits::analysis
