#pragma once

#include <cstddef>
#include <optional>

namespace digits::analysis {

struct LearningParams {
  double epsilon = 0.1;
  double delta = 0.05;
  unsigned vc_dim = 1;
  /// Robustness radius; carried for reporting only. When set, epsilon <= alpha.
  std::optional<double> alpha;
};

/// Throws ConfigError on invalid parameters.
void validate(const LearningParams& p);

/// ceil((1/eps) * (4 log2(2/delta) + 8 d log2(13/eps))): with this many
/// samples, the sample set is an eps-net with probability >= 1 - delta for a
/// class of VC dimension d.
std::size_t vc_cost(const LearningParams& p);
std::size_t vc_cost(double epsilon, double delta, unsigned vc_dim);

/// ceil(ln(2/delta) / (2 eps^2)), at least 1: samples for a two-sided
/// Hoeffding interval of half-width eps at confidence 1 - delta.
std::size_t hoeffding_n(double epsilon, double delta);

/// (e m / d)^d. Throws ConfigError when m < d or d = 0.
double sauer_bound(unsigned vc_dim, std::size_t m);

struct TailParams {
  std::size_t m = 0;
  /// Success probability of each Bernoulli draw.
  double k = 0.0;
  double tau = 1.0;
};

/// Throws ConfigError unless 0 <= k < tau <= 1.
void validate(const TailParams& t);

/// Pr[X > tau m] for X ~ Binomial(m, k), summed in log space from
/// i = floor(tau m) + 1 to m.
double tail_exact(const TailParams& t);

struct TailBounds {
  /// exp(-2 m (tau - k)^2)
  double hoeffding = 1.0;
  /// exp(-m (tau ln(tau/k) + (1 - tau) ln((1 - tau)/(1 - k))))
  double kl = 1.0;
};

/// Closed-form upper bounds on tail_exact. For k = 0 or tau = 1 the tail is
/// computed exactly and both fields carry that value.
TailBounds tail_bounds(const TailParams& t);

/// Failure probability of the thresholded search: the sample set fails to
/// be an eps-net (net_failure) or the specification's labeling is pruned
/// (the binomial tail). total = min(1, net_failure + tail).
struct FailureBound {
  double net_failure = 0.0;
  double tail = 0.0;
  double total = 0.0;
};
FailureBound failure_bound(double net_failure, const TailParams& t);

}  // namespace digits::analysis
