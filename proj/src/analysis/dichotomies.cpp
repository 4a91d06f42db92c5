#include "digits/analysis/dichotomies.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <functional>
#include <unordered_set>
#include <variant>

#include "digits/core/box_mass.hpp"
#include "digits/core/error.hpp"

namespace digits::analysis {

std::size_t count_dichotomies_enumerated(const Synthesizer& synth, const SampleSequence& s, std::size_t prefix,
                                         Execution exec) {
  if (!synth.exact()) throw UnsupportedError("dichotomy enumeration needs an exact synthesizer");
  if (prefix > kMaxEnumerated) throw ConfigError("dichotomy enumeration is limited to 20 points");
  if (prefix > s.size()) throw ContractViolation("prefix exceeds the sample sequence");
  const std::size_t total = std::size_t{1} << prefix;
  return count_indices(total, exec, [&](std::size_t mask) {
    ConstraintString sigma;
    // Bit prefix-1-i of the mask labels point i, so masks count up in
    // lexicographic order of the labeling.
    for (std::size_t i = 0; i < prefix; ++i) sigma.push_back(static_cast<int>((mask >> (prefix - 1 - i)) & 1u));
    return synth.synthesize(s, sigma).found();
  });
}

namespace {

std::size_t distinct_count(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

std::size_t boxes_multi_dim(const SampleSequence& s, std::size_t prefix, Execution exec) {
  const std::size_t d = s.dim();
  const std::size_t words = (prefix + 63) / 64;
  // Candidate bounds per axis: the distinct coordinates inside [-1, 1].
  std::vector<std::vector<double>> coords(d);
  std::vector<std::size_t> inside_points;
  for (std::size_t i = 0; i < prefix; ++i) {
    bool in = true;
    for (std::size_t j = 0; j < d; ++j) in = in && s[i][j] >= -1.0 && s[i][j] <= 1.0;
    if (!in) continue;
    inside_points.push_back(i);
    for (std::size_t j = 0; j < d; ++j) coords[j].push_back(s[i][j]);
  }
  for (auto& c : coords) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  // Enumerate one (lo, hi) pair per axis; the outermost axis is split across threads.
  std::vector<std::pair<std::size_t, std::size_t>> first_axis;
  for (std::size_t a = 0; a < coords[0].size(); ++a) {
    for (std::size_t b = a; b < coords[0].size(); ++b) first_axis.emplace_back(a, b);
  }
  struct Hash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (auto w : v) h = (h ^ w) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_set<std::vector<std::uint64_t>, Hash> seen;
  seen.insert(std::vector<std::uint64_t>(words, 0));  // the empty box

  auto visit = [&](std::size_t k, std::unordered_set<std::vector<std::uint64_t>, Hash>& out) {
    std::vector<std::size_t> lo(d), hi(d);
    lo[0] = first_axis[k].first;
    hi[0] = first_axis[k].second;
    // Odometer over the remaining axes.
    std::function<void(std::size_t)> rec = [&](std::size_t axis) {
      if (axis == d) {
        std::vector<std::uint64_t> mask(words, 0);
        for (std::size_t i : inside_points) {
          bool in = true;
          for (std::size_t j = 0; j < d && in; ++j) in = coords[j][lo[j]] <= s[i][j] && s[i][j] <= coords[j][hi[j]];
          if (in) mask[i / 64] |= std::uint64_t{1} << (i % 64);
        }
        out.insert(std::move(mask));
        return;
      }
      for (std::size_t a = 0; a < coords[axis].size(); ++a) {
        for (std::size_t b = a; b < coords[axis].size(); ++b) {
          lo[axis] = a;
          hi[axis] = b;
          rec(axis + 1);
        }
      }
    };
    rec(1);
  };

  const auto n = static_cast<std::int64_t>(first_axis.size());
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      std::unordered_set<std::vector<std::uint64_t>, Hash> local;
#pragma omp for schedule(dynamic)
      for (std::int64_t k = 0; k < n; ++k) visit(static_cast<std::size_t>(k), local);
#pragma omp critical
      seen.insert(local.begin(), local.end());
    }
  } else {
    for (std::int64_t k = 0; k < n; ++k) visit(static_cast<std::size_t>(k), seen);
  }
  return seen.size();
}

}  // namespace

std::optional<std::size_t> count_dichotomies_closed_form(const ProgramFamily& family, const SampleSequence& s,
                                                         std::size_t prefix, Execution exec) {
  if (prefix > s.size()) throw ContractViolation("prefix exceeds the sample sequence");
  if (family.class_id() == "interval") {
    std::vector<double> v;
    for (std::size_t i = 0; i < prefix; ++i) {
      if (s[i][0] > 0.0 && s[i][0] <= 1.0) v.push_back(s[i][0]);
    }
    return distinct_count(std::move(v)) + 1;
  }
  if (family.class_id() == "hyperrectangle") {
    if (family.input_dim() == 1) {
      std::vector<double> v;
      for (std::size_t i = 0; i < prefix; ++i) {
        if (s[i][0] >= -1.0 && s[i][0] <= 1.0) v.push_back(s[i][0]);
      }
      const std::size_t k = distinct_count(std::move(v));
      return k * (k + 1) / 2 + 1;
    }
    return boxes_multi_dim(s, prefix, exec);
  }
  return std::nullopt;
}

std::size_t count_dichotomies(const Synthesizer& synth, const SampleSequence& s, std::size_t prefix, Execution exec) {
  if (auto c = count_dichotomies_closed_form(*synth.family(), s, prefix, exec)) return *c;
  return count_dichotomies_enumerated(synth, s, prefix, exec);
}

std::size_t predicted_queries(const Synthesizer& synth, const SampleSequence& s, std::size_t m, bool force_enumeration,
                              Execution exec) {
  if (m > s.size()) throw ContractViolation("m exceeds the sample sequence");
  std::size_t total = 0;
  for (std::size_t l = 1; l <= m; ++l) {
    total += force_enumeration ? count_dichotomies_enumerated(synth, s, l - 1, exec)
                               : count_dichotomies(synth, s, l - 1, exec);
  }
  return total;
}

// Masses are differences of box volumes; rounding can push a mass of exactly
// epsilon just above it.
constexpr double kMassTolerance = 1e-12;

bool epsilon_net_check(const ProgramFamily& family, const Program& target, const InputDistribution& dist,
                       double epsilon, const SampleSequence& s, std::size_t prefix, const NetCheckOptions& options) {
  const auto* box = std::get_if<UniformBox>(&dist.kind());
  if (box == nullptr) throw UnsupportedError("epsilon-net check needs a uniform box distribution");
  if (!(options.resolution > 0.0)) throw ConfigError("grid resolution must be positive");
  if (prefix > s.size()) throw ContractViolation("prefix exceeds the sample sequence");
  const bool interval = family.class_id() == "interval";
  if (!interval && !(family.class_id() == "hyperrectangle" && family.input_dim() == 1)) {
    throw UnsupportedError("epsilon-net check supports intervals and one-dimensional boxes");
  }
  const auto region = accept_region(target);
  if (!region || region->lo.size() != 1) throw UnsupportedError("epsilon-net target must be a one-dimensional box program");

  std::vector<double> pts;
  for (std::size_t i = 0; i < prefix; ++i) pts.push_back(s[i][0]);
  std::sort(pts.begin(), pts.end());
  auto count_in = [&](double lo, double hi) -> std::size_t {
    if (lo > hi) return 0;
    return static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), hi) -
                                    std::lower_bound(pts.begin(), pts.end(), lo));
  };
  const double tlo = region->empty ? 1.0 : region->lo[0];
  const double thi = region->empty ? -1.0 : region->hi[0];
  const std::size_t target_count = count_in(tlo, thi);

  const double lo_min = interval ? 0.0 : -1.0;
  const auto steps = static_cast<std::size_t>(std::llround((1.0 - lo_min) / options.resolution));
  auto grid = [&](std::size_t i) { return std::min(1.0, lo_min + static_cast<double>(i) * options.resolution); };

  // A candidate [l, u] agrees with the target on every point iff the two
  // closed intervals contain exactly the same points.
  auto bad = [&](double l, double u) {
    const std::size_t own = count_in(l, u);
    const std::size_t both = count_in(std::max(l, tlo), std::min(u, thi));
    if (own + target_count - 2 * both != 0) return false;
    const Program candidate = interval ? make_interval(u) : make_box(std::vector<double>{l}, std::vector<double>{u});
    return disagreement_mass(candidate, target, *box) > epsilon + kMassTolerance;
  };

  std::size_t violations = 0;
  if (interval) {
    violations = count_indices(steps + 1, options.execution, [&](std::size_t i) { return bad(0.0, grid(i)); });
  } else {
    // Row i fixes the lower end; columns sweep the upper end.
    violations = count_indices(steps + 1, options.execution, [&](std::size_t i) {
      const double l = grid(i);
      for (std::size_t j = i; j <= steps; ++j) {
        if (bad(l, grid(j))) return true;
      }
      return false;
    });
    // The empty box labels every point 0.
    if (target_count == 0 && disagreement_mass(make_empty_box(1), target, *box) > epsilon + kMassTolerance) ++violations;
  }
  return violations == 0;
}

}  // namespace digits::analysis
