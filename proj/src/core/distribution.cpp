#include "digits/core/distribution.hpp"

#include <cmath>
#include <string>

#include "digits/core/error.hpp"

namespace digits {

namespace {

std::size_t dimension_of(const InputDistribution::Kind& kind) {
  return std::visit(
      [](const auto& k) -> std::size_t {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformBox>) {
          return k.lo.size();
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return k.components.front().mean.size();
        } else {
          std::size_t d = 0;
          for (const auto& part : k.parts) d += part.dimension();
          return d;
        }
      },
      kind);
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + " must be finite");
  }
}

std::vector<double> read_vector(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw ConfigError(std::string("distribution field '") + field + "' must be an array");
  }
  std::vector<double> out;
  for (const auto& x : j.at(field)) {
    if (!x.is_number()) throw ConfigError(std::string("non-numeric entry in '") + field + "'");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

InputDistribution::InputDistribution(Kind kind) : kind_(std::move(kind)) { dim_ = dimension_of(kind_); }

InputDistribution InputDistribution::uniform_box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size()) {
    throw ConfigError("uniform_box needs non-empty lo/hi of equal length");
  }
  require_finite(lo, "uniform_box.lo");
  require_finite(hi, "uniform_box.hi");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw ConfigError("uniform_box requires lo <= hi componentwise");
  }
  return InputDistribution(UniformBox{std::move(lo), std::move(hi)});
}

InputDistribution InputDistribution::gaussian_mixture(std::vector<GaussianComponent> components) {
  if (components.empty()) throw ConfigError("gaussian_mixture needs at least one component");
  const std::size_t d = components.front().mean.size();
  if (d == 0) throw ConfigError("gaussian_mixture components must have a positive dimension");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.mean.size() != d || c.variance.size() != d) {
      throw ConfigError("gaussian_mixture components disagree on dimension");
    }
    if (!(c.weight >= 0.0 && c.weight <= 1.0)) throw ConfigError("mixture weight outside [0,1]");
    require_finite(c.mean, "gaussian_mixture.mean");
    require_finite(c.variance, "gaussian_mixture.variance");
    for (double v : c.variance) {
      if (v < 0.0) throw ConfigError("gaussian_mixture variance must be >= 0");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  return InputDistribution(GaussianMixture{std::move(components)});
}

InputDistribution InputDistribution::gaussian(std::vector<double> mean, std::vector<double> variance) {
  return gaussian_mixture({GaussianComponent{1.0, std::move(mean), std::move(variance)}});
}

InputDistribution InputDistribution::product(std::vector<InputDistribution> parts) {
  if (parts.empty()) throw ConfigError("product distribution needs at least one part");
  return InputDistribution(ProductDistribution{std::move(parts)});
}

void InputDistribution::draw(CounterRng& rng, std::span<double> out) const {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformBox>) {
          for (std::size_t i = 0; i < k.lo.size(); ++i) {
            out[i] = k.lo[i] + (k.hi[i] - k.lo[i]) * rng.uniform();
          }
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          const double u = rng.uniform();
          std::size_t chosen = k.components.size() - 1;
          double acc = 0.0;
          for (std::size_t c = 0; c < k.components.size(); ++c) {
            acc += k.components[c].weight;
            if (u < acc) {
              chosen = c;
              break;
            }
          }
          const auto& comp = k.components[chosen];
          for (std::size_t i = 0; i < comp.mean.size(); ++i) {
            out[i] = comp.mean[i] + std::sqrt(comp.variance[i]) * rng.normal();
          }
        } else {
          std::size_t offset = 0;
          for (const auto& part : k.parts) {
            part.draw(rng, out.subspan(offset, part.dimension()));
            offset += part.dimension();
          }
        }
      },
      kind_);
}

InputDistribution InputDistribution::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("distribution must be an object with a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform_box") {
    return uniform_box(read_vector(j, "lo"), read_vector(j, "hi"));
  }
  if (kind == "gaussian_mixture") {
    if (!j.contains("components") || !j.at("components").is_array()) {
      throw ConfigError("gaussian_mixture needs a 'components' array");
    }
    std::vector<GaussianComponent> comps;
    for (const auto& c : j.at("components")) {
      GaussianComponent g;
      g.weight = c.value("weight", 1.0);
      g.mean = read_vector(c, "mean");
      g.variance = read_vector(c, "variance");
      comps.push_back(std::move(g));
    }
    return gaussian_mixture(std::move(comps));
  }
  if (kind == "product") {
    if (!j.contains("parts") || !j.at("parts").is_array()) {
      throw ConfigError("product needs a 'parts' array");
    }
    std::vector<InputDistribution> parts;
    for (const auto& p : j.at("parts")) parts.push_back(from_json(p));
    return product(std::move(parts));
  }
  throw ConfigError("unsupported distribution kind '" + kind + "'");
}

nlohmann::json InputDistribution::to_json() const {
  return std::visit(
      [](const auto& k) -> nlohmann::json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformBox>) {
          return {{"kind", "uniform_box"}, {"lo", k.lo}, {"hi", k.hi}};
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          nlohmann::json comps = nlohmann::json::array();
          for (const auto& c : k.components) {
            comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
          }
          return {{"kind", "gaussian_mixture"}, {"components", comps}};
        } else {
          nlohmann::json parts = nlohmann::json::array();
          for (const auto& p : k.parts) parts.push_back(p.to_json());
          return {{"kind", "product"}, {"parts", parts}};
        }
      },
      kind_);
}

}  // namespace digits
