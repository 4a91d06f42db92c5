#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "digits/core/rng.hpp"

namespace digits {

struct UniformBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Variance is stored, not standard deviation: a component written as
/// gaussian(mean=30, variance=9) has standard deviation 3. A zero variance
/// is a point mass, which is how discrete choices are expressed.
struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> variance;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;
};

class InputDistribution;

/// Independent blocks laid out one after another in the input vector.
struct ProductDistribution {
  std::vector<InputDistribution> parts;
};

/// Seeded, sampleable joint distribution over program inputs. Immutable
/// after construction; every factory validates its parameters and throws
/// ConfigError on nonsense.
class InputDistribution {
 public:
  using Kind = std::variant<UniformBox, GaussianMixture, ProductDistribution>;

  static InputDistribution uniform_box(std::vector<double> lo, std::vector<double> hi);
  static InputDistribution gaussian_mixture(std::vector<GaussianComponent> components);
  static InputDistribution gaussian(std::vector<double> mean, std::vector<double> variance);
  static InputDistribution product(std::vector<InputDistribution> parts);

  /// Schema: {"kind": "uniform_box", "lo": [...], "hi": [...]}
  ///         {"kind": "gaussian_mixture", "components": [{"weight", "mean", "variance"}]}
  ///         {"kind": "product", "parts": [<distribution>, ...]}
  static InputDistribution from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t dimension() const { return dim_; }
  const Kind& kind() const { return kind_; }
  const UniformBox* as_uniform_box() const { return std::get_if<UniformBox>(&kind_); }

  /// Fills `out` (size == dimension()) with one draw, consuming uniforms from
  /// `rng` in a fixed order: product parts left to right; for a mixture one
  /// uniform picks the component, then one normal per coordinate.
  void draw(CounterRng& rng, std::span<double> out) const;

 private:
  explicit InputDistribution(Kind kind);

  Kind kind_;
  std::size_t dim_ = 0;
};

}  // namespace digits
