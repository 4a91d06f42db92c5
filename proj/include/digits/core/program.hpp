#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace digits {

/// Output bit plus the truth value of every assert event met on the run.
/// Box programs have no events.
struct Observation {
  int output = 0;
  std::vector<char> events;
};

/// A labeled point given to a synthesis oracle.
struct Example {
  std::vector<double> x;
  int bit = 0;
};

/// A parametric family of {0,1}-valued programs (intervals, boxes, a sketch
/// with holes). A Program is a family plus a concrete parameter vector.
class ProgramFamily {
 public:
  virtual ~ProgramFamily() = default;

  virtual std::string class_id() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t param_count() const = 0;
  virtual std::size_t event_count() const { return 0; }
  /// Names usable for the inputs in postconditions. Defaults to x1..xd.
  virtual std::vector<std::string> input_names() const;

  /// Throws ConfigError when params are outside the family's ranges.
  virtual void check_params(std::span<const double> params) const = 0;
  virtual int evaluate(std::span<const double> params, std::span<const double> x) const = 0;
  virtual void observe(std::span<const double> params, std::span<const double> x, Observation& out) const;
};

class Program {
 public:
  Program(std::shared_ptr<const ProgramFamily> family, std::vector<double> params);

  /// Deterministic output bit. Throws ContractViolation on a dimension mismatch.
  int evaluate(std::span<const double> x) const;
  void observe(std::span<const double> x, Observation& out) const;

  const ProgramFamily& family() const { return *family_; }
  const std::shared_ptr<const ProgramFamily>& family_ptr() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  std::string class_id() const { return family_->class_id(); }
  std::size_t input_dim() const { return family_->input_dim(); }

  /// Same family object and bitwise-equal parameters.
  bool same_as(const Program& other) const;

 private:
  std::shared_ptr<const ProgramFamily> family_;
  std::vector<double> params_;
};

/// [0, a] inside [0, 1]; parameter a in [0, 1]. Every member contains 0.
class IntervalFamily final : public ProgramFamily {
 public:
  std::string class_id() const override { return "interval"; }
  std::size_t input_dim() const override { return 1; }
  std::size_t param_count() const override { return 1; }
  void check_params(std::span<const double> params) const override;
  int evaluate(std::span<const double> params, std::span<const double> x) const override;
};

/// Axis-aligned boxes inside [-1, 1]^d, parameters (lo_1, hi_1, ..., lo_d, hi_d).
/// A box with lo_j > hi_j on any axis is the empty box and evaluates to 0.
class BoxFamily final : public ProgramFamily {
 public:
  explicit BoxFamily(std::size_t dim) : dim_(dim) {}
  std::string class_id() const override { return "hyperrectangle"; }
  std::size_t input_dim() const override { return dim_; }
  std::size_t param_count() const override { return 2 * dim_; }
  void check_params(std::span<const double> params) const override;
  int evaluate(std::span<const double> params, std::span<const double> x) const override;

 private:
  std::size_t dim_;
};

/// Constant function; used for functional specifications such as P(x) := 0.
class ConstantFamily final : public ProgramFamily {
 public:
  ConstantFamily(std::size_t dim, std::vector<std::string> names = {});
  std::string class_id() const override { return "constant"; }
  std::size_t input_dim() const override { return dim_; }
  std::size_t param_count() const override { return 1; }
  std::vector<std::string> input_names() const override;
  void check_params(std::span<const double> params) const override;
  int evaluate(std::span<const double> params, std::span<const double> x) const override;

 private:
  std::size_t dim_;
  std::vector<std::string> names_;
};

std::shared_ptr<const IntervalFamily> interval_family();
std::shared_ptr<const BoxFamily> box_family(std::size_t dim);

Program make_interval(double a);
Program make_box(std::span<const double> lo, std::span<const double> hi);
Program make_empty_box(std::size_t dim);
Program make_constant(std::size_t dim, int value, std::vector<std::string> names = {});

}  // namespace digits
