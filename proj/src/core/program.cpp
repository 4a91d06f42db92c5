#include "digits/core/program.hpp"

#include <cstring>
#include <map>
#include <mutex>

#include "digits/core/error.hpp"

namespace digits {

std::vector<std::string> ProgramFamily::input_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < input_dim(); ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

void ProgramFamily::observe(std::span<const double> params, std::span<const double> x,
                            Observation& out) const {
  out.output = evaluate(params, x);
  out.events.clear();
}

Program::Program(std::shared_ptr<const ProgramFamily> family, std::vector<double> params)
    : family_(std::move(family)), params_(std::move(params)) {
  if (!family_) throw ContractViolation("program without a family");
  if (params_.size() != family_->param_count()) {
    throw ConfigError(family_->class_id() + " expects " + std::to_string(family_->param_count()) +
                      " parameters, got " + std::to_string(params_.size()));
  }
  family_->check_params(params_);
}

int Program::evaluate(std::span<const double> x) const {
  if (x.size() != family_->input_dim()) {
    throw ContractViolation("input of dimension " + std::to_string(x.size()) + " given to " +
                            family_->class_id() + " program of dimension " +
                            std::to_string(family_->input_dim()));
  }
  return family_->evaluate(params_, x);
}

void Program::observe(std::span<const double> x, Observation& out) const {
  if (x.size() != family_->input_dim()) throw ContractViolation("input dimension mismatch");
  family_->observe(params_, x, out);
}

bool Program::same_as(const Program& other) const {
  return family_ == other.family_ && params_.size() == other.params_.size() &&
         (params_.empty() ||
          std::memcmp(params_.data(), other.params_.data(), params_.size() * sizeof(double)) == 0);
}

void IntervalFamily::check_params(std::span<const double> params) const {
  if (!(params[0] >= 0.0 && params[0] <= 1.0)) throw ConfigError("interval endpoint a must lie in [0,1]");
}

int IntervalFamily::evaluate(std::span<const double> params, std::span<const double> x) const {
  return (0.0 <= x[0] && x[0] <= params[0]) ? 1 : 0;
}

void BoxFamily::check_params(std::span<const double> params) const {
  for (double p : params) {
    if (!(p >= -1.0 && p <= 1.0)) throw ConfigError("box bounds must lie in [-1,1]");
  }
}

int BoxFamily::evaluate(std::span<const double> params, std::span<const double> x) const {
  for (std::size_t j = 0; j < dim_; ++j) {
    if (!(params[2 * j] <= x[j] && x[j] <= params[2 * j + 1])) return 0;
  }
  return 1;
}

ConstantFamily::ConstantFamily(std::size_t dim, std::vector<std::string> names)
    : dim_(dim), names_(std::move(names)) {
  if (!names_.empty() && names_.size() != dim_) throw ConfigError("constant program: wrong number of input names");
}

std::vector<std::string> ConstantFamily::input_names() const {
  return names_.empty() ? ProgramFamily::input_names() : names_;
}

void ConstantFamily::check_params(std::span<const double> params) const {
  if (params[0] != 0.0 && params[0] != 1.0) throw ConfigError("constant program value must be 0 or 1");
}

int ConstantFamily::evaluate(std::span<const double> params, std::span<const double>) const {
  return params[0] != 0.0 ? 1 : 0;
}

std::shared_ptr<const IntervalFamily> interval_family() {
  static const auto family = std::make_shared<const IntervalFamily>();
  return family;
}

std::shared_ptr<const BoxFamily> box_family(std::size_t dim) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const BoxFamily>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[dim];
  if (!slot) slot = std::make_shared<const BoxFamily>(dim);
  return slot;
}

Program make_interval(double a) { return Program(interval_family(), {a}); }

Program make_box(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw ContractViolation("box bounds of unequal length");
  std::vector<double> params;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    params.push_back(lo[j]);
    params.push_back(hi[j]);
  }
  return Program(box_family(lo.size()), std::move(params));
}

Program make_empty_box(std::size_t dim) {
  std::vector<double> params;
  for (std::size_t j = 0; j < dim; ++j) {
    params.push_back(1.0);
    params.push_back(-1.0);
  }
  return Program(box_family(dim), std::move(params));
}

Program make_constant(std::size_t dim, int value, std::vector<std::string> names) {
  return Program(std::make_shared<const ConstantFamily>(dim, std::move(names)), {static_cast<double>(value)});
}

}  // namespace digits
