#include "digits/oracles/synth.hpp"

#include <limits>

#include "digits/core/error.hpp"

namespace digits {

SynthesisResult SynthesisResult::found_program(Program p) {
  SynthesisResult r;
  r.status = Status::found;
  r.program = std::move(p);
  return r;
}

SynthesisResult SynthesisResult::unrealizable() { return SynthesisResult{}; }

SynthesisResult SynthesisResult::unknown(std::string note) {
  SynthesisResult r;
  r.status = Status::unknown;
  r.note = std::move(note);
  return r;
}

const char* to_string(SynthesisResult::Status s) {
  switch (s) {
    case SynthesisResult::Status::found: return "found";
    case SynthesisResult::Status::unrealizable: return "unrealizable";
    case SynthesisResult::Status::unknown: return "unknown";
  }
  return "?";
}

void check_consistent(const Program& p, std::span<const Example> examples) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (p.evaluate(examples[i].x) != examples[i].bit) {
      throw ContractViolation(p.class_id() + " program returned by synthesis violates example " + std::to_string(i));
    }
  }
}

SynthesisResult Synthesizer::synthesize(const SampleSequence& s, const ConstraintString& sigma) const {
  if (sigma.size() > s.size()) throw ContractViolation("constraint string longer than the sample sequence");
  std::vector<Example> examples(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const auto x = s[i];
    examples[i].x.assign(x.begin(), x.end());
    examples[i].bit = sigma[i];
  }
  return synthesize(examples);
}

namespace {

// Tightest-member search shared by both input forms. point(i) and bit(i)
// give the i-th example.
template <class Point, class Bit>
SynthesisResult tightest(const std::shared_ptr<const ProgramFamily>& family, bool interval, std::size_t count,
                         Point&& point, Bit&& bit) {
  const std::size_t d = family->input_dim();
  if (interval) {
    double a = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (bit(i)) {
        const double x = point(i)[0];
        if (x < 0.0 || x > 1.0) return SynthesisResult::unrealizable();
        a = std::max(a, x);
      }
    }
    if (a < 0.0) a = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (!bit(i)) {
        const double x = point(i)[0];
        if (0.0 <= x && x <= a) return SynthesisResult::unrealizable();
      }
    }
    return SynthesisResult::found_program(Program(family, {a}));
  }

  std::vector<double> params(2 * d);
  for (std::size_t j = 0; j < d; ++j) {
    params[2 * j] = std::numeric_limits<double>::infinity();
    params[2 * j + 1] = -std::numeric_limits<double>::infinity();
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < count; ++i) {
    if (!bit(i)) continue;
    any_positive = true;
    const auto x = point(i);
    for (std::size_t j = 0; j < d; ++j) {
      if (x[j] < -1.0 || x[j] > 1.0) return SynthesisResult::unrealizable();
      params[2 * j] = std::min(params[2 * j], x[j]);
      params[2 * j + 1] = std::max(params[2 * j + 1], x[j]);
    }
  }
  if (!any_positive) {
    for (std::size_t j = 0; j < d; ++j) {
      params[2 * j] = 1.0;
      params[2 * j + 1] = -1.0;
    }
    return SynthesisResult::found_program(Program(family, std::move(params)));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (bit(i)) continue;
    const auto x = point(i);
    bool inside = true;
    for (std::size_t j = 0; j < d && inside; ++j) inside = params[2 * j] <= x[j] && x[j] <= params[2 * j + 1];
    if (inside) return SynthesisResult::unrealizable();
  }
  return SynthesisResult::found_program(Program(family, std::move(params)));
}

bool is_interval(const ProgramFamily& f) { return f.class_id() == "interval"; }

}  // namespace

SynthesisResult synth_box(const std::shared_ptr<const ProgramFamily>& family, std::span<const Example> examples) {
  return BoxSynthesizer(family).synthesize(examples);
}

BoxSynthesizer::BoxSynthesizer(std::shared_ptr<const ProgramFamily> family) : family_(std::move(family)) {
  if (!family_) throw ContractViolation("box synthesizer without a family");
  interval_ = is_interval(*family_);
  if (!interval_ && family_->class_id() != "hyperrectangle") {
    throw UnsupportedError("exact box synthesis does not support class " + family_->class_id());
  }
}

SynthesisResult BoxSynthesizer::synthesize(std::span<const Example> examples) const {
  for (const auto& e : examples) {
    if (e.x.size() != family_->input_dim()) throw ContractViolation("example dimension mismatch");
  }
  auto r = tightest(
      family_, interval_, examples.size(), [&](std::size_t i) { return std::span<const double>(examples[i].x); },
      [&](std::size_t i) { return examples[i].bit != 0; });
  if (r.found()) check_consistent(*r.program, examples);
  return r;
}

SynthesisResult BoxSynthesizer::synthesize(const SampleSequence& s, const ConstraintString& sigma) const {
  if (sigma.size() > s.size()) throw ContractViolation("constraint string longer than the sample sequence");
  if (s.dim() != family_->input_dim()) throw ContractViolation("sample dimension mismatch");
  auto r = tightest(
      family_, interval_, sigma.size(), [&](std::size_t i) { return s[i]; }, [&](std::size_t i) { return sigma[i] != 0; });
  if (r.found()) {
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (r.program->evaluate(s[i]) != sigma[i]) throw ContractViolation("box synthesis produced an inconsistent program");
    }
  }
  return r;
}

SketchSynthesizer::SketchSynthesizer(std::shared_ptr<const sketch::SketchFamily> family, SketchSynthConfig cfg)
    : family_(std::move(family)), base_(family_), cfg_(std::move(cfg)) {
  if (!family_) throw ContractViolation("sketch synthesizer without a family");
}

SynthesisResult SketchSynthesizer::synthesize(std::span<const Example> examples) const {
  return run(examples, cfg_.solver.timeout_ms);
}

SynthesisResult SketchSynthesizer::retry(std::span<const Example> examples) const {
  return run(examples, cfg_.solver.timeout_ms * std::max(1, cfg_.retry_factor));
}

SynthesisResult SketchSynthesizer::run(std::span<const Example> examples, int timeout_ms) const {
  const auto& ast = family_->ast();
  const auto enc = sketch::emit_constraints(ast, examples, cfg_.emit);
  auto solver = cfg_.solver;
  solver.timeout_ms = timeout_ms;
  const auto res = sketch::run_solver(solver, enc.script, enc.hole_symbols);
  ++stats_.queries;
  if (enc.nonlinear) ++stats_.nonlinear_queries;
  stats_.solver_seconds += res.wall_s;
  switch (res.status) {
    case sketch::SolverStatus::unsat:
      ++stats_.unsat;
      return SynthesisResult::unrealizable();
    case sketch::SolverStatus::timeout:
      ++stats_.timeouts;
      ++stats_.unknown;
      return SynthesisResult::unknown("solver timeout");
    case sketch::SolverStatus::unknown:
      ++stats_.unknown;
      return SynthesisResult::unknown(res.note.empty() ? "solver answered unknown" : res.note);
    case sketch::SolverStatus::sat:
      break;
  }
  std::vector<double> values(ast.holes.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& h = ast.holes[i];
    values[i] = std::clamp(res.model.at(h.id), h.lo, h.hi);
  }
  Program p(base_, values);
  for (const auto& e : examples) {
    if (p.evaluate(e.x) != e.bit) {
      ++stats_.rejected_models;
      ++stats_.unknown;
      return SynthesisResult::unknown("solver model does not reproduce the examples in floating point");
    }
  }
  ++stats_.sat;
  return SynthesisResult::found_program(std::move(p));
}

SynthesisResult synth_sketch(const std::shared_ptr<const sketch::SketchFamily>& family,
                             std::span<const Example> examples, const SketchSynthConfig& cfg) {
  return SketchSynthesizer(family, cfg).synthesize(examples);
}

}  // namespace digits
