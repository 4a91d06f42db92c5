#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "digits/core/labels.hpp"
#include "digits/core/program.hpp"
#include "digits/core/samples.hpp"
#include "digits/sketch/evaluate.hpp"
#include "digits/sketch/smt.hpp"
#include "digits/sketch/solver.hpp"

namespace digits {

/// Outcome of one synthesis query: a program consistent with every example,
/// a proof that none exists (⊥), or no answer (solver timeout / unknown).
struct SynthesisResult {
  enum class Status { found, unrealizable, unknown };
  Status status = Status::unrealizable;
  std::optional<Program> program;
  std::string note;

  static SynthesisResult found_program(Program p);
  static SynthesisResult unrealizable();
  static SynthesisResult unknown(std::string note);

  bool found() const { return status == Status::found; }
};

const char* to_string(SynthesisResult::Status s);

/// Throws ContractViolation unless p maps every example input to its bit.
void check_consistent(const Program& p, std::span<const Example> examples);

class Synthesizer {
 public:
  virtual ~Synthesizer() = default;
  virtual const std::shared_ptr<const ProgramFamily>& family() const = 0;
  virtual SynthesisResult synthesize(std::span<const Example> examples) const = 0;
  /// Query for the labeling sigma of the first |sigma| points of s.
  virtual SynthesisResult synthesize(const SampleSequence& s, const ConstraintString& sigma) const;
  /// Second attempt after an unknown answer (a longer solver timeout).
  virtual SynthesisResult retry(std::span<const Example> examples) const { return synthesize(examples); }
  /// True when the oracle never answers unknown (⊥ is then a proof).
  virtual bool exact() const { return false; }
};

/// Exact oracle for the interval family [0,a] and the box family in
/// [-1,1]^d. Returns the tightest consistent member: a = largest positive
/// point for intervals, the bounding box of the positive points for boxes.
/// With no positive points: a = 0 for intervals (⊥ if a negative point sits
/// at 0, since every interval contains 0), the empty box for boxes.
SynthesisResult synth_box(const std::shared_ptr<const ProgramFamily>& family, std::span<const Example> examples);

class BoxSynthesizer final : public Synthesizer {
 public:
  explicit BoxSynthesizer(std::shared_ptr<const ProgramFamily> family);
  const std::shared_ptr<const ProgramFamily>& family() const override { return family_; }
  SynthesisResult synthesize(std::span<const Example> examples) const override;
  SynthesisResult synthesize(const SampleSequence& s, const ConstraintString& sigma) const override;
  bool exact() const override { return true; }

 private:
  std::shared_ptr<const ProgramFamily> family_;
  bool interval_ = false;
};

struct SketchSynthConfig {
  sketch::SolverConfig solver;
  sketch::EmitOptions emit;
  /// Timeout multiplier used by retry().
  int retry_factor = 4;
};

struct SketchSynthStats {
  std::size_t queries = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unknown = 0;
  std::size_t timeouts = 0;
  std::size_t rejected_models = 0;
  std::size_t nonlinear_queries = 0;
  double solver_seconds = 0.0;
};

/// Solver-backed oracle for a sketch family: emits the example constraints,
/// runs the external solver, and re-checks the returned model by evaluation
/// (a model that fails the check is reported as unknown).
class SketchSynthesizer final : public Synthesizer {
 public:
  SketchSynthesizer(std::shared_ptr<const sketch::SketchFamily> family, SketchSynthConfig cfg);
  const std::shared_ptr<const ProgramFamily>& family() const override { return base_; }
  SynthesisResult synthesize(std::span<const Example> examples) const override;
  SynthesisResult retry(std::span<const Example> examples) const override;
  const SketchSynthStats& stats() const { return stats_; }
  const SketchSynthConfig& config() const { return cfg_; }

 private:
  SynthesisResult run(std::span<const Example> examples, int timeout_ms) const;

  std::shared_ptr<const sketch::SketchFamily> family_;
  std::shared_ptr<const ProgramFamily> base_;
  SketchSynthConfig cfg_;
  mutable SketchSynthStats stats_;
};

SynthesisResult synth_sketch(const std::shared_ptr<const sketch::SketchFamily>& family,
                             std::span<const Example> examples, const SketchSynthConfig& cfg);

}  // namespace digits
