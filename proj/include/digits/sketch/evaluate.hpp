#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "digits/core/program.hpp"
#include "digits/sketch/ast.hpp"

namespace digits::sketch {

/// A loop-free sketch lowered to a flat stack program over numbered slots.
/// Booleans are stored as 0/1; conditions test for nonzero.
class CompiledSketch {
 public:
  /// Throws ContractViolation if the AST still contains loops.
  explicit CompiledSketch(const SketchAst& ast);

  /// `events`, when given, is resized to event_count() and filled in
  /// assert order. Throws ContractViolation if execution reaches the end
  /// of the function without a return.
  int run(std::span<const double> holes, std::span<const double> x, std::vector<char>* events) const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hole_count() const { return hole_count_; }
  std::size_t event_count() const { return event_count_; }

 private:
  enum class Op : std::uint8_t {
    push_const, push_slot, push_hole, neg, lnot, abs,
    add, sub, mul, div, lt, le, gt, ge, eq, ne, land, lor,
    store, jump_if_false, jump, ret, event,
  };
  struct Instr {
    Op op;
    std::uint32_t arg = 0;
    double value = 0.0;
  };

  void compile_block(const Block& block);
  void compile_expr(const Expr& e, std::size_t depth);
  std::uint32_t slot_of(const std::string& name);

  std::vector<Instr> code_;
  std::vector<std::string> slot_names_;
  std::size_t input_dim_ = 0;
  std::size_t hole_count_ = 0;
  std::size_t event_count_ = 0;
  std::size_t max_stack_ = 0;
};

/// Hole values in hole order. Throws ContractViolation if any hole is
/// missing and ConfigError if a value lies outside its range.
std::vector<double> hole_vector(const SketchAst& ast, const HoleAssignment& holes);
HoleAssignment hole_assignment(const SketchAst& ast, std::span<const double> values);

/// Output bit and assert-event truth values. `ast` must be loop-free.
Observation evaluate_sketch(const SketchAst& ast, const HoleAssignment& holes, std::span<const double> x);

/// The programs obtained by filling a sketch's holes. Parameters are the hole
/// values in hole order; events are the (unrolled) asserts in order.
class SketchFamily final : public ProgramFamily {
 public:
  /// Loops are unrolled on construction.
  explicit SketchFamily(const SketchAst& ast);

  std::string class_id() const override { return "sketch:" + ast_.name; }
  std::size_t input_dim() const override { return ast_.inputs.size(); }
  std::size_t param_count() const override { return ast_.holes.size(); }
  std::size_t event_count() const override { return compiled_.event_count(); }
  std::vector<std::string> input_names() const override;
  void check_params(std::span<const double> params) const override;
  int evaluate(std::span<const double> params, std::span<const double> x) const override;
  void observe(std::span<const double> params, std::span<const double> x, Observation& out) const override;

  const SketchAst& ast() const { return ast_; }

 private:
  SketchAst ast_;
  CompiledSketch compiled_;
};

Program make_sketch_program(const std::shared_ptr<const SketchFamily>& family, const HoleAssignment& holes);

}  // namespace digits::sketch
