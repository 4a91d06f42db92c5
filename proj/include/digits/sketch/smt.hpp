#pragma once

#include <span>
#include <string>
#include <vector>

#include "digits/core/program.hpp"
#include "digits/sketch/ast.hpp"

namespace digits::sketch {

struct EmitOptions {
  /// Evaluate constant subterms (example inputs, K = 0.1, ...) before
  /// emission. Keeps products like K * (curL - lin) linear in the holes.
  bool fold_constants = true;
};

struct Encoding {
  std::string script;
  /// QF_LRA, or QF_NRA when some product or quotient has two symbolic operands.
  std::string logic;
  bool nonlinear = false;
  /// Hole symbols in hole order, as requested by the get-value command.
  std::vector<std::string> hole_symbols;
};

/// SMT-LIB2 script whose models are exactly the hole assignments under which
/// the sketch maps every example input to its bit. Holes are declared as
/// reals with their range constraints; each example is symbolically executed
/// (one define-fun per assignment, early returns merged with ite). Assert
/// statements do not contribute constraints. Numeric literals are printed as
/// exact decimals of their double values.
Encoding emit_constraints(const SketchAst& ast, std::span<const Example> examples, const EmitOptions& options = {});

/// Exact decimal SMT-LIB literal for a finite double, e.g. "0.5", "(- 3.0)".
std::string smt_real(double v);

}  // namespace digits::sketch
