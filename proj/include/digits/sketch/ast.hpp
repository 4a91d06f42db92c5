#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace digits::sketch {

enum class BinaryOp { add, sub, mul, div, lt, le, gt, ge, eq, ne, land, lor };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Subtrees are shared freely (unrolled loop
/// bodies share the original body's expressions).
struct Expr {
  enum class Kind { number, boolean, variable, hole, negate, logical_not, abs, binary };

  Kind kind = Kind::number;
  double value = 0.0;     // number, boolean (0 or 1)
  std::string name;       // variable
  std::size_t hole = 0;   // index into SketchAst::holes
  BinaryOp op = BinaryOp::add;
  ExprPtr lhs;            // operand of negate / logical_not / abs, left of binary
  ExprPtr rhs;

  static ExprPtr number(double v);
  static ExprPtr boolean(bool b);
  static ExprPtr variable(std::string name);
  static ExprPtr hole_ref(std::size_t index);
  static ExprPtr unary(Kind kind, ExprPtr operand);
  static ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
};

bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);
const char* op_text(BinaryOp op);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Stmt {
  enum class Kind { assign, if_else, ret, assertion, loop };

  Kind kind = Kind::assign;
  std::string decl_type;  // "double" / "int" / "bool" on declarations, empty on plain assignment
  std::string target;     // assignment target or loop variable
  ExprPtr expr;           // assigned value, if condition, returned value, asserted event
  Block then_body;        // also the loop body
  Block else_body;
  double theta = 0.0;     // assert threshold
  // for (int var = loop_start; var < loop_end (or <=); var += loop_step)
  long long loop_start = 0;
  long long loop_end = 0;
  long long loop_step = 1;
  bool loop_inclusive = false;

  long long trip_count() const;
};

struct Hole {
  std::string id;
  double lo = 0.0;
  double hi = 0.0;
};

struct Param {
  std::string type;
  std::string name;
};

/// One sketch function. Holes are numbered in order of first appearance;
/// `??(lo,hi)` in the source introduces a new hole, `??[k]` refers back to
/// hole k (the printer emits it when an unrolled body repeats a hole).
struct SketchAst {
  std::string return_type;
  std::string name;
  std::vector<Param> inputs;
  Block body;
  std::vector<Hole> holes;
};

/// hole id -> value.
using HoleAssignment = std::map<std::string, double>;

bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const SketchAst& a, const SketchAst& b);

bool is_loop_free(const SketchAst& ast);
bool is_loop_free(const Block& block);

/// Assert statements in source order. For a loop-free AST this is also the
/// order of the event vector produced by evaluation.
std::size_t count_asserts(const Block& block);
std::size_t count_asserts(const SketchAst& ast);

/// Surface syntax; parse(print(ast)) reproduces a loop-free ast exactly.
std::string print(const SketchAst& ast);
std::string print(const Expr& expr);

}  // namespace digits::sketch
