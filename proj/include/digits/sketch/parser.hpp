#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "digits/sketch/ast.hpp"
#include "digits/sketch/lexer.hpp"

namespace digits::sketch {

struct ParseOptions {
  /// Named integer/real constants substituted at parse time (N, Unrollings).
  std::map<std::string, double> constants;
  /// Upper bound on any single loop's trip count.
  long long max_trip_count = 100000;
};

/// Parses one sketch function in C-style surface syntax:
///
///   int interval(double x) {
///       double a = ??(0, 1);
///       if (0 <= x && x <= a) { return 1; }
///       return 0;
///   }
///
/// Besides syntax errors, rejects (with line/column): reads of unknown or
/// possibly-unassigned variables, loop bounds that are not constants, return
/// values that are not Boolean (a comparison, a logical expression, a bool
/// variable, or the literal 0/1), holes with lo > hi, functions that can fall
/// off the end, and asserts placed under a conditional or after a return.
/// Assignments to undeclared names declare them.
SketchAst parse(std::string_view source, const ParseOptions& options = {});

/// Parses a Boolean event expression (the body of a Pr[...] term). `tokens`
/// must be terminated by an `end` token. Identifiers must be in `names`;
/// `constants` are substituted.
ExprPtr parse_event_expression(std::span<const Token> tokens, const std::set<std::string>& names,
                               const std::map<std::string, double>& constants = {});

/// Value of an expression built only from literals and operators, if it is one.
std::optional<double> fold_constant(const Expr& e);

}  // namespace digits::sketch
