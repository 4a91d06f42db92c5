#include "digits/sketch/unroll.hpp"

namespace digits::sketch {

namespace {

ExprPtr substitute(const ExprPtr& e, const std::string& var, double value) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::variable:
      return e->name == var ? Expr::number(value) : e;
    case Expr::Kind::negate:
    case Expr::Kind::logical_not:
    case Expr::Kind::abs: {
      auto operand = substitute(e->lhs, var, value);
      return operand == e->lhs ? e : Expr::unary(e->kind, operand);
    }
    case Expr::Kind::binary: {
      auto lhs = substitute(e->lhs, var, value);
      auto rhs = substitute(e->rhs, var, value);
      return (lhs == e->lhs && rhs == e->rhs) ? e : Expr::binary(e->op, lhs, rhs);
    }
    default:
      return e;
  }
}

struct Binding {
  std::string var;
  double value;
};

void unroll_into(const Block& in, const std::vector<Binding>& bindings, Block& out);

StmtPtr rewrite(const StmtPtr& s, const std::vector<Binding>& bindings) {
  auto copy = std::make_shared<Stmt>(*s);
  for (const auto& b : bindings) copy->expr = substitute(copy->expr, b.var, b.value);
  copy->then_body.clear();
  copy->else_body.clear();
  unroll_into(s->then_body, bindings, copy->then_body);
  unroll_into(s->else_body, bindings, copy->else_body);
  return copy;
}

void unroll_into(const Block& in, const std::vector<Binding>& bindings, Block& out) {
  for (const auto& s : in) {
    if (s->kind == Stmt::Kind::loop) {
      const long long trips = s->trip_count();
      for (long long k = 0; k < trips; ++k) {
        auto inner = bindings;
        inner.push_back({s->target, static_cast<double>(s->loop_start + k * s->loop_step)});
        unroll_into(s->then_body, inner, out);
      }
    } else if (bindings.empty() && is_loop_free(s->then_body) && is_loop_free(s->else_body)) {
      out.push_back(s);
    } else {
      out.push_back(rewrite(s, bindings));
    }
  }
}

}  // namespace

SketchAst unroll(const SketchAst& ast) {
  if (is_loop_free(ast)) return ast;
  SketchAst result = ast;
  result.body.clear();
  unroll_into(ast.body, {}, result.body);
  return result;
}

}  // namespace digits::sketch
