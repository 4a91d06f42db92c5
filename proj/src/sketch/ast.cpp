#include "digits/sketch/ast.hpp"

#include <charconv>
#include <set>
#include <sstream>

namespace digits::sketch {

ExprPtr Expr::number(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::number;
  e->value = v;
  return e;
}

ExprPtr Expr::boolean(bool b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::boolean;
  e->value = b ? 1.0 : 0.0;
  return e;
}

ExprPtr Expr::variable(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::variable;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::hole_ref(std::size_t index) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::hole;
  e->hole = index;
  return e;
}

ExprPtr Expr::unary(Kind kind, ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::binary;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::lt:
    case BinaryOp::le:
    case BinaryOp::gt:
    case BinaryOp::ge:
    case BinaryOp::eq:
    case BinaryOp::ne:
      return true;
    default:
      return false;
  }
}

bool is_logical(BinaryOp op) { return op == BinaryOp::land || op == BinaryOp::lor; }

const char* op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::land: return "&&";
    case BinaryOp::lor: return "||";
  }
  return "?";
}

long long Stmt::trip_count() const {
  if (kind != Kind::loop || loop_step <= 0) return 0;
  const long long limit = loop_inclusive ? loop_end + 1 : loop_end;
  if (limit <= loop_start) return 0;
  return (limit - loop_start + loop_step - 1) / loop_step;
}

namespace {

bool same_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool same_block(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(*a[i] == *b[i])) return false;
  }
  return true;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::number:
    case Expr::Kind::boolean:
      return a.value == b.value;
    case Expr::Kind::variable:
      return a.name == b.name;
    case Expr::Kind::hole:
      return a.hole == b.hole;
    case Expr::Kind::negate:
    case Expr::Kind::logical_not:
    case Expr::Kind::abs:
      return same_ptr(a.lhs, b.lhs);
    case Expr::Kind::binary:
      return a.op == b.op && same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
  }
  return false;
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::assign:
      return a.decl_type == b.decl_type && a.target == b.target && same_ptr(a.expr, b.expr);
    case Stmt::Kind::if_else:
      return same_ptr(a.expr, b.expr) && same_block(a.then_body, b.then_body) && same_block(a.else_body, b.else_body);
    case Stmt::Kind::ret:
      return same_ptr(a.expr, b.expr);
    case Stmt::Kind::assertion:
      return a.theta == b.theta && same_ptr(a.expr, b.expr);
    case Stmt::Kind::loop:
      return a.target == b.target && a.loop_start == b.loop_start && a.loop_end == b.loop_end &&
             a.loop_step == b.loop_step && a.loop_inclusive == b.loop_inclusive && same_block(a.then_body, b.then_body);
  }
  return false;
}

bool operator==(const SketchAst& a, const SketchAst& b) {
  if (a.return_type != b.return_type || a.name != b.name || a.inputs.size() != b.inputs.size() ||
      a.holes.size() != b.holes.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    if (a.inputs[i].type != b.inputs[i].type || a.inputs[i].name != b.inputs[i].name) return false;
  }
  for (std::size_t i = 0; i < a.holes.size(); ++i) {
    if (a.holes[i].id != b.holes[i].id || a.holes[i].lo != b.holes[i].lo || a.holes[i].hi != b.holes[i].hi) return false;
  }
  return same_block(a.body, b.body);
}

bool is_loop_free(const Block& block) {
  for (const auto& s : block) {
    if (s->kind == Stmt::Kind::loop) return false;
    if (s->kind == Stmt::Kind::if_else && (!is_loop_free(s->then_body) || !is_loop_free(s->else_body))) return false;
  }
  return true;
}

bool is_loop_free(const SketchAst& ast) { return is_loop_free(ast.body); }

std::size_t count_asserts(const Block& block) {
  std::size_t n = 0;
  for (const auto& s : block) {
    if (s->kind == Stmt::Kind::assertion) ++n;
    n += count_asserts(s->then_body) + count_asserts(s->else_body);
  }
  return n;
}

std::size_t count_asserts(const SketchAst& ast) { return count_asserts(ast.body); }

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

class Printer {
 public:
  explicit Printer(const SketchAst* ast) : ast_(ast) {}

  void expr(std::ostream& os, const Expr& e, bool top) {
    switch (e.kind) {
      case Expr::Kind::number:
        os << format_number(e.value);
        break;
      case Expr::Kind::boolean:
        os << (e.value != 0.0 ? "true" : "false");
        break;
      case Expr::Kind::variable:
        os << e.name;
        break;
      case Expr::Kind::hole:
        if (ast_ != nullptr && !seen_holes_.contains(e.hole) && e.hole < ast_->holes.size()) {
          seen_holes_.insert(e.hole);
          const auto& h = ast_->holes[e.hole];
          os << "?" "?(" << format_number(h.lo) << ", " << format_number(h.hi) << ")";
        } else {
          os << "?" "?[" << e.hole << "]";
        }
        break;
      case Expr::Kind::negate:
        os << "-(";
        expr(os, *e.lhs, true);
        os << ")";
        break;
      case Expr::Kind::logical_not:
        os << "!";
        expr(os, *e.lhs, false);
        break;
      case Expr::Kind::abs:
        os << "abs(";
        expr(os, *e.lhs, true);
        os << ")";
        break;
      case Expr::Kind::binary:
        if (!top) os << "(";
        expr(os, *e.lhs, false);
        os << " " << op_text(e.op) << " ";
        expr(os, *e.rhs, false);
        if (!top) os << ")";
        break;
    }
  }

  void block(std::ostream& os, const Block& b, int indent) {
    for (const auto& s : b) stmt(os, *s, indent);
  }

  void stmt(std::ostream& os, const Stmt& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    switch (s.kind) {
      case Stmt::Kind::assign:
        os << pad;
        if (!s.decl_type.empty()) os << s.decl_type << " ";
        os << s.target << " = ";
        expr(os, *s.expr, true);
        os << ";\n";
        break;
      case Stmt::Kind::if_else:
        os << pad << "if (";
        expr(os, *s.expr, true);
        os << ") {\n";
        block(os, s.then_body, indent + 1);
        os << pad << "}";
        if (!s.else_body.empty()) {
          os << " else {\n";
          block(os, s.else_body, indent + 1);
          os << pad << "}";
        }
        os << "\n";
        break;
      case Stmt::Kind::ret:
        os << pad << "return ";
        expr(os, *s.expr, true);
        os << ";\n";
        break;
      case Stmt::Kind::assertion:
        os << pad << "assert(";
        expr(os, *s.expr, true);
        os << "; " << format_number(s.theta) << ");\n";
        break;
      case Stmt::Kind::loop:
        os << pad << "for (int " << s.target << " = " << s.loop_start << "; " << s.target
           << (s.loop_inclusive ? " <= " : " < ") << s.loop_end << "; " << s.target << " = " << s.target << " + "
           << s.loop_step << ") {\n";
        block(os, s.then_body, indent + 1);
        os << pad << "}\n";
        break;
    }
  }

 private:
  const SketchAst* ast_;
  std::set<std::size_t> seen_holes_;
};

}  // namespace

std::string print(const SketchAst& ast) {
  std::ostringstream os;
  os << ast.return_type << " " << ast.name << "(";
  for (std::size_t i = 0; i < ast.inputs.size(); ++i) {
    if (i > 0) os << ", ";
    os << ast.inputs[i].type << " " << ast.inputs[i].name;
  }
  os << ") {\n";
  Printer printer(&ast);
  printer.block(os, ast.body, 1);
  os << "}\n";
  return os.str();
}

std::string print(const Expr& expr) {
  std::ostringstream os;
  Printer printer(nullptr);
  printer.expr(os, expr, true);
  return os.str();
}

}  // namespace digits::sketch
