#include "digits/sketch/parser.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace digits::sketch {

namespace {

enum class Type { real, boolean };

bool is_type_word(const Token& t) {
  return t.is_word("double") || t.is_word("int") || t.is_word("bool") || t.is_word("float");
}

bool is_keyword(std::string_view w) {
  return w == "if" || w == "else" || w == "for" || w == "return" || w == "assert" || w == "true" ||
         w == "false" || w == "double" || w == "int" || w == "bool" || w == "float" || w == "abs";
}

/// Definite-assignment facts along the current control path.
struct Flow {
  std::set<std::string> assigned;
  bool returned = false;
};

class Parser {
 public:
  Parser(std::span<const Token> tokens, const std::map<std::string, double>& constants)
      : toks_(tokens), constants_(constants) {}

  SketchAst parse_function(long long max_trip) {
    max_trip_ = max_trip;
    SketchAst ast;
    if (!is_type_word(peek())) fail("expected a return type");
    ast.return_type = next().text;
    ast.name = expect_identifier("function name");
    expect("(");
    if (!peek().is(")")) {
      while (true) {
        if (!is_type_word(peek())) fail("expected a parameter type");
        Param p;
        p.type = next().text;
        p.name = expect_identifier("parameter name");
        declare_new(p.name, p.type == "bool" ? Type::boolean : Type::real, prev());
        flow_.assigned.insert(p.name);
        ast.inputs.push_back(std::move(p));
        if (!accept(",")) break;
      }
    }
    expect(")");
    expect("{");
    holes_ = &ast.holes;
    while (!peek().is("}")) parse_statement(ast.body);
    const Token& close = next();
    if (!flow_.returned) throw SketchError("control can reach the end of '" + ast.name + "' without a return", close.line, close.column);
    if (peek().kind != Token::Kind::end) fail("unexpected text after the function body");
    return ast;
  }

  ExprPtr parse_event(const std::set<std::string>& names) {
    for (const auto& n : names) {
      types_[n] = Type::real;
      flow_.assigned.insert(n);
    }
    holes_ = nullptr;
    auto e = parse_expr();
    if (peek().kind != Token::Kind::end) fail("unexpected token '" + peek().text + "' in event expression");
    return e;
  }

 private:
  // ---- token helpers ------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  bool accept(std::string_view punct) {
    if (peek().is(punct)) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
  }
  std::string expect_identifier(const char* what) {
    if (peek().kind != Token::Kind::identifier || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return next().text;
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek()); }
  [[noreturn]] static void fail_at(const std::string& msg, const Token& at) {
    std::string where = at.kind == Token::Kind::end ? " at end of input" : " near '" + at.text + "'";
    throw SketchError(msg + where, at.line, at.column);
  }

  // ---- scope ----------------------------------------------------------------
  void declare_new(const std::string& name, Type type, const Token& at) {
    if (constants_.contains(name)) fail_at("'" + name + "' is a named constant and cannot be assigned", at);
    if (is_keyword(name)) fail_at("'" + name + "' is reserved", at);
    types_[name] = type;
  }

  Type type_of(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::boolean:
      case Expr::Kind::logical_not:
        return Type::boolean;
      case Expr::Kind::variable: {
        auto it = types_.find(e.name);
        return it == types_.end() ? Type::real : it->second;
      }
      case Expr::Kind::binary:
        return (is_comparison(e.op) || is_logical(e.op)) ? Type::boolean : Type::real;
      default:
        return Type::real;
    }
  }

  // ---- statements -----------------------------------------------------------
  void parse_body(Block& out) {
    if (accept("{")) {
      while (!peek().is("}")) {
        if (peek().kind == Token::Kind::end) fail("unterminated block");
        parse_statement(out);
      }
      next();
    } else {
      parse_statement(out);
    }
  }

  void parse_statement(Block& out) {
    const Token& t = peek();
    if (t.kind == Token::Kind::end) fail("unexpected end of input");
    if (t.is("{")) {
      next();
      while (!peek().is("}")) {
        if (peek().kind == Token::Kind::end) fail("unterminated block");
        parse_statement(out);
      }
      next();
      return;
    }
    if (t.is(";")) {
      next();
      return;
    }
    if (t.is_word("if")) return parse_if(out);
    if (t.is_word("for")) return parse_for(out);
    if (t.is_word("return")) return parse_return(out);
    if (t.is_word("assert")) return parse_assert(out);
    if (is_type_word(t)) return parse_declaration(out);
    if (t.kind == Token::Kind::identifier) return parse_assignment(out);
    fail("expected a statement");
  }

  void parse_declaration(Block& out) {
    const std::string type = next().text;
    const Token& name_tok = peek();
    const std::string name = expect_identifier("variable name");
    if (loop_vars_.contains(name)) fail_at("cannot redeclare loop variable '" + name + "'", name_tok);
    declare_new(name, type == "bool" ? Type::boolean : Type::real, name_tok);
    if (accept("=")) {
      auto value = parse_expr();
      auto s = std::make_shared<Stmt>();
      s->kind = Stmt::Kind::assign;
      s->decl_type = type;
      s->target = name;
      s->expr = std::move(value);
      flow_.assigned.insert(name);
      out.push_back(std::move(s));
    } else {
      flow_.assigned.erase(name);
    }
    expect(";");
  }

  void parse_assignment(Block& out) {
    const Token& name_tok = peek();
    const std::string name = expect_identifier("assignment target");
    if (loop_vars_.contains(name)) fail_at("loop variable '" + name + "' cannot be assigned", name_tok);
    ExprPtr value;
    if (accept("=")) {
      value = parse_expr();
    } else if (peek().is("+=") || peek().is("-=")) {
      const bool add = next().is("+=");
      auto lhs = read_variable(name, name_tok);
      value = Expr::binary(add ? BinaryOp::add : BinaryOp::sub, lhs, parse_expr());
    } else {
      fail("expected '=' after '" + name + "'");
    }
    if (!types_.contains(name)) declare_new(name, type_of(*value), name_tok);
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::assign;
    s->target = name;
    s->expr = std::move(value);
    flow_.assigned.insert(name);
    out.push_back(std::move(s));
    expect(";");
  }

  void parse_if(Block& out) {
    next();
    expect("(");
    auto cond = parse_expr();
    expect(")");
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::if_else;
    s->expr = std::move(cond);

    const Flow before = flow_;
    ++conditional_depth_;
    parse_body(s->then_body);
    const Flow after_then = flow_;
    flow_ = before;
    if (peek().is_word("else")) {
      next();
      parse_body(s->else_body);
    }
    --conditional_depth_;
    const Flow after_else = flow_;

    Flow merged;
    if (after_then.returned && after_else.returned) {
      merged.returned = true;
      merged.assigned = after_then.assigned;
    } else if (after_then.returned) {
      merged.assigned = after_else.assigned;
    } else if (after_else.returned) {
      merged.assigned = after_then.assigned;
    } else {
      for (const auto& v : after_then.assigned) {
        if (after_else.assigned.contains(v)) merged.assigned.insert(v);
      }
    }
    flow_ = std::move(merged);
    out.push_back(std::move(s));
  }

  long long constant_int(const char* what) {
    const Token& at = peek();
    auto e = parse_expr();
    auto v = fold_constant(*e);
    if (!v) fail_at(std::string("non-constant loop ") + what, at);
    if (*v != std::floor(*v)) fail_at(std::string("loop ") + what + " must be an integer", at);
    return static_cast<long long>(*v);
  }

  void parse_for(Block& out) {
    next();
    expect("(");
    accept_word("int");
    const Token& var_tok = peek();
    const std::string var = expect_identifier("loop variable");
    if (types_.contains(var) || constants_.contains(var)) fail_at("loop variable '" + var + "' shadows another name", var_tok);
    expect("=");
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::loop;
    s->target = var;
    s->loop_start = constant_int("start");
    expect(";");
    if (!peek().is_word(var)) fail("loop condition must test '" + var + "'");
    next();
    if (accept("<")) {
      s->loop_inclusive = false;
    } else if (accept("<=")) {
      s->loop_inclusive = true;
    } else {
      fail("loop condition must use '<' or '<='");
    }
    s->loop_end = constant_int("bound");
    expect(";");
    if (!peek().is_word(var)) fail("loop update must modify '" + var + "'");
    next();
    if (accept("++")) {
      s->loop_step = 1;
    } else if (accept("+=")) {
      s->loop_step = constant_int("step");
    } else {
      expect("=");
      if (!peek().is_word(var)) fail("loop update must have the form i = i + c");
      next();
      expect("+");
      s->loop_step = constant_int("step");
    }
    if (s->loop_step <= 0) fail("loop step must be positive");
    expect(")");
    if (s->trip_count() > max_trip_) fail("loop trip count exceeds the configured maximum");

    types_[var] = Type::real;
    loop_vars_.insert(var);
    const Flow before = flow_;
    flow_.assigned.insert(var);
    parse_body(s->then_body);
    loop_vars_.erase(var);
    types_.erase(var);
    if (s->trip_count() == 0) {
      const bool returned_inside = flow_.returned;
      flow_ = before;
      (void)returned_inside;
    } else {
      flow_.assigned.erase(var);
    }
    out.push_back(std::move(s));
  }

  void accept_word(std::string_view w) {
    if (peek().is_word(w)) next();
  }

  void parse_return(Block& out) {
    const Token& at = next();
    const Token& expr_tok = peek();
    auto value = parse_expr();
    const bool literal_bit = value->kind == Expr::Kind::number && (value->value == 0.0 || value->value == 1.0);
    if (!literal_bit && type_of(*value) != Type::boolean) {
      fail_at("non-Boolean return value (expected a comparison, Boolean expression, bool variable, or 0/1)", expr_tok);
    }
    (void)at;
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::ret;
    s->expr = std::move(value);
    out.push_back(std::move(s));
    expect(";");
    flow_.returned = true;
    seen_return_ = true;
  }

  void parse_assert(Block& out) {
    const Token& at = next();
    if (conditional_depth_ > 0) fail_at("assert must not appear inside a conditional", at);
    if (seen_return_) fail_at("assert must not follow a return statement", at);
    expect("(");
    const Token& ev_tok = peek();
    auto event = parse_expr();
    if (type_of(*event) != Type::boolean) fail_at("assert event must be a Boolean expression", ev_tok);
    expect(";");
    const Token& th_tok = peek();
    auto theta_expr = parse_expr();
    auto theta = fold_constant(*theta_expr);
    if (!theta || *theta < 0.0 || *theta > 1.0) fail_at("assert threshold must be a constant in [0,1]", th_tok);
    expect(")");
    expect(";");
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::assertion;
    s->expr = std::move(event);
    s->theta = *theta;
    out.push_back(std::move(s));
  }

  // ---- expressions ----------------------------------------------------------
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    auto lhs = parse_and();
    while (accept("||")) lhs = Expr::binary(BinaryOp::lor, lhs, parse_and());
    return lhs;
  }

  ExprPtr parse_and() {
    auto lhs = parse_equality();
    while (accept("&&")) lhs = Expr::binary(BinaryOp::land, lhs, parse_equality());
    return lhs;
  }

  ExprPtr parse_equality() {
    auto lhs = parse_relational();
    while (true) {
      if (accept("==")) {
        lhs = Expr::binary(BinaryOp::eq, lhs, parse_relational());
      } else if (accept("!=")) {
        lhs = Expr::binary(BinaryOp::ne, lhs, parse_relational());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_relational() {
    auto lhs = parse_additive();
    while (true) {
      BinaryOp op;
      if (accept("<")) {
        op = BinaryOp::lt;
      } else if (accept("<=")) {
        op = BinaryOp::le;
      } else if (accept(">")) {
        op = BinaryOp::gt;
      } else if (accept(">=")) {
        op = BinaryOp::ge;
      } else {
        return lhs;
      }
      lhs = Expr::binary(op, lhs, parse_additive());
    }
  }

  ExprPtr parse_additive() {
    auto lhs = parse_multiplicative();
    while (true) {
      if (accept("+")) {
        lhs = Expr::binary(BinaryOp::add, lhs, parse_multiplicative());
      } else if (accept("-")) {
        lhs = Expr::binary(BinaryOp::sub, lhs, parse_multiplicative());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_multiplicative() {
    auto lhs = parse_unary();
    while (true) {
      if (accept("*")) {
        lhs = Expr::binary(BinaryOp::mul, lhs, parse_unary());
      } else if (accept("/")) {
        lhs = Expr::binary(BinaryOp::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept("-")) {
      // A minus directly before a literal is part of the literal.
      if (peek().kind == Token::Kind::number) return Expr::number(-next().number);
      return Expr::unary(Expr::Kind::negate, parse_unary());
    }
    if (accept("!")) return Expr::unary(Expr::Kind::logical_not, parse_unary());
    return parse_primary();
  }

  ExprPtr read_variable(const std::string& name, const Token& at) {
    if (auto c = constants_.find(name); c != constants_.end()) return Expr::number(c->second);
    if (!types_.contains(name)) fail_at("unknown identifier '" + name + "'", at);
    if (!flow_.assigned.contains(name)) fail_at("variable '" + name + "' may be used before it is assigned", at);
    return Expr::variable(name);
  }

  double hole_bound() {
    const Token& at = peek();
    auto e = parse_expr();
    auto v = fold_constant(*e);
    if (!v) fail_at("hole bounds must be constants", at);
    return *v;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::number) {
      next();
      return Expr::number(t.number);
    }
    if (t.is("(")) {
      next();
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (t.is("??")) {
      next();
      if (holes_ == nullptr) fail_at("holes are not allowed here", t);
      if (accept("[")) {
        if (peek().kind != Token::Kind::number) fail("expected a hole index");
        const double idx = next().number;
        expect("]");
        if (idx < 0 || idx != std::floor(idx) || static_cast<std::size_t>(idx) >= holes_->size()) {
          fail_at("reference to an undeclared hole", t);
        }
        return Expr::hole_ref(static_cast<std::size_t>(idx));
      }
      expect("(");
      const double lo = hole_bound();
      expect(",");
      const double hi = hole_bound();
      expect(")");
      if (lo > hi) fail_at("hole with lo > hi", t);
      Hole h;
      h.id = "hole_" + std::to_string(holes_->size());
      h.lo = lo;
      h.hi = hi;
      holes_->push_back(h);
      return Expr::hole_ref(holes_->size() - 1);
    }
    if (t.is_word("true")) {
      next();
      return Expr::boolean(true);
    }
    if (t.is_word("false")) {
      next();
      return Expr::boolean(false);
    }
    if (t.is_word("abs")) {
      next();
      expect("(");
      auto e = parse_expr();
      expect(")");
      return Expr::unary(Expr::Kind::abs, e);
    }
    if (t.kind == Token::Kind::identifier && !is_keyword(t.text)) {
      next();
      if (peek().is("(")) fail_at("unknown function '" + t.text + "'", t);
      return read_variable(t.text, t);
    }
    fail("expected an expression");
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
  const std::map<std::string, double>& constants_;
  std::map<std::string, Type> types_;
  std::set<std::string> loop_vars_;
  Flow flow_;
  std::vector<Hole>* holes_ = nullptr;
  int conditional_depth_ = 0;
  bool seen_return_ = false;
  long long max_trip_ = 100000;
};

}  // namespace

std::optional<double> fold_constant(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number:
    case Expr::Kind::boolean:
      return e.value;
    case Expr::Kind::variable:
    case Expr::Kind::hole:
      return std::nullopt;
    case Expr::Kind::negate: {
      auto v = fold_constant(*e.lhs);
      return v ? std::optional<double>(-*v) : std::nullopt;
    }
    case Expr::Kind::logical_not: {
      auto v = fold_constant(*e.lhs);
      return v ? std::optional<double>(*v == 0.0 ? 1.0 : 0.0) : std::nullopt;
    }
    case Expr::Kind::abs: {
      auto v = fold_constant(*e.lhs);
      return v ? std::optional<double>(std::abs(*v)) : std::nullopt;
    }
    case Expr::Kind::binary: {
      auto a = fold_constant(*e.lhs);
      auto b = fold_constant(*e.rhs);
      if (!a || !b) return std::nullopt;
      switch (e.op) {
        case BinaryOp::add: return *a + *b;
        case BinaryOp::sub: return *a - *b;
        case BinaryOp::mul: return *a * *b;
        case BinaryOp::div: return *a / *b;
        case BinaryOp::lt: return *a < *b ? 1.0 : 0.0;
        case BinaryOp::le: return *a <= *b ? 1.0 : 0.0;
        case BinaryOp::gt: return *a > *b ? 1.0 : 0.0;
        case BinaryOp::ge: return *a >= *b ? 1.0 : 0.0;
        case BinaryOp::eq: return *a == *b ? 1.0 : 0.0;
        case BinaryOp::ne: return *a != *b ? 1.0 : 0.0;
        case BinaryOp::land: return (*a != 0.0 && *b != 0.0) ? 1.0 : 0.0;
        case BinaryOp::lor: return (*a != 0.0 || *b != 0.0) ? 1.0 : 0.0;
      }
    }
  }
  return std::nullopt;
}

SketchAst parse(std::string_view source, const ParseOptions& options) {
  const auto tokens = tokenize(source);
  Parser parser(tokens, options.constants);
  return parser.parse_function(options.max_trip_count);
}

ExprPtr parse_event_expression(std::span<const Token> tokens, const std::set<std::string>& names,
                               const std::map<std::string, double>& constants) {
  Parser parser(tokens, constants);
  return parser.parse_event(names);
}

}  // namespace digits::sketch
