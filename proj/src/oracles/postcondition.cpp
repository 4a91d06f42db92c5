#include "digits/oracles/postcondition.hpp"

#include <map>
#include <set>
#include <sstream>

#include "digits/core/error.hpp"
#include "digits/sketch/lexer.hpp"
#include "digits/sketch/parser.hpp"

namespace digits {

using sketch::Expr;
using sketch::ExprPtr;
using sketch::SketchError;
using sketch::Token;

namespace {

using Node = Postcondition::Node;
using NodePtr = Postcondition::NodePtr;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = value;
  return n;
}

ExprPtr rename_asserts(const ExprPtr& e) {
  if (!e) return e;
  if (e->kind == Expr::Kind::variable && e->name.starts_with("assert_")) {
    return Expr::variable("event_" + e->name.substr(7));
  }
  if (e->kind == Expr::Kind::binary) return Expr::binary(e->op, rename_asserts(e->lhs), rename_asserts(e->rhs));
  if (e->lhs) return Expr::unary(e->kind, rename_asserts(e->lhs));
  return e;
}

class PostParser {
 public:
  PostParser(std::vector<Token> tokens, std::set<std::string> names)
      : toks_(std::move(tokens)), names_(std::move(names)) {}

  NodePtr parse() {
    auto root = parse_or();
    if (peek().kind != Token::Kind::end) fail("unexpected token '" + peek().text + "'");
    if (!boolean(*root)) fail("postcondition must be a comparison or a Boolean combination of comparisons");
    return root;
  }

  std::vector<ExprPtr> events;
  std::vector<std::string> texts;

 private:
  static bool boolean(const Node& n) {
    switch (n.kind) {
      case Node::Kind::lt:
      case Node::Kind::le:
      case Node::Kind::gt:
      case Node::Kind::ge:
      case Node::Kind::land:
      case Node::Kind::lor:
      case Node::Kind::lnot:
      case Node::Kind::constant:
        return true;
      default:
        return false;
    }
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(std::string_view p) {
    if (peek().is(p)) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SketchError("postcondition: " + msg, peek().line, peek().column);
  }

  NodePtr parse_or() {
    auto lhs = parse_and();
    while (accept("||")) lhs = make(Node::Kind::lor, lhs, parse_and());
    return lhs;
  }

  NodePtr parse_and() {
    auto lhs = parse_not();
    while (accept("&&")) lhs = make(Node::Kind::land, lhs, parse_not());
    return lhs;
  }

  NodePtr parse_not() {
    if (accept("!")) {
      auto inner = parse_not();
      if (!boolean(*inner)) fail("'!' applies to comparisons");
      return make(Node::Kind::lnot, inner);
    }
    if (peek().is_word("true") || peek().is_word("false")) {
      const bool v = next().is_word("true");
      return make(Node::Kind::constant, nullptr, nullptr, v ? 1.0 : 0.0);
    }
    if (peek().is("(")) {
      // Either a parenthesized Boolean formula or the start of an arithmetic
      // operand; try the former and fall back.
      const std::size_t save = pos_;
      const std::size_t terms_before = events.size();
      try {
        next();
        auto inner = parse_or();
        if (accept(")") && boolean(*inner) && !starts_arith_continuation()) return inner;
      } catch (const SketchError&) {
      }
      pos_ = save;
      events.resize(terms_before);
      texts.resize(terms_before);
    }
    return parse_comparison();
  }

  bool starts_arith_continuation() const {
    const Token& t = peek();
    return t.is("+") || t.is("-") || t.is("*") || t.is("/") || t.is("<") || t.is("<=") || t.is(">") || t.is(">=");
  }

  NodePtr parse_comparison() {
    auto lhs = parse_additive();
    Node::Kind kind;
    if (accept("<")) {
      kind = Node::Kind::lt;
    } else if (accept("<=")) {
      kind = Node::Kind::le;
    } else if (accept(">")) {
      kind = Node::Kind::gt;
    } else if (accept(">=")) {
      kind = Node::Kind::ge;
    } else {
      fail("expected a comparison (<, <=, >, >=)");
    }
    return make(kind, lhs, parse_additive());
  }

  NodePtr parse_additive() {
    auto lhs = parse_multiplicative();
    while (true) {
      if (accept("+")) {
        lhs = make(Node::Kind::add, lhs, parse_multiplicative());
      } else if (accept("-")) {
        lhs = make(Node::Kind::sub, lhs, parse_multiplicative());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_multiplicative() {
    auto lhs = parse_unary();
    while (true) {
      if (accept("*")) {
        lhs = make(Node::Kind::mul, lhs, parse_unary());
      } else if (accept("/")) {
        lhs = make(Node::Kind::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept("-")) return make(Node::Kind::neg, parse_unary());
    return parse_primary();
  }

  NodePtr parse_primary() {
    if (peek().kind == Token::Kind::number) return make(Node::Kind::number, nullptr, nullptr, next().number);
    if (accept("(")) {
      auto inner = parse_additive();
      expect(")");
      return inner;
    }
    if (peek().is_word("Pr")) {
      next();
      if (!peek().is("[")) fail("expected '[' after Pr");
      next();
      std::vector<Token> inner;
      int depth = 1;
      while (true) {
        const Token& t = peek();
        if (t.kind == Token::Kind::end) fail("unterminated Pr[");
        if (t.is("[")) ++depth;
        if (t.is("]") && --depth == 0) break;
        inner.push_back(next());
      }
      next();
      Token end;
      end.kind = Token::Kind::end;
      end.line = peek().line;
      end.column = peek().column;
      inner.push_back(end);
      auto expr = rename_asserts(sketch::parse_event_expression(inner, names_));
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::term;
      n->term = events.size();
      texts.push_back("Pr[" + sketch::print(*expr) + "]");
      events.push_back(std::move(expr));
      return n;
    }
    fail("expected a number, Pr[...] or '('");
  }

  std::vector<Token> toks_;
  std::set<std::string> names_;
  std::size_t pos_ = 0;
};

sketch::SketchAst event_function(const ExprPtr& event, const std::vector<std::string>& inputs, std::size_t events) {
  sketch::SketchAst ast;
  ast.return_type = "bool";
  ast.name = "event";
  ast.inputs.push_back({"double", "ret"});
  for (const auto& n : inputs) ast.inputs.push_back({"double", n});
  for (std::size_t i = 0; i < events; ++i) ast.inputs.push_back({"double", "event_" + std::to_string(i)});
  auto ret = std::make_shared<sketch::Stmt>();
  ret->kind = sketch::Stmt::Kind::ret;
  ret->expr = event;
  ast.body.push_back(ret);
  return ast;
}

struct Evaluator {
  std::span<const double> terms;
  Postcondition::Outcome out;

  double num(const Node& n) {
    switch (n.kind) {
      case Node::Kind::number: return n.value;
      case Node::Kind::term: return terms[n.term];
      case Node::Kind::add: return num(*n.lhs) + num(*n.rhs);
      case Node::Kind::sub: return num(*n.lhs) - num(*n.rhs);
      case Node::Kind::mul: return num(*n.lhs) * num(*n.rhs);
      case Node::Kind::neg: return -num(*n.lhs);
      case Node::Kind::div: {
        const double d = num(*n.rhs);
        if (d == 0.0) {
          out.degenerate = true;
          return 0.0;
        }
        out.min_denominator = std::min(out.min_denominator, std::abs(d));
        return num(*n.lhs) / d;
      }
      default: throw ContractViolation("Boolean node in arithmetic position");
    }
  }

  bool truth(const Node& n) {
    switch (n.kind) {
      case Node::Kind::constant: return n.value != 0.0;
      case Node::Kind::lt: return num(*n.lhs) < num(*n.rhs);
      case Node::Kind::le: return num(*n.lhs) <= num(*n.rhs);
      case Node::Kind::gt: return num(*n.lhs) > num(*n.rhs);
      case Node::Kind::ge: return num(*n.lhs) >= num(*n.rhs);
      case Node::Kind::lnot: return !truth(*n.lhs);
      // Both sides are evaluated so that every ratio is checked for degeneracy.
      case Node::Kind::land: {
        const bool a = truth(*n.lhs);
        const bool b = truth(*n.rhs);
        return a && b;
      }
      case Node::Kind::lor: {
        const bool a = truth(*n.lhs);
        const bool b = truth(*n.rhs);
        return a || b;
      }
      default: throw ContractViolation("arithmetic node in Boolean position");
    }
  }
};

}  // namespace

Postcondition Postcondition::parse(std::string_view text, const std::vector<std::string>& input_names,
                                   std::size_t event_count) {
  std::set<std::string> names(input_names.begin(), input_names.end());
  names.insert("ret");
  for (std::size_t i = 0; i < event_count; ++i) {
    names.insert("event_" + std::to_string(i));
    names.insert("assert_" + std::to_string(i));
  }
  PostParser parser(sketch::tokenize(text), names);
  Postcondition post;
  post.text_ = std::string(text);
  post.root_ = parser.parse();
  post.term_texts_ = parser.texts;
  post.input_dim_ = input_names.size();
  post.event_count_ = event_count;
  for (const auto& e : parser.events) post.events_.emplace_back(event_function(e, input_names, event_count));
  return post;
}

Postcondition Postcondition::events_above(std::span<const double> thresholds,
                                          const std::vector<std::string>& input_names) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i > 0) os << " && ";
    os << "Pr[event_" << i << "] > " << thresholds[i];
  }
  if (thresholds.empty()) os << "true";
  return parse(os.str(), input_names, thresholds.size());
}

void Postcondition::mark_terms(int output, std::span<const double> x, std::span<const char> events,
                               std::span<char> row) const {
  if (x.size() != input_dim_ || events.size() != event_count_ || row.size() != events_.size()) {
    throw ContractViolation("postcondition observation has the wrong shape");
  }
  thread_local std::vector<double> z;
  z.resize(1 + input_dim_ + event_count_);
  z[0] = output;
  std::copy(x.begin(), x.end(), z.begin() + 1);
  for (std::size_t i = 0; i < event_count_; ++i) z[1 + input_dim_ + i] = events[i] ? 1.0 : 0.0;
  for (std::size_t t = 0; t < events_.size(); ++t) row[t] = static_cast<char>(events_[t].run({}, z, nullptr));
}

Postcondition::Outcome Postcondition::evaluate(std::span<const double> term_values) const {
  if (term_values.size() != term_texts_.size()) throw ContractViolation("wrong number of term values");
  Evaluator ev{term_values, {}};
  const bool holds = ev.truth(*root_);
  ev.out.holds = holds && !ev.out.degenerate;
  return ev.out;
}

}  // namespace digits
