#include "digits/sketch/smt.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>

#include "digits/core/error.hpp"

namespace digits::sketch {

namespace {

// Decimal digits of mantissa * 5^k, most significant first.
std::string times_pow5(std::uint64_t mantissa, int k) {
  std::vector<std::uint32_t> limbs;  // base 1e9, little endian
  while (mantissa > 0) {
    limbs.push_back(static_cast<std::uint32_t>(mantissa % 1000000000u));
    mantissa /= 1000000000u;
  }
  if (limbs.empty()) return "0";
  for (int i = 0; i < k; ++i) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs) {
      const std::uint64_t cur = static_cast<std::uint64_t>(limb) * 5u + carry;
      limb = static_cast<std::uint32_t>(cur % 1000000000u);
      carry = cur / 1000000000u;
    }
    if (carry > 0) limbs.push_back(static_cast<std::uint32_t>(carry));
  }
  std::string out = std::to_string(limbs.back());
  for (std::size_t i = limbs.size() - 1; i-- > 0;) {
    std::string part = std::to_string(limbs[i]);
    out += std::string(9 - part.size(), '0') + part;
  }
  return out;
}

std::string exact_decimal(double v) {
  // v = mantissa * 2^exp with an integral mantissa.
  int exp = 0;
  const double frac = std::frexp(v, &exp);
  auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  exp -= 53;
  while (mantissa != 0 && (mantissa & 1u) == 0 && exp < 0) {
    mantissa >>= 1;
    ++exp;
  }
  if (exp >= 0) {
    std::ostringstream os;
    os.precision(0);
    os << std::fixed << v;
    return os.str() + ".0";
  }
  // mantissa / 2^k = mantissa * 5^k / 10^k
  const int k = -exp;
  std::string digits = times_pow5(mantissa, k);
  if (static_cast<int>(digits.size()) <= k) digits = std::string(k - digits.size() + 1, '0') + digits;
  return digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
}

enum class Sort { real, boolean };

/// A symbolic value: either a known constant or an SMT term.
struct Term {
  std::optional<double> constant;
  std::string text;
  Sort sort = Sort::real;

  static Term real_const(double v) { return {v, "", Sort::real}; }
  static Term bool_const(bool b) { return {b ? 1.0 : 0.0, "", Sort::boolean}; }
  static Term sym(std::string t, Sort s) { return {std::nullopt, std::move(t), s}; }
  bool is_const() const { return constant.has_value(); }
};

class Emitter {
 public:
  Emitter(const SketchAst& ast, const EmitOptions& options, std::ostringstream& out)
      : ast_(ast), fold_(options.fold_constants), out_(out) {}

  bool nonlinear() const { return nonlinear_; }

  void example(std::size_t index, const Example& ex) {
    prefix_ = "e" + std::to_string(index) + "_";
    counter_ = 0;
    State st;
    for (std::size_t i = 0; i < ast_.inputs.size(); ++i) {
      Term v = Term::real_const(ex.x[i]);
      if (!fold_) v = bind(ast_.inputs[i].name, v);
      st.env[ast_.inputs[i].name] = v;
    }
    st.done = Term::bool_const(false);
    st.ret = Term::bool_const(false);
    exec(ast_.body, st);
    Term ret = st.ret;
    if (!(st.done.is_const() && *st.done.constant != 0.0)) {
      // A well-formed sketch always returns; a missing return is a false output here.
      ret = ite(st.done, ret, Term::bool_const(false));
    }
    const Term goal = ex.bit != 0 ? as_bool(ret) : lnot(as_bool(ret));
    out_ << "(assert " << text(goal) << ")\n";
  }

 private:
  struct State {
    std::map<std::string, Term> env;
    Term done;
    Term ret;
  };

  std::string text(const Term& t) const {
    if (!t.is_const()) return t.text;
    if (t.sort == Sort::boolean) return *t.constant != 0.0 ? "true" : "false";
    return smt_real(*t.constant);
  }

  bool foldable(const Term& t) const { return fold_ && t.is_const(); }

  Term as_real(const Term& t) const {
    if (t.sort == Sort::real) return t;
    if (foldable(t)) return Term::real_const(*t.constant);
    return Term::sym("(ite " + text(t) + " 1.0 0.0)", Sort::real);
  }

  Term as_bool(const Term& t) const {
    if (t.sort == Sort::boolean) return t;
    if (foldable(t)) return Term::bool_const(*t.constant != 0.0);
    return Term::sym("(not (= " + text(t) + " 0.0))", Sort::boolean);
  }

  Term lnot(const Term& t) const {
    if (foldable(t)) return Term::bool_const(*t.constant == 0.0);
    return Term::sym("(not " + text(t) + ")", Sort::boolean);
  }

  Term ite(const Term& c, const Term& a, const Term& b) {
    const Term cond = as_bool(c);
    if (cond.is_const()) return *cond.constant != 0.0 ? a : b;
    if (a.is_const() && b.is_const() && a.sort == b.sort && *a.constant == *b.constant) return a;
    if (!a.is_const() && !b.is_const() && a.text == b.text && a.sort == b.sort) return a;
    if (a.sort == b.sort) return Term::sym("(ite " + text(cond) + " " + text(a) + " " + text(b) + ")", a.sort);
    return Term::sym("(ite " + text(cond) + " " + text(as_real(a)) + " " + text(as_real(b)) + ")", Sort::real);
  }

  // Names a term with a define-fun so later uses stay small.
  Term bind(const std::string& hint, const Term& t) {
    if (t.is_const() && fold_) return t;
    if (!t.is_const() && t.text.find(' ') == std::string::npos) return t;  // already a symbol
    const std::string name = prefix_ + hint + "_" + std::to_string(counter_++);
    out_ << "(define-fun " << name << " () " << (t.sort == Sort::real ? "Real" : "Bool") << " " << text(t) << ")\n";
    return Term::sym(name, t.sort);
  }

  Term eval(const Expr& e, const State& st) {
    switch (e.kind) {
      case Expr::Kind::number:
        return Term::real_const(e.value);
      case Expr::Kind::boolean:
        return Term::bool_const(e.value != 0.0);
      case Expr::Kind::variable: {
        auto it = st.env.find(e.name);
        if (it == st.env.end()) throw ContractViolation("variable '" + e.name + "' read before assignment");
        return it->second;
      }
      case Expr::Kind::hole:
        if (e.hole >= ast_.holes.size()) throw ContractViolation("reference to an undeclared hole");
        return Term::sym(ast_.holes[e.hole].id, Sort::real);
      case Expr::Kind::negate: {
        const Term v = as_real(eval(*e.lhs, st));
        if (foldable(v)) return Term::real_const(-*v.constant);
        return Term::sym("(- " + text(v) + ")", Sort::real);
      }
      case Expr::Kind::logical_not:
        return lnot(as_bool(eval(*e.lhs, st)));
      case Expr::Kind::abs: {
        const Term v = as_real(eval(*e.lhs, st));
        if (foldable(v)) return Term::real_const(std::abs(*v.constant));
        const std::string s = text(v);
        return Term::sym("(ite (>= " + s + " 0.0) " + s + " (- " + s + "))", Sort::real);
      }
      case Expr::Kind::binary:
        return binary(e.op, eval(*e.lhs, st), eval(*e.rhs, st));
    }
    throw ContractViolation("unhandled expression");
  }

  Term binary(BinaryOp op, const Term& l, const Term& r) {
    if (is_logical(op)) {
      const Term a = as_bool(l);
      const Term b = as_bool(r);
      const bool is_and = op == BinaryOp::land;
      if (foldable(a) && foldable(b)) {
        const bool x = *a.constant != 0.0, y = *b.constant != 0.0;
        return Term::bool_const(is_and ? (x && y) : (x || y));
      }
      if (fold_) {
        for (const auto* side : {&a, &b}) {
          if (!side->is_const()) continue;
          const bool v = *side->constant != 0.0;
          const Term& other = side == &a ? b : a;
          if (is_and) return v ? other : Term::bool_const(false);
          return v ? Term::bool_const(true) : other;
        }
      }
      return Term::sym(std::string(is_and ? "(and " : "(or ") + text(a) + " " + text(b) + ")", Sort::boolean);
    }
    const Term a = as_real(l);
    const Term b = as_real(r);
    if (foldable(a) && foldable(b)) {
      const double x = *a.constant, y = *b.constant;
      switch (op) {
        case BinaryOp::add: return Term::real_const(x + y);
        case BinaryOp::sub: return Term::real_const(x - y);
        case BinaryOp::mul: return Term::real_const(x * y);
        case BinaryOp::div: return Term::real_const(x / y);
        case BinaryOp::lt: return Term::bool_const(x < y);
        case BinaryOp::le: return Term::bool_const(x <= y);
        case BinaryOp::gt: return Term::bool_const(x > y);
        case BinaryOp::ge: return Term::bool_const(x >= y);
        case BinaryOp::eq: return Term::bool_const(x == y);
        case BinaryOp::ne: return Term::bool_const(x != y);
        default: break;
      }
    }
    const std::string sa = text(a), sb = text(b);
    switch (op) {
      case BinaryOp::add: return Term::sym("(+ " + sa + " " + sb + ")", Sort::real);
      case BinaryOp::sub: return Term::sym("(- " + sa + " " + sb + ")", Sort::real);
      case BinaryOp::mul:
        if (!a.is_const() && !b.is_const()) nonlinear_ = true;
        return Term::sym("(* " + sa + " " + sb + ")", Sort::real);
      case BinaryOp::div:
        if (!b.is_const()) nonlinear_ = true;
        return Term::sym("(/ " + sa + " " + sb + ")", Sort::real);
      case BinaryOp::lt: return Term::sym("(< " + sa + " " + sb + ")", Sort::boolean);
      case BinaryOp::le: return Term::sym("(<= " + sa + " " + sb + ")", Sort::boolean);
      case BinaryOp::gt: return Term::sym("(> " + sa + " " + sb + ")", Sort::boolean);
      case BinaryOp::ge: return Term::sym("(>= " + sa + " " + sb + ")", Sort::boolean);
      case BinaryOp::eq: return Term::sym("(= " + sa + " " + sb + ")", Sort::boolean);
      case BinaryOp::ne: return Term::sym("(not (= " + sa + " " + sb + "))", Sort::boolean);
      default: break;
    }
    throw ContractViolation("unhandled operator");
  }

  bool definitely_done(const State& st) const { return st.done.is_const() && *st.done.constant != 0.0; }
  bool definitely_running(const State& st) const { return st.done.is_const() && *st.done.constant == 0.0; }

  void exec(const Block& block, State& st) {
    for (const auto& s : block) {
      if (definitely_done(st)) return;
      switch (s->kind) {
        case Stmt::Kind::assign: {
          Term v = eval(*s->expr, st);
          auto it = st.env.find(s->target);
          if (!definitely_running(st) && it != st.env.end()) v = ite(st.done, it->second, v);
          st.env[s->target] = bind(s->target, v);
          break;
        }
        case Stmt::Kind::if_else: {
          const Term c = as_bool(eval(*s->expr, st));
          if (c.is_const()) {
            exec(*c.constant != 0.0 ? s->then_body : s->else_body, st);
            break;
          }
          const Term cond = bind("c", c);
          State a = st, b = st;
          exec(s->then_body, a);
          exec(s->else_body, b);
          merge(cond, a, b, st);
          break;
        }
        case Stmt::Kind::ret: {
          const Term v = as_bool(eval(*s->expr, st));
          st.ret = bind("ret", definitely_running(st) ? v : ite(st.done, st.ret, v));
          st.done = Term::bool_const(true);
          break;
        }
        case Stmt::Kind::assertion:
          break;
        case Stmt::Kind::loop:
          throw ContractViolation("sketch must be unrolled before emission");
      }
    }
  }

  void merge(const Term& cond, const State& a, const State& b, State& out) {
    std::map<std::string, Term> env;
    for (const auto& [name, va] : a.env) {
      auto it = b.env.find(name);
      if (it == b.env.end()) {
        env[name] = va;
      } else {
        env[name] = bind(name, ite(cond, va, it->second));
      }
    }
    for (const auto& [name, vb] : b.env) {
      if (!env.contains(name)) env[name] = vb;
    }
    out.env = std::move(env);
    out.done = bind("done", ite(cond, a.done, b.done));
    out.ret = bind("ret", ite(cond, a.ret, b.ret));
  }

  const SketchAst& ast_;
  bool fold_;
  std::ostringstream& out_;
  std::string prefix_;
  int counter_ = 0;
  bool nonlinear_ = false;
};

}  // namespace

std::string smt_real(double v) {
  if (!std::isfinite(v)) throw ContractViolation("non-finite constant in constraint emission");
  if (v < 0) return "(- " + exact_decimal(-v) + ")";
  if (v == 0) return "0.0";
  return exact_decimal(v);
}

Encoding emit_constraints(const SketchAst& ast, std::span<const Example> examples, const EmitOptions& options) {
  if (!is_loop_free(ast)) throw ContractViolation("sketch must be unrolled before emission");
  std::ostringstream body;
  Emitter emitter(ast, options, body);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].x.size() != ast.inputs.size()) throw ContractViolation("example dimension mismatch");
    body << "; example " << i << "\n";
    emitter.example(i, examples[i]);
  }

  Encoding enc;
  enc.nonlinear = emitter.nonlinear();
  enc.logic = enc.nonlinear ? "QF_NRA" : "QF_LRA";
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic " << enc.logic << ")\n";
  for (const auto& h : ast.holes) {
    enc.hole_symbols.push_back(h.id);
    os << "(declare-const " << h.id << " Real)\n";
    os << "(assert (and (<= " << smt_real(h.lo) << " " << h.id << ") (<= " << h.id << " " << smt_real(h.hi)
       << ")))\n";
  }
  os << body.str();
  os << "(check-sat)\n";
  if (!enc.hole_symbols.empty()) {
    os << "(get-value (";
    for (std::size_t i = 0; i < enc.hole_symbols.size(); ++i) os << (i ? " " : "") << enc.hole_symbols[i];
    os << "))\n";
  }
  enc.script = os.str();
  return enc;
}

}  // namespace digits::sketch
