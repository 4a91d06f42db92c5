#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "digits/core/error.hpp"
#include "digits/sketch/evaluate.hpp"
#include "digits/sketch/parser.hpp"
#include "digits/sketch/smt.hpp"
#include "digits/sketch/solver.hpp"
#include "digits/sketch/unroll.hpp"

using namespace digits;
using namespace digits::sketch;

namespace {

std::string read(const std::string& rel) {
  std::ifstream in(std::string(DIGITS_SOURCE_DIR) + "/" + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SketchAst thermostat(int unrollings, int n) {
  ParseOptions po;
  po.constants = {{"Unrollings", unrollings}, {"N", n}};
  return parse(read("bench/thermostat.skh"), po);
}

// Reference semantics: walks the AST directly, running loops by iteration
// instead of unrolling them.
class RefInterp {
 public:
  RefInterp(const SketchAst& ast, std::vector<double> holes) : ast_(ast), holes_(std::move(holes)) {}

  Observation run(const std::vector<double>& x) {
    env_.clear();
    for (std::size_t i = 0; i < x.size(); ++i) env_[ast_.inputs[i].name] = x[i];
    obs_ = Observation{};
    done_ = false;
    block(ast_.body);
    if (!done_) throw std::runtime_error("fell off the end");
    return obs_;
  }

 private:
  double eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::number:
      case Expr::Kind::boolean:
        return e.value;
      case Expr::Kind::variable:
        return env_.at(e.name);
      case Expr::Kind::hole:
        return holes_.at(e.hole);
      case Expr::Kind::negate:
        return -eval(*e.lhs);
      case Expr::Kind::logical_not:
        return eval(*e.lhs) != 0.0 ? 0.0 : 1.0;
      case Expr::Kind::abs:
        return std::fabs(eval(*e.lhs));
      case Expr::Kind::binary: {
        if (e.op == BinaryOp::land) return (eval(*e.lhs) != 0.0 && eval(*e.rhs) != 0.0) ? 1.0 : 0.0;
        if (e.op == BinaryOp::lor) return (eval(*e.lhs) != 0.0 || eval(*e.rhs) != 0.0) ? 1.0 : 0.0;
        const double a = eval(*e.lhs), b = eval(*e.rhs);
        switch (e.op) {
          case BinaryOp::add: return a + b;
          case BinaryOp::sub: return a - b;
          case BinaryOp::mul: return a * b;
          case BinaryOp::div: return a / b;
          case BinaryOp::lt: return a < b;
          case BinaryOp::le: return a <= b;
          case BinaryOp::gt: return a > b;
          case BinaryOp::ge: return a >= b;
          case BinaryOp::eq: return a == b;
          case BinaryOp::ne: return a != b;
          default: break;
        }
      }
    }
    throw std::logic_error("bad expr");
  }

  void block(const Block& b) {
    for (const auto& s : b) {
      if (done_) return;
      stmt(*s);
    }
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::assign:
        env_[s.target] = eval(*s.expr);
        break;
      case Stmt::Kind::if_else:
        block(eval(*s.expr) != 0.0 ? s.then_body : s.else_body);
        break;
      case Stmt::Kind::ret:
        obs_.output = eval(*s.expr) != 0.0 ? 1 : 0;
        done_ = true;
        break;
      case Stmt::Kind::assertion:
        obs_.events.push_back(eval(*s.expr) != 0.0);
        break;
      case Stmt::Kind::loop:
        for (long long i = s.loop_start; s.loop_inclusive ? i <= s.loop_end : i < s.loop_end; i += s.loop_step) {
          env_[s.target] = static_cast<double>(i);
          block(s.then_body);
          if (done_) return;
        }
        break;
    }
  }

  const SketchAst& ast_;
  std::vector<double> holes_;
  std::map<std::string, double> env_;
  Observation obs_;
  bool done_ = false;
};

std::vector<double> random_holes(const SketchAst& ast, std::mt19937_64& rng) {
  std::vector<double> h;
  for (const auto& hole : ast.holes) h.push_back(std::uniform_real_distribution<double>(hole.lo, hole.hi)(rng));
  return h;
}

// Random sketches with loops, branches, holes and asserts over inputs x, y.
class SketchGen {
 public:
  explicit SketchGen(std::uint64_t seed) : rng_(seed) {}

  std::string make() {
    vars_ = {"x", "y"};
    std::string body;
    const int n = pick(2, 5);
    for (int i = 0; i < n; ++i) body += stmt(1, true);
    body += "    if (" + cond() + ") { return 1; }\n";
    body += "    return " + cond() + ";\n";
    return "int gen(double x, double y) {\n" + body + "}\n";
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string num() {
    std::ostringstream os;
    os << pick(-9, 9) << "." << pick(0, 9);
    return os.str();
  }

  std::string arith(int depth) {
    const int c = depth > 2 ? pick(0, 2) : pick(0, 7);
    switch (c) {
      case 0: return vars_[static_cast<std::size_t>(pick(0, static_cast<int>(vars_.size()) - 1))];
      case 1: return num();
      case 2: return "?" "?(" + std::to_string(pick(-5, 0)) + ", " + std::to_string(pick(1, 5)) + ")";
      case 3: return "(" + arith(depth + 1) + " + " + arith(depth + 1) + ")";
      case 4: return "(" + arith(depth + 1) + " - " + arith(depth + 1) + ")";
      case 5: return "(" + num() + " * " + arith(depth + 1) + ")";
      case 6: return "abs(" + arith(depth + 1) + ")";
      default: return "-(" + arith(depth + 1) + ")";
    }
  }

  std::string cond() {
    static const char* ops[] = {"<", "<=", ">", ">=", "!="};
    std::string c = arith(1) + " " + ops[pick(0, 4)] + " " + arith(1);
    if (pick(0, 3) == 0) c = "(" + c + ") && (" + arith(2) + " < " + arith(2) + ")";
    if (pick(0, 4) == 0) c = "!(" + c + ")";
    return c;
  }

  std::string stmt(int indent, bool top) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    const int c = pick(0, top ? 4 : 2);
    if (c <= 1) {
      const std::string v = "v" + std::to_string(vars_.size());
      const std::string s = pad + "double " + v + " = " + arith(1) + ";\n";
      vars_.push_back(v);
      return s;
    }
    if (c == 2 && vars_.size() > 2) {
      const auto& v = vars_[static_cast<std::size_t>(pick(2, static_cast<int>(vars_.size()) - 1))];
      return pad + v + " = " + arith(1) + ";\n";
    }
    if (c == 3) return pad + "assert(" + cond() + "; 0.9);\n";
    if (c == 4) {
      const auto saved = vars_.size();
      std::string s = pad + "for (int i = 0; i < " + std::to_string(pick(1, 4)) + "; i = i + 1) {\n";
      s += stmt(indent + 1, false);
      s += stmt(indent + 1, false);
      const std::string guard = cond();
      const std::string value = arith(2);
      s += pad + "    if (" + guard + ") { " + (vars_.size() > 2 ? vars_[2] : std::string("x")) + " = " + value + "; }\n";
      const std::string asserted = cond();
      s += pad + "    assert(" + asserted + "; 0.5);\n";
      s += pad + "}\n";
      vars_.resize(saved);
      return s;
    }
    std::string s = pad + "if (" + cond() + ") {\n";
    s += pad + "    x = " + arith(2) + ";\n";
    s += pad + "} else {\n" + pad + "    y = ";
    s += arith(2) + ";\n" + pad + "}\n";
    return s;
  }

  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

}  // namespace

TEST(Lexer, TokensAndPositions) {
  const auto t = tokenize("double a = ?" "?(0, 1); // c\n/* x */ a += 2.5e-1;");
  ASSERT_GE(t.size(), 10u);
  EXPECT_TRUE(t[0].is_word("double"));
  EXPECT_TRUE(t[3].is("??"));
  EXPECT_EQ(t.back().kind, Token::Kind::end);
  const auto& plus_eq = t[t.size() - 4];
  EXPECT_TRUE(plus_eq.is("+="));
  EXPECT_EQ(plus_eq.line, 2);
  EXPECT_DOUBLE_EQ(t[t.size() - 3].number, 0.25);
  EXPECT_THROW(tokenize("a @ b"), SketchError);
  EXPECT_THROW(tokenize("/* open"), SketchError);
}

TEST(Parser, ThermostatShape) {
  const auto ast = thermostat(5, 8);
  EXPECT_EQ(ast.holes.size(), 3u);
  EXPECT_EQ(count_asserts(ast), 4u);
  const auto flat = unroll(ast);
  EXPECT_TRUE(is_loop_free(flat));
  EXPECT_EQ(count_asserts(flat), 8u);
  EXPECT_EQ(count_asserts(unroll(thermostat(40, 2))), 43u);
  SketchFamily fam(ast);
  EXPECT_EQ(fam.event_count(), 8u);
  EXPECT_EQ(fam.param_count(), 3u);
  EXPECT_EQ(fam.input_names(), (std::vector<std::string>{"lin", "ltarget"}));
}

TEST(Parser, RejectsWithPosition) {
  struct Case {
    const char* src;
    int line;
  };
  const Case cases[] = {
      {"int f(double x) {\n  return y < 1;\n}", 2},                              // unknown identifier
      {"int f(double x) {\n  if (x < 0) { z = 1; }\n  return z < 1;\n}", 3},     // possibly unassigned
      {"int f(double x) {\n  for (int i = 0; i < x; i = i + 1) { }\n  return 1;\n}", 2},  // non-constant bound
      {"int f(double x) {\n  return x + 1;\n}", 2},                              // not Boolean
      {"int f(double x) {\n  double a = ?" "?(1, 0);\n  return x < a;\n}", 2},     // lo > hi
      {"int f(double x) {\n  if (x < 0) { return 1; }\n}", 3},                   // falls off the end
      {"int f(double x) {\n  if (x < 0) { assert(x < 1; 0.9); }\n  return 1;\n}", 2},  // conditional assert
      {"int f(double x) {\n  return 1\n}", 3},                                   // syntax
  };
  for (const auto& c : cases) {
    try {
      parse(c.src);
      ADD_FAILURE() << "accepted: " << c.src;
    } catch (const SketchError& e) {
      EXPECT_EQ(e.line(), c.line) << c.src << " -> " << e.what();
      EXPECT_GE(e.column(), 1);
    }
  }
  EXPECT_THROW(parse("int f(double x) { for (int i = 0; i < N; i = i + 1) { } return 1; }"), SketchError);
  ParseOptions po;
  po.constants = {{"N", 3}};
  EXPECT_NO_THROW(parse("int f(double x) { for (int i = 0; i < N; i = i + 1) { } return 1; }", po));
}

TEST(Parser, RoundTripShippedSketches) {
  for (const auto& ast : {unroll(thermostat(5, 8)), unroll(thermostat(10, 2)), parse(read("bench/interval.skh"))}) {
    const auto text = print(ast);
    const auto back = parse(text);
    EXPECT_TRUE(back == ast) << text;
    EXPECT_EQ(print(back), text);
  }
}

TEST(Parser, RoundTripRandomSketches) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SketchGen gen(seed);
    const auto src = gen.make();
    SketchAst ast;
    try {
      ast = parse(src);
    } catch (const SketchError& e) {
      FAIL() << e.what() << "\n" << src;
    }
    const auto flat = unroll(ast);
    const auto back = parse(print(flat));
    EXPECT_TRUE(back == flat) << src;
  }
}

TEST(Unroll, MatchesReferenceLoopInterpreter) {
  std::mt19937_64 rng(17);
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SketchGen gen(seed + 1000);
    const auto ast = parse(gen.make());
    const auto flat = unroll(ast);
    CompiledSketch compiled(flat);
    for (int trial = 0; trial < 20; ++trial) {
      const auto holes = random_holes(ast, rng);
      const std::vector<double> x = {std::uniform_real_distribution<double>(-10, 10)(rng),
                                     std::uniform_real_distribution<double>(-10, 10)(rng)};
      RefInterp ref(ast, holes);
      const auto want = ref.run(x);
      const auto got = evaluate_sketch(flat, hole_assignment(flat, holes), x);
      ASSERT_EQ(got.output, want.output);
      ASSERT_EQ(got.events, want.events);
      std::vector<char> ev;
      ASSERT_EQ(compiled.run(holes, x, &ev), want.output);
      ASSERT_EQ(ev, want.events);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 4000u);
}

TEST(Unroll, ThermostatMatchesReference) {
  std::mt19937_64 rng(5);
  for (int u : {5, 10, 20, 40}) {
    const auto ast = thermostat(u, 8);
    SketchFamily fam(ast);
    for (int trial = 0; trial < 200; ++trial) {
      const auto holes = random_holes(ast, rng);
      const std::vector<double> x = {std::normal_distribution<double>(35, 8)(rng),
                                     std::normal_distribution<double>(75, 1)(rng)};
      RefInterp ref(ast, holes);
      const auto want = ref.run(x);
      Observation got;
      fam.observe(holes, x, got);
      ASSERT_EQ(got.output, want.output);
      ASSERT_EQ(got.events, want.events);
    }
  }
}

TEST(Evaluate, HoleChecks) {
  const auto ast = parse(read("bench/interval.skh"));
  EXPECT_THROW(hole_vector(ast, {}), ContractViolation);
  EXPECT_THROW(hole_vector(ast, {{"hole_0", 2.0}}), ConfigError);
  const auto obs = evaluate_sketch(ast, {{"hole_0", 0.5}}, std::vector<double>{0.25});
  EXPECT_EQ(obs.output, 1);
  EXPECT_EQ(evaluate_sketch(ast, {{"hole_0", 0.5}}, std::vector<double>{0.75}).output, 0);
}

TEST(Smt, RealLiteralsAreExact) {
  EXPECT_EQ(smt_real(0.5), "0.5");
  EXPECT_EQ(smt_real(-3.0), "(- 3.0)");
  EXPECT_EQ(smt_real(0.1), "0.1000000000000000055511151231257827021181583404541015625");
}

TEST(Smt, ThermostatEncodingIsLinear) {
  const auto flat = unroll(thermostat(5, 8));
  const std::vector<Example> ex = {{{30.0, 75.0}, 0}, {{50.0, 74.0}, 1}};
  const auto enc = emit_constraints(flat, ex);
  EXPECT_EQ(enc.logic, "QF_LRA");
  EXPECT_FALSE(enc.nonlinear);
  EXPECT_EQ(enc.hole_symbols.size(), 3u);
  EmitOptions raw;
  raw.fold_constants = false;
  EXPECT_EQ(emit_constraints(flat, ex, raw).hole_symbols, enc.hole_symbols);
}

TEST(Solver, ParseModel) {
  const auto m = parse_model("((a (/ 2.0 5.0)) (b (- 1.0)) (c 3))");
  EXPECT_DOUBLE_EQ(m.at("a"), 0.4);
  EXPECT_DOUBLE_EQ(m.at("b"), -1.0);
  EXPECT_DOUBLE_EQ(m.at("c"), 3.0);
  EXPECT_THROW(parse_model("((a foo))"), std::invalid_argument);
}

// Soundness: every sat model reproduces the examples. Completeness: a
// labeling produced by some hole assignment is found satisfiable.
TEST(Smt, EncodingSoundAndCompleteWithSolver) {
  const auto solver = find_solver();
  if (!solver) GTEST_SKIP() << "no SMT-LIB2 solver on PATH";
  SolverConfig cfg;
  cfg.path = *solver;
  const auto ast = thermostat(5, 8);
  const auto flat = unroll(ast);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto truth = random_holes(ast, rng);
    std::vector<Example> ex;
    for (int i = 0; i < 6; ++i) {
      std::vector<double> x = {std::normal_distribution<double>(35, 8)(rng), std::normal_distribution<double>(75, 1)(rng)};
      const int bit = evaluate_sketch(flat, hole_assignment(flat, truth), x).output;
      ex.push_back({x, bit});
    }
    const auto enc = emit_constraints(flat, ex);
    const auto res = run_solver(cfg, enc.script, enc.hole_symbols);
    ASSERT_EQ(res.status, SolverStatus::sat);
    std::vector<double> model;
    for (const auto& s : enc.hole_symbols) model.push_back(res.model.at(s));
    std::size_t agree = 0;
    for (const auto& e : ex) agree += evaluate_sketch(flat, hole_assignment(flat, model), e.x).output == e.bit;
    // A rational model may round onto a strict comparison's boundary; allow
    // at most one such flip.
    EXPECT_GE(agree + 1, ex.size());
  }
  const auto interval = parse(read("bench/interval.skh"));
  const std::vector<Example> bad = {{{0.4}, 0}, {{0.6}, 1}};
  const auto enc = emit_constraints(interval, bad);
  EXPECT_EQ(run_solver(cfg, enc.script, enc.hole_symbols).status, SolverStatus::unsat);
}
