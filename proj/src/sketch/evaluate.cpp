#include "digits/sketch/evaluate.hpp"

#include <cmath>
#include <map>

#include "digits/core/error.hpp"
#include "digits/sketch/unroll.hpp"

namespace digits::sketch {

CompiledSketch::CompiledSketch(const SketchAst& ast) {
  if (!is_loop_free(ast)) throw ContractViolation("sketch must be unrolled before compilation");
  input_dim_ = ast.inputs.size();
  hole_count_ = ast.holes.size();
  for (const auto& p : ast.inputs) slot_of(p.name);
  compile_block(ast.body);
}

std::uint32_t CompiledSketch::slot_of(const std::string& name) {
  for (std::size_t i = 0; i < slot_names_.size(); ++i) {
    if (slot_names_[i] == name) return static_cast<std::uint32_t>(i);
  }
  slot_names_.push_back(name);
  return static_cast<std::uint32_t>(slot_names_.size() - 1);
}

void CompiledSketch::compile_block(const Block& block) {
  for (const auto& s : block) {
    switch (s->kind) {
      case Stmt::Kind::assign:
        compile_expr(*s->expr, 0);
        code_.push_back({Op::store, slot_of(s->target), 0.0});
        break;
      case Stmt::Kind::if_else: {
        compile_expr(*s->expr, 0);
        const std::size_t branch = code_.size();
        code_.push_back({Op::jump_if_false, 0, 0.0});
        compile_block(s->then_body);
        if (s->else_body.empty()) {
          code_[branch].arg = static_cast<std::uint32_t>(code_.size());
        } else {
          const std::size_t skip = code_.size();
          code_.push_back({Op::jump, 0, 0.0});
          code_[branch].arg = static_cast<std::uint32_t>(code_.size());
          compile_block(s->else_body);
          code_[skip].arg = static_cast<std::uint32_t>(code_.size());
        }
        break;
      }
      case Stmt::Kind::ret:
        compile_expr(*s->expr, 0);
        code_.push_back({Op::ret, 0, 0.0});
        break;
      case Stmt::Kind::assertion:
        compile_expr(*s->expr, 0);
        code_.push_back({Op::event, static_cast<std::uint32_t>(event_count_++), 0.0});
        break;
      case Stmt::Kind::loop:
        throw ContractViolation("loop in compiled sketch");
    }
  }
}

void CompiledSketch::compile_expr(const Expr& e, std::size_t depth) {
  max_stack_ = std::max(max_stack_, depth + 1);
  switch (e.kind) {
    case Expr::Kind::number:
    case Expr::Kind::boolean:
      code_.push_back({Op::push_const, 0, e.value});
      return;
    case Expr::Kind::variable:
      code_.push_back({Op::push_slot, slot_of(e.name), 0.0});
      return;
    case Expr::Kind::hole:
      if (e.hole >= hole_count_) throw ContractViolation("reference to an undeclared hole");
      code_.push_back({Op::push_hole, static_cast<std::uint32_t>(e.hole), 0.0});
      return;
    case Expr::Kind::negate:
      compile_expr(*e.lhs, depth);
      code_.push_back({Op::neg, 0, 0.0});
      return;
    case Expr::Kind::logical_not:
      compile_expr(*e.lhs, depth);
      code_.push_back({Op::lnot, 0, 0.0});
      return;
    case Expr::Kind::abs:
      compile_expr(*e.lhs, depth);
      code_.push_back({Op::abs, 0, 0.0});
      return;
    case Expr::Kind::binary: {
      compile_expr(*e.lhs, depth);
      compile_expr(*e.rhs, depth + 1);
      Op op = Op::add;
      switch (e.op) {
        case BinaryOp::add: op = Op::add; break;
        case BinaryOp::sub: op = Op::sub; break;
        case BinaryOp::mul: op = Op::mul; break;
        case BinaryOp::div: op = Op::div; break;
        case BinaryOp::lt: op = Op::lt; break;
        case BinaryOp::le: op = Op::le; break;
        case BinaryOp::gt: op = Op::gt; break;
        case BinaryOp::ge: op = Op::ge; break;
        case BinaryOp::eq: op = Op::eq; break;
        case BinaryOp::ne: op = Op::ne; break;
        case BinaryOp::land: op = Op::land; break;
        case BinaryOp::lor: op = Op::lor; break;
      }
      code_.push_back({op, 0, 0.0});
      return;
    }
  }
}

int CompiledSketch::run(std::span<const double> holes, std::span<const double> x, std::vector<char>* events) const {
  if (holes.size() != hole_count_) throw ContractViolation("incomplete hole assignment");
  if (x.size() != input_dim_) throw ContractViolation("sketch input dimension mismatch");
  thread_local std::vector<double> slots;
  thread_local std::vector<double> stack;
  slots.assign(slot_names_.size(), 0.0);
  std::copy(x.begin(), x.end(), slots.begin());
  stack.resize(max_stack_ + 1);
  if (events != nullptr) events->assign(event_count_, 0);

  std::size_t sp = 0;
  std::size_t pc = 0;
  while (pc < code_.size()) {
    const Instr& in = code_[pc++];
    switch (in.op) {
      case Op::push_const: stack[sp++] = in.value; break;
      case Op::push_slot: stack[sp++] = slots[in.arg]; break;
      case Op::push_hole: stack[sp++] = holes[in.arg]; break;
      case Op::neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::lnot: stack[sp - 1] = stack[sp - 1] != 0.0 ? 0.0 : 1.0; break;
      case Op::abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
      case Op::add: --sp; stack[sp - 1] += stack[sp]; break;
      case Op::sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Op::mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Op::div: --sp; stack[sp - 1] /= stack[sp]; break;
      case Op::lt: --sp; stack[sp - 1] = stack[sp - 1] < stack[sp] ? 1.0 : 0.0; break;
      case Op::le: --sp; stack[sp - 1] = stack[sp - 1] <= stack[sp] ? 1.0 : 0.0; break;
      case Op::gt: --sp; stack[sp - 1] = stack[sp - 1] > stack[sp] ? 1.0 : 0.0; break;
      case Op::ge: --sp; stack[sp - 1] = stack[sp - 1] >= stack[sp] ? 1.0 : 0.0; break;
      case Op::eq: --sp; stack[sp - 1] = stack[sp - 1] == stack[sp] ? 1.0 : 0.0; break;
      case Op::ne: --sp; stack[sp - 1] = stack[sp - 1] != stack[sp] ? 1.0 : 0.0; break;
      case Op::land: --sp; stack[sp - 1] = (stack[sp - 1] != 0.0 && stack[sp] != 0.0) ? 1.0 : 0.0; break;
      case Op::lor: --sp; stack[sp - 1] = (stack[sp - 1] != 0.0 || stack[sp] != 0.0) ? 1.0 : 0.0; break;
      case Op::store: slots[in.arg] = stack[--sp]; break;
      case Op::jump_if_false:
        if (stack[--sp] == 0.0) pc = in.arg;
        break;
      case Op::jump: pc = in.arg; break;
      case Op::ret: return stack[--sp] != 0.0 ? 1 : 0;
      case Op::event:
        --sp;
        if (events != nullptr) (*events)[in.arg] = stack[sp] != 0.0 ? 1 : 0;
        break;
    }
  }
  throw ContractViolation("sketch execution reached the end without a return");
}

std::vector<double> hole_vector(const SketchAst& ast, const HoleAssignment& holes) {
  std::vector<double> values;
  values.reserve(ast.holes.size());
  for (const auto& h : ast.holes) {
    auto it = holes.find(h.id);
    if (it == holes.end()) throw ContractViolation("incomplete hole assignment: missing " + h.id);
    if (!(it->second >= h.lo && it->second <= h.hi)) {
      throw ConfigError("value for " + h.id + " outside its range");
    }
    values.push_back(it->second);
  }
  return values;
}

HoleAssignment hole_assignment(const SketchAst& ast, std::span<const double> values) {
  if (values.size() != ast.holes.size()) throw ContractViolation("hole value count mismatch");
  HoleAssignment out;
  for (std::size_t i = 0; i < values.size(); ++i) out[ast.holes[i].id] = values[i];
  return out;
}

Observation evaluate_sketch(const SketchAst& ast, const HoleAssignment& holes, std::span<const double> x) {
  const CompiledSketch compiled(ast);
  const auto values = hole_vector(ast, holes);
  Observation obs;
  obs.output = compiled.run(values, x, &obs.events);
  return obs;
}

SketchFamily::SketchFamily(const SketchAst& ast) : ast_(unroll(ast)), compiled_(ast_) {}

std::vector<std::string> SketchFamily::input_names() const {
  std::vector<std::string> names;
  for (const auto& p : ast_.inputs) names.push_back(p.name);
  return names;
}

void SketchFamily::check_params(std::span<const double> params) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& h = ast_.holes[i];
    if (!(params[i] >= h.lo && params[i] <= h.hi)) throw ConfigError("value for " + h.id + " outside its range");
  }
}

int SketchFamily::evaluate(std::span<const double> params, std::span<const double> x) const {
  return compiled_.run(params, x, nullptr);
}

void SketchFamily::observe(std::span<const double> params, std::span<const double> x, Observation& out) const {
  out.output = compiled_.run(params, x, &out.events);
}

Program make_sketch_program(const std::shared_ptr<const SketchFamily>& family, const HoleAssignment& holes) {
  return Program(family, hole_vector(family->ast(), holes));
}

}  // namespace digits::sketch
