#pragma once

#include "digits/sketch/ast.hpp"

namespace digits::sketch {

/// Replaces every constant-bound loop by its body repeated once per
/// iteration, with the loop variable replaced by the iteration's value.
/// Asserts inside a loop are duplicated accordingly. Loop-free input is
/// returned unchanged.
SketchAst unroll(const SketchAst& ast);

}  // namespace digits::sketch
