#pragma once

#include <stdexcept>
#include <string>

namespace digits {

/// Invalid user-supplied configuration: distribution parameters, benchmark
/// files, postcondition text, sketch sources.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (dimension mismatch, short
/// label string, incomplete hole assignment).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The requested operation has no implementation for this program class.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// External machinery failed (solver crashed, pipe broke, unparsable solver
/// output). Distinct from an unrealizable synthesis query.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace digits
