#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace digits::sketch {

struct SolverConfig {
  /// Executable name or path. Empty: discovered by find_solver().
  std::string path;
  /// Extra arguments. Empty: chosen from the executable name (z3: -in -smt2;
  /// cvc4/cvc5: --lang=smt2).
  std::vector<std::string> args;
  int timeout_ms = 10000;
};

enum class SolverStatus { sat, unsat, unknown, timeout };

const char* to_string(SolverStatus s);

struct SolverResult {
  SolverStatus status = SolverStatus::unknown;
  /// symbol -> value, filled for sat answers.
  std::map<std::string, double> model;
  /// Set when the answer was sat but a value could not be read as a real.
  std::string note;
  double wall_s = 0.0;
};

/// The solver named by $DIGITS_SOLVER if set, else the first of z3, cvc5,
/// cvc4 found on PATH. `requested`, when non-empty, is resolved against PATH
/// (or used as given when it contains a slash).
std::optional<std::string> find_solver(const std::string& requested = "");

std::vector<std::string> default_solver_args(const std::string& path);

/// Runs one SMT-LIB2 script in a fresh child process, feeding it on standard
/// input. The script should end with (check-sat) and, when `symbols` is not
/// empty, (get-value (symbols...)). A run that exceeds the timeout is killed
/// and reported as timeout. Throws InfrastructureError if the process cannot
/// be started or answers with an error instead of sat/unsat/unknown.
SolverResult run_solver(const SolverConfig& config, const std::string& script, const std::vector<std::string>& symbols);

/// Reads a get-value response such as ((a (/ 2.0 5.0)) (b (- 1.0))).
/// Throws std::invalid_argument on values that are not rational literals.
std::map<std::string, double> parse_model(const std::string& text);

}  // namespace digits::sketch
