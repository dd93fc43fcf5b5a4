#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hypodecay/problem_io.hpp"

namespace hypodecay {

/// Everything the commands need beyond the problem itself. Field defaults
/// are overridden per command before flag parsing (see the CLI wiring).
struct RunConfig {
  // tolerances
  double pd_tol = 1e-9;
  double cluster_tol = 0.0;  // 0 = automatic, scaled by the matrix norm
  double verify_tol = 1e-8;
  // time grid
  double t_min = 0.0;
  double t_max = 10.0;
  int points = 201;
  std::string spacing = "linear";  // linear | log
  // verification scope
  int m_max = 4;
  int trials = 20;
  std::uint64_t seed = 12345;
  double perturb = 0.0;  // negative-control shift of the block generators
  // constants
  std::optional<double> epsilon;
  // norm-curve extras
  bool closed_form = false;
  int subspace_m = 0;  // >= 1 adds the subspace-norm column
  // input selection
  std::optional<double> kinetic_a;
  std::optional<std::string> problem_path;
  // output
  std::string format = "json";  // csv | json (norm-curve is always csv)
};

/// A command's stdout payload plus its process exit code
/// (0 ok, 1 verification failed; hard errors are thrown instead).
struct CommandResult {
  int exit_code = 0;
  std::string output;
};

CommandResult cmd_analyze(const RunConfig& config);
CommandResult cmd_norm_curve(const RunConfig& config);
CommandResult cmd_best_constant(const RunConfig& config);
CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_kinetic_fp(const RunConfig& config);

}  // namespace hypodecay
