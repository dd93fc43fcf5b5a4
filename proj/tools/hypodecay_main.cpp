#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hypodecay/cli_commands.hpp"
#include "hypodecay/errors.hpp"

namespace {

using hypodecay::CommandResult;
using hypodecay::RunConfig;

void add_input_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("problem", config.problem_path,
                  "problem JSON file {d, C_tilde, D_tilde, label?}");
  cmd->add_option("--kinetic-a", config.kinetic_a,
                  "use the kinetic problem with this spring constant instead of a file");
}

void add_grid_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--t-min", config.t_min, "grid start");
  cmd->add_option("--t-max", config.t_max, "grid end");
  cmd->add_option("--points", config.points, "grid size");
  cmd->add_option("--spacing", config.spacing, "grid spacing: linear|log")
      ->check(CLI::IsMember({"linear", "log"}));
}

void add_tol_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--pd-tol", config.pd_tol, "positive-definiteness tolerance");
  cmd->add_option("--cluster-tol", config.cluster_tol,
                  "eigenvalue clustering tolerance (0 = automatic)");
  cmd->add_option("--verify-tol", config.verify_tol, "verification tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Decay analysis for linear-drift Fokker-Planck equations: normalization, "
      "spectral gaps, hypocoercivity indices, sharp constants, and propagator-norm "
      "verification"};
  app.require_subcommand(1);

  RunConfig config;
  std::function<CommandResult(const RunConfig&)> action;

  auto* analyze = app.add_subcommand(
      "analyze", "normalize a problem and report gap, defectiveness, and index");
  add_input_flags(analyze, config);
  add_tol_flags(analyze, config);
  analyze->callback([&] { action = hypodecay::cmd_analyze; });

  auto* curve = app.add_subcommand("norm-curve", "emit the propagator-norm curve as CSV");
  add_input_flags(curve, config);
  add_grid_flags(curve, config);
  add_tol_flags(curve, config);
  curve->add_flag("--closed-form", config.closed_form,
                  "add the kinetic closed-form column (needs --kinetic-a)");
  curve->add_option("--subspace-m", config.subspace_m,
                    "add the order-m coefficient-block norm column");
  curve->callback([&] { action = hypodecay::cmd_norm_curve; });

  auto* best = app.add_subcommand("best-constant",
                                  "sharp multiplicative constant of the decay estimate");
  add_input_flags(best, config);
  add_tol_flags(best, config);
  best->add_option("--epsilon", config.epsilon,
                   "rate reduction (required for defective drifts)");
  best->callback([&] { action = hypodecay::cmd_best_constant; });

  auto* verify = app.add_subcommand(
      "verify", "run the propagator-identity and power-evolution verifiers");
  add_input_flags(verify, config);
  add_grid_flags(verify, config);
  add_tol_flags(verify, config);
  verify->add_option("--m-max", config.m_max, "largest block order to check");
  verify->add_option("--trials", config.trials, "random trials per verifier");
  verify->add_option("--seed", config.seed, "seed for randomized checks");
  verify->add_option("--perturb", config.perturb,
                     "negative control: shift block generators by this amount");
  verify->callback([&] { action = hypodecay::cmd_verify; });

  auto* kin = app.add_subcommand(
      "kinetic-fp", "cross-check the kinetic problem against its closed form");
  kin->add_option("--kinetic-a", config.kinetic_a, "spring constant a > 0")->required();
  add_grid_flags(kin, config);
  add_tol_flags(kin, config);
  kin->callback([&] { action = hypodecay::cmd_kinetic_fp; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  // per-command grid defaults for options the user did not set
  if (verify->parsed()) {
    if (!verify->count("--t-max")) config.t_max = 5.0;
    if (!verify->count("--points")) config.points = 50;
  }
  if (kin->parsed()) {
    if (!kin->count("--t-min")) config.t_min = 1e-3;
    if (!kin->count("--t-max")) config.t_max = 20.0;
    if (!kin->count("--points")) config.points = 400;
    if (!kin->count("--spacing")) config.spacing = "log";
  }

  try {
    const CommandResult result = action(config);
    std::fputs(result.output.c_str(), stdout);
    return result.exit_code;
  } catch (const hypodecay::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const hypodecay::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
