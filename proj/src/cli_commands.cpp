#include "hypodecay/cli_commands.hpp"

#include <cmath>
#include <sstream>

#include "hypodecay/hermite_subspace.hpp"
#include "hypodecay/matrix_ops.hpp"
#include "hypodecay/parallel.hpp"
#include "hypodecay/propagator.hpp"

namespace hypodecay {

namespace {

FpProblem resolve_problem(const RunConfig& config) {
  if (config.kinetic_a && config.problem_path)
    throw invalid_input_error("give either a problem file or --kinetic-a, not both");
  if (config.kinetic_a) return kinetic_problem(*config.kinetic_a);
  if (config.problem_path) return to_fp_problem(load_problem(*config.problem_path));
  throw invalid_input_error("no input: pass a problem file or --kinetic-a <a>");
}

// Drift for curve/constant/verify work. The kinetic shorthand uses the
// explicit normalized drift; files go through the full normalization.
MatrixXd resolve_drift(const RunConfig& config) {
  if (config.kinetic_a) return kinetic_normalized_drift(*config.kinetic_a);
  return normalize(resolve_problem(config)).C;
}

VectorXd resolve_grid(const RunConfig& config) {
  if (config.points < 2) throw invalid_input_error("grid needs at least 2 points");
  if (config.spacing == "linear") {
    if (!(config.t_min >= 0.0)) throw invalid_input_error("grid needs t_min >= 0");
    return linear_grid(config.t_min, config.t_max, config.points);
  }
  if (config.spacing == "log") {
    if (!(config.t_min > 0.0))
      throw invalid_input_error("log spacing needs t_min > 0");
    return log_grid(config.t_min, config.t_max, config.points);
  }
  throw invalid_input_error("spacing must be 'linear' or 'log'");
}

void write_verify_report(JsonWriter& w, const VerifyReport& r) {
  w.begin_object();
  w.key("check").value(r.check);
  w.key("m").value(r.m_worst);
  w.key("t_worst").value(r.t_worst);
  w.key("deviation").value(r.deviation);
  w.key("tolerance").value(r.tolerance);
  w.key("pass").value(r.pass);
  w.end_object();
}

}  // namespace

CommandResult cmd_analyze(const RunConfig& config) {
  const FpProblem problem = resolve_problem(config);
  const ConditionReport condition = check_condition_a(problem);
  if (!condition.all())
    throw condition_error("problem is not well posed: " + condition.details);
  const NormalizedFp fp = normalize(problem);

  JsonWriter w;
  w.begin_object();
  w.key("d").value(fp.d);
  if (!problem.label.empty()) w.key("label").value(problem.label);
  w.key("condition").begin_object();
  w.key("cs_psd").value(condition.cs_psd);
  w.key("kawashima_ok").value(condition.kawashima_ok);
  w.key("positive_stable").value(condition.positive_stable);
  w.key("details").value(condition.details);
  w.end_object();
  w.key("K").matrix(fp.K);
  w.key("C").matrix(fp.C);
  w.key("mu").value(fp.mu);
  w.key("defective").value(fp.defective);
  w.key("M").value(fp.M);
  if (fp.m_HC) {
    w.key("m_HC").value(*fp.m_HC);
    w.key("alpha").value(2 * *fp.m_HC + 1);
  } else {
    w.key("m_HC").null_value();
    w.key("alpha").null_value();
  }
  w.end_object();
  return {0, w.str()};
}

CommandResult cmd_norm_curve(const RunConfig& config) {
  if (config.closed_form && !config.kinetic_a)
    throw invalid_input_error("--closed-form needs the kinetic shorthand --kinetic-a");
  const MatrixXd C = resolve_drift(config);
  const VectorXd grid = resolve_grid(config);
  const NormCurve curve = h_curve(C, grid);

  VectorXd closed;
  if (config.closed_form) {
    closed.resize(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      closed(i) = kinetic_fp_closed_form(*config.kinetic_a, grid(i));
  }

  VectorXd block;
  if (config.subspace_m >= 1) {
    const SubspaceGenerator gen = build_generator(C, config.subspace_m);
    block.resize(grid.size());
    const MatrixXd Am = gen.Cm_normalized;
    parallel_for(static_cast<int>(grid.size()),
                 [&](int i) { block(i) = spectral_norm(expm(-grid(i) * Am)); });
  }

  std::ostringstream out;
  out << "t,h";
  if (config.closed_form) out << ",closed_form";
  if (config.subspace_m >= 1) out << ",subspace_m" << config.subspace_m;
  out << "\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << format_shortest(grid(i)) << "," << format_shortest(curve.values(i));
    if (config.closed_form) out << "," << format_shortest(closed(i));
    if (config.subspace_m >= 1) out << "," << format_shortest(block(i));
    out << "\n";
  }
  return {0, out.str()};
}

CommandResult cmd_best_constant(const RunConfig& config) {
  const MatrixXd C = resolve_drift(config);
  const SpectralGap gap = spectral_gap(C, config.cluster_tol);
  if (gap.defective && !config.epsilon)
    throw condition_error(
        "defective drift: no finite constant at the sharp rate; pass --epsilon "
        "to reduce the rate");

  ConstantReport report;
  if (C.rows() == 2 && !gap.defective && !config.epsilon)
    report = best_constant_2x2(C);
  else
    report = best_constant_numeric(C, config.epsilon);

  JsonWriter w;
  w.begin_object();
  w.key("mu").value(report.mu);
  w.key("c_numeric").value(report.c_numeric);
  w.key("t_argmax").value(report.t_argmax);
  w.key("epsilon").value(report.epsilon);
  if (report.closed_form)
    w.key("closed_form").value(*report.closed_form);
  else
    w.key("closed_form").null_value();
  w.key("case_tag").value(report.case_tag);
  w.key("attained_at_infinity").value(report.attained_at_infinity);
  w.end_object();
  return {0, w.str()};
}

CommandResult cmd_verify(const RunConfig& config) {
  const MatrixXd C = resolve_drift(config);
  const VectorXd grid = resolve_grid(config);

  const VerifyReport main_check =
      verify_main_theorem(C, config.m_max, grid, config.verify_tol, config.perturb);
  const std::vector<VerifyReport> rank1 = verify_rank1_evolution(
      C, std::min(config.m_max, 4), config.trials, config.seed);

  bool all_pass = main_check.pass;
  for (const auto& r : rank1) all_pass = all_pass && r.pass;

  JsonWriter w;
  w.begin_object();
  w.key("checks").begin_array();
  write_verify_report(w, main_check);
  for (const auto& r : rank1) write_verify_report(w, r);
  w.end_array();
  w.key("pass").value(all_pass);
  w.end_object();
  return {all_pass ? 0 : 1, w.str()};
}

CommandResult cmd_kinetic_fp(const RunConfig& config) {
  if (!config.kinetic_a) throw invalid_input_error("kinetic-fp needs --kinetic-a <a>");
  const double a = *config.kinetic_a;
  const NormalizedFp fp = normalize(kinetic_problem(a));
  const MatrixXd C = kinetic_normalized_drift(a);
  const VectorXd grid = resolve_grid(config);
  const NormCurve curve = h_curve(C, grid);

  double deviation = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    deviation =
        std::max(deviation, std::abs(curve.values(i) - kinetic_fp_closed_form(a, grid(i))));
  const bool pass = deviation <= config.verify_tol;

  std::optional<double> c1;
  if (a < 0.25)
    c1 = 1.0 / std::sqrt(1.0 - 4.0 * a);
  else if (a > 0.25)
    c1 = (2.0 * std::sqrt(a) + 1.0) / std::sqrt(4.0 * a - 1.0);

  JsonWriter w;
  w.begin_object();
  w.key("a").value(a);
  w.key("mu").value(fp.mu);
  w.key("defective").value(fp.defective);
  w.key("M").value(fp.M);
  if (fp.m_HC) {
    w.key("m_HC").value(*fp.m_HC);
    w.key("alpha").value(2 * *fp.m_HC + 1);
  } else {
    w.key("m_HC").null_value();
    w.key("alpha").null_value();
  }
  if (c1)
    w.key("c1_closed_form").value(*c1);
  else
    w.key("c1_closed_form").null_value();
  w.key("grid").begin_object();
  w.key("t_min").value(config.t_min);
  w.key("t_max").value(config.t_max);
  w.key("points").value(config.points);
  w.key("spacing").value(config.spacing);
  w.end_object();
  w.key("max_abs_deviation").value(deviation);
  w.key("tolerance").value(config.verify_tol);
  w.key("pass").value(pass);
  w.end_object();
  return {pass ? 0 : 1, w.str()};
}

}  // namespace hypodecay
