#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hypodecay/errors.hpp"
#include "hypodecay/fp_problem.hpp"

namespace hypodecay {

/// On-disk problem description: dimension, row-major drift and diffusion
/// arrays, optional label.
struct ProblemFile {
  int d = 0;
  MatrixXd C_tilde;
  MatrixXd D_tilde;
  std::optional<std::string> label;
};

/// Parse a problem from JSON text; throws invalid_input_error on malformed
/// or inconsistent input (wrong array lengths, asymmetric or zero diffusion).
ProblemFile parse_problem_json(const std::string& text);

/// Read and parse a problem file from disk.
ProblemFile load_problem(const std::string& path);

FpProblem to_fp_problem(const ProblemFile& file);

/// Fixed-width float formatting for JSON output: 17 significant digits,
/// enough to reproduce the double exactly on re-parse.
std::string format_sig17(double x);

/// Shortest decimal string that round-trips to the same double (CSV cells).
std::string format_shortest(double x);

/// Minimal JSON emitter that preserves insertion order of keys and formats
/// every number the same way on every platform. Two-space indentation.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double x);
  JsonWriter& value(int x);
  JsonWriter& value(long long x);
  JsonWriter& value(bool x);
  JsonWriter& value(const std::string& s);
  JsonWriter& value(const char* s);
  JsonWriter& null_value();
  JsonWriter& matrix(const Eigen::Ref<const MatrixXd>& A);  // array of row arrays

  std::string str() const;

 private:
  void begin_value();
  void newline_indent();

  std::string out_;
  std::vector<bool> has_items_;   // per open container
  bool pending_key_ = false;
};

}  // namespace hypodecay
