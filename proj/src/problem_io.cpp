#include "hypodecay/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hypodecay {

namespace {

MatrixXd matrix_from_row_major(const std::vector<double>& a, int d, const char* name) {
  if (a.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
    throw invalid_input_error(std::string(name) + " must hold d*d entries");
  MatrixXd M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      M(i, j) = a[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                  static_cast<std::size_t>(j)];
  return M;
}

}  // namespace

ProblemFile parse_problem_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw invalid_input_error("problem file must be a JSON object");

  ProblemFile file;
  try {
    file.d = j.at("d").get<int>();
    if (file.d < 1) throw invalid_input_error("problem dimension must be >= 1");
    const auto c = j.at("C_tilde").get<std::vector<double>>();
    const auto dd = j.at("D_tilde").get<std::vector<double>>();
    file.C_tilde = matrix_from_row_major(c, file.d, "C_tilde");
    file.D_tilde = matrix_from_row_major(dd, file.d, "D_tilde");
    if (j.contains("label")) file.label = j.at("label").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error(std::string("problem file is missing or mistypes a field: ") +
                              e.what());
  }

  if (!file.C_tilde.allFinite() || !file.D_tilde.allFinite())
    throw invalid_input_error("problem matrices must be finite");
  const double scale = std::max(1.0, file.D_tilde.cwiseAbs().maxCoeff());
  if ((file.D_tilde - file.D_tilde.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw invalid_input_error("diffusion matrix must be symmetric (within 1e-12)");
  if (file.D_tilde.isZero(0.0))
    throw invalid_input_error("diffusion matrix is identically zero");
  return file;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input_error("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_json(buf.str());
}

FpProblem to_fp_problem(const ProblemFile& file) {
  FpProblem p;
  p.C_tilde = file.C_tilde;
  p.D_tilde = file.D_tilde;
  p.label = file.label.value_or("");
  p.validate();
  return p;
}

std::string format_sig17(double x) {
  if (!std::isfinite(x)) throw numerical_error("refusing to serialize a non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_shortest(double x) {
  if (!std::isfinite(x)) throw numerical_error("refusing to serialize a non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

JsonWriter& JsonWriter::begin_object() {
  begin_value();
  out_ += '{';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool had = has_items_.back();
  has_items_.pop_back();
  if (had) newline_indent();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  begin_value();
  out_ += '[';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  const bool had = has_items_.back();
  has_items_.pop_back();
  if (had) newline_indent();
  out_ += ']';
  return *this;
}

void JsonWriter::newline_indent() {
  out_ += '\n';
  out_.append(2 * has_items_.size(), ' ');
}

void JsonWriter::begin_value() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!has_items_.empty()) {
    if (has_items_.back()) out_ += ',';
    has_items_.back() = true;
    newline_indent();
  }
}

JsonWriter& JsonWriter::key(const std::string& name) {
  if (has_items_.back()) out_ += ',';
  has_items_.back() = true;
  newline_indent();
  out_ += '"';
  out_ += name;  // keys are plain identifiers here, no escaping needed
  out_ += "\": ";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  begin_value();
  out_ += format_sig17(x);
  return *this;
}

JsonWriter& JsonWriter::value(int x) {
  begin_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(long long x) {
  begin_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(bool x) {
  begin_value();
  out_ += x ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
  begin_value();
  out_ += '"';
  for (char c : s) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      case '\r': out_ += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof(esc), "\\u%04x", c);
          out_ += esc;
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::null_value() {
  begin_value();
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::matrix(const Eigen::Ref<const MatrixXd>& A) {
  begin_array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    begin_value();  // one inline row per line
    out_ += '[';
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j > 0) out_ += ", ";
      out_ += format_sig17(A(i, j));
    }
    out_ += ']';
  }
  end_array();
  return *this;
}

std::string JsonWriter::str() const { return out_ + "\n"; }

}  // namespace hypodecay
