#pragma once
// Deterministic serialization helpers: a minimal streaming JSON writer
// (floats at 17 significant digits, keys emitted in the order callers pass
// them — callers keep them sorted), CSV emission, and a check-report type
// shared by the CLI subcommands.

#include <Eigen/Dense>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

namespace so3cat {

// Streaming JSON writer.  Usage:
//   JsonWriter w; w.begin_obj(); w.key("x").value(1.0); w.end_obj();
class JsonWriter {
 public:
  JsonWriter& begin_obj();
  JsonWriter& end_obj();
  JsonWriter& begin_arr();
  JsonWriter& end_arr();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long long v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  // [re, im] pair
  JsonWriter& value(const std::complex<double>& v);
  // nested arrays, row-major
  JsonWriter& value(const Eigen::MatrixXd& m);
  JsonWriter& value(const Eigen::MatrixXcd& m);
  JsonWriter& value(const Eigen::VectorXd& v);
  std::string str() const { return out_.str(); }

  static std::string number(double v);  // %.17g, with inf/nan guarded
  static std::string escape(const std::string& s);

 private:
  void comma();
  std::ostringstream out_;
  std::vector<bool> first_;     // per open container: next item is first?
  bool pending_key_ = false;    // a key was just written; next value inline
};

// One verification line: name, numeric residual, threshold, verdict.
struct CheckLine {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  void add(const std::string& name, double residual, double tol);
  // For counting checks ("found N, expected K") record 0/1 residual.
  void add_flag(const std::string& name, bool ok);
  bool all_pass() const;
  double worst() const;
  std::string to_text() const;   // one aligned line per check
  std::string to_json() const;   // {"schema":"so3cat/1","checks":[...]}
};

}  // namespace so3cat
