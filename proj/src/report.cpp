#include "so3cat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace so3cat {

std::string JsonWriter::number(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string JsonWriter::escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::comma() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ << ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_obj() {
  comma();
  out_ << '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_obj() {
  out_ << '}';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_arr() {
  comma();
  out_ << '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_arr() {
  out_ << ']';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  comma();
  out_ << '"' << escape(k) << "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  comma();
  out_ << number(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  comma();
  out_ << v;
  return *this;
}

JsonWriter& JsonWriter::value(long long v) {
  comma();
  out_ << v;
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  comma();
  out_ << (v ? "true" : "false");
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  comma();
  out_ << '"' << escape(v) << '"';
  return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

JsonWriter& JsonWriter::value(const std::complex<double>& v) {
  begin_arr();
  value(v.real());
  value(v.imag());
  return end_arr();
}

JsonWriter& JsonWriter::value(const Eigen::MatrixXd& m) {
  begin_arr();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    begin_arr();
    for (Eigen::Index j = 0; j < m.cols(); ++j) value(m(i, j));
    end_arr();
  }
  return end_arr();
}

JsonWriter& JsonWriter::value(const Eigen::MatrixXcd& m) {
  begin_arr();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    begin_arr();
    for (Eigen::Index j = 0; j < m.cols(); ++j) value(m(i, j));
    end_arr();
  }
  return end_arr();
}

JsonWriter& JsonWriter::value(const Eigen::VectorXd& v) {
  begin_arr();
  for (Eigen::Index i = 0; i < v.size(); ++i) value(v(i));
  return end_arr();
}

void CheckReport::add(const std::string& name, double residual, double tol) {
  lines.push_back({name, residual, tol, residual < tol});
}

void CheckReport::add_flag(const std::string& name, bool ok) {
  lines.push_back({name, ok ? 0.0 : 1.0, 0.5, ok});
}

bool CheckReport::all_pass() const {
  return std::all_of(lines.begin(), lines.end(),
                     [](const CheckLine& l) { return l.pass; });
}

double CheckReport::worst() const {
  double w = 0.0;
  for (const auto& l : lines) w = std::max(w, l.residual);
  return w;
}

std::string CheckReport::to_text() const {
  std::ostringstream os;
  for (const auto& l : lines) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %-58s residual=%.3e tol=%.1e\n",
                  l.pass ? "[OK]  " : "[FAIL]", l.name.c_str(), l.residual,
                  l.tol);
    os << buf;
  }
  return os.str();
}

std::string CheckReport::to_json() const {
  JsonWriter w;
  w.begin_obj();
  w.key("checks").begin_arr();
  for (const auto& l : lines) {
    w.begin_obj();
    w.key("name").value(l.name);
    w.key("pass").value(l.pass);
    w.key("residual").value(l.residual);
    w.key("tol").value(l.tol);
    w.end_obj();
  }
  w.end_arr();
  w.key("pass").value(all_pass());
  w.key("schema").value("so3cat/1");
  w.end_obj();
  return w.str();
}

}  // namespace so3cat
