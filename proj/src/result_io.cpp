#include "fracdiff/result_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fracdiff/core.hpp"

namespace fracdiff {

const char* const kCsvHeader =
    "experiment,replicate,epsilon,delta,alpha,hurst,theta,sigma,eta,statistic,value";

namespace {

bool same_number(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

double parse_number(const std::string& field, std::size_t line) {
  if (field.empty()) return kNotApplicable;
  // strtod rather than stod: subnormal values must parse, not throw.
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  const auto used = static_cast<std::size_t>(end - field.c_str());
  if (used != field.size()) {
    std::ostringstream os;
    os << "line " << line << ": '" << field << "' is not a number";
    fail(ErrorKind::io_error, os.str());
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

void check_text_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    fail(ErrorKind::invalid_argument, "text field '" + s + "' contains a separator");
  }
}

}  // namespace

bool same_row(const ResultRow& a, const ResultRow& b) {
  return a.experiment == b.experiment && a.replicate == b.replicate &&
         same_number(a.epsilon, b.epsilon) && same_number(a.delta, b.delta) &&
         same_number(a.alpha, b.alpha) && same_number(a.hurst, b.hurst) &&
         same_number(a.theta, b.theta) && same_number(a.sigma, b.sigma) &&
         same_number(a.eta, b.eta) && a.statistic == b.statistic && same_number(a.value, b.value);
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    check_text_field(r.experiment);
    check_text_field(r.statistic);
    out << r.experiment << ',' << r.replicate << ',' << format_number(r.epsilon) << ','
        << format_number(r.delta) << ',' << format_number(r.alpha) << ','
        << format_number(r.hurst) << ',' << format_number(r.theta) << ','
        << format_number(r.sigma) << ',' << format_number(r.eta) << ',' << r.statistic << ','
        << format_number(r.value) << '\n';
  }
}

void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_error, "cannot open '" + path.string() + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) fail(ErrorKind::io_error, "write to '" + path.string() + "' failed");
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    fail(ErrorKind::io_error, "missing or unexpected CSV header");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != 11) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 11 fields, found " << f.size();
      fail(ErrorKind::io_error, os.str());
    }
    ResultRow r;
    r.experiment = f[0];
    r.replicate = static_cast<std::size_t>(parse_number(f[1], lineno));
    r.epsilon = parse_number(f[2], lineno);
    r.delta = parse_number(f[3], lineno);
    r.alpha = parse_number(f[4], lineno);
    r.hurst = parse_number(f[5], lineno);
    r.theta = parse_number(f[6], lineno);
    r.sigma = parse_number(f[7], lineno);
    r.eta = parse_number(f[8], lineno);
    r.statistic = f[9];
    r.value = parse_number(f[10], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  return read_csv(in);
}

}  // namespace fracdiff
