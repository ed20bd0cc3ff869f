#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace fracdiff {

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

/// One statistic from one replicate. Parameters that do not apply are NaN and
/// render as empty fields.
struct ResultRow {
  std::string experiment;
  std::size_t replicate = 0;
  double epsilon = kNotApplicable;
  double delta = kNotApplicable;
  double alpha = kNotApplicable;
  double hurst = kNotApplicable;
  double theta = kNotApplicable;
  double sigma = kNotApplicable;
  double eta = kNotApplicable;
  std::string statistic;
  double value = kNotApplicable;
};

/// Equality that treats two NaNs in the same column as equal.
bool same_row(const ResultRow& a, const ResultRow& b);

extern const char* const kCsvHeader;

/// 17 significant digits; NaN becomes an empty string.
std::string format_number(double v);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

}  // namespace fracdiff
