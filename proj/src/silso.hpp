#pragma once

#include <compare>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace wsarma {

struct YearMonth {
  int year = 0;
  int month = 1;
  auto operator<=>(const YearMonth&) const = default;
};

/// Parses "YYYY-MM".
YearMonth parse_year_month(const std::string& text);
std::string format_year_month(YearMonth ym);

struct MonthRange {
  YearMonth from{2010, 1};
  YearMonth to{2018, 12};
};

/// One row of the SILSO monthly mean total sunspot number file:
/// year; month; decimal date; mean; std-dev; n-obs; definitive flag.
struct SilsoRecord {
  YearMonth date;
  double decimal_date = 0.0;
  double mean = 0.0;
  double std_dev = -1.0;
  int n_obs = -1;
  int definitive = 0;
};

std::vector<SilsoRecord> parse_silso(std::istream& in);

/// Mean column of the records inside `range`, in file order. Throws
/// MissingData for a -1 sentinel inside the range.
std::vector<double> select_range(const std::vector<SilsoRecord>& records, const MonthRange& range);

std::vector<double> ingest_silso(const std::string& path, const MonthRange& range = {});

struct MonthlySeries {
  YearMonth first;
  std::vector<double> values;
};

/// As ingest_silso, also reporting the month of the first selected value.
MonthlySeries ingest_silso_monthly(const std::string& path, const MonthRange& range = {});

/// One number per line; blank lines and '#' comments are skipped.
std::vector<double> ingest_plain(const std::string& path);

/// X_t = Z_t - mean(Z) with Z_t = log y_t - log y_{t-1}; output length n - 1.
std::vector<double> transform_logdiff_center(std::span<const double> y);

/// As above; domain errors name the offending month counted from `first`.
std::vector<double> transform_logdiff_center(std::span<const double> y, YearMonth first);

}  // namespace wsarma
