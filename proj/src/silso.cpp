#include "silso.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace wsarma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  return in;
}

}  // namespace

YearMonth parse_year_month(const std::string& text) {
  YearMonth ym;
  const auto dash = text.find('-');
  if (dash == std::string::npos || !parse_number(text.substr(0, dash), ym.year) ||
      !parse_number(text.substr(dash + 1), ym.month) || ym.month < 1 || ym.month > 12)
    fail(ErrorCode::ParseError, "expected YYYY-MM, got '" + text + "'");
  return ym;
}

std::vector<SilsoRecord> parse_silso(std::istream& in) {
  std::vector<SilsoRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ';')) fields.push_back(field);
    if (fields.size() != 7) parse_fail(lineno, "expected 7 ';'-separated fields, found " + std::to_string(fields.size()));
    SilsoRecord r;
    if (!parse_number(fields[0], r.date.year)) parse_fail(lineno, "bad year '" + trim(fields[0]) + "'");
    if (!parse_number(fields[1], r.date.month) || r.date.month < 1 || r.date.month > 12)
      parse_fail(lineno, "bad month '" + trim(fields[1]) + "'");
    if (!parse_number(fields[2], r.decimal_date)) parse_fail(lineno, "bad decimal date '" + trim(fields[2]) + "'");
    if (!parse_number(fields[3], r.mean) || !std::isfinite(r.mean))
      parse_fail(lineno, "bad monthly mean '" + trim(fields[3]) + "'");
    if (!parse_number(fields[4], r.std_dev)) parse_fail(lineno, "bad standard deviation '" + trim(fields[4]) + "'");
    if (!parse_number(fields[5], r.n_obs)) parse_fail(lineno, "bad observation count '" + trim(fields[5]) + "'");
    if (!parse_number(fields[6], r.definitive)) parse_fail(lineno, "bad definitive flag '" + trim(fields[6]) + "'");
    out.push_back(r);
  }
  if (out.empty()) fail(ErrorCode::ParseError, "line 0: no SILSO records found");
  return out;
}

std::vector<double> select_range(const std::vector<SilsoRecord>& records, const MonthRange& range) {
  if (range.to < range.from) fail(ErrorCode::InvalidInput, "date range is empty");
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.date < range.from || range.to < r.date) continue;
    if (r.mean < 0.0)
      fail(ErrorCode::MissingData, "missing monthly mean for " + format_year_month(r.date));
    out.push_back(r.mean);
  }
  if (out.empty()) fail(ErrorCode::ParseError, "no records fall inside the requested range");
  return out;
}

std::vector<double> ingest_silso(const std::string& path, const MonthRange& range) {
  return ingest_silso_monthly(path, range).values;
}

MonthlySeries ingest_silso_monthly(const std::string& path, const MonthRange& range) {
  auto in = open_or_fail(path);
  const auto records = parse_silso(in);
  MonthlySeries out;
  out.values = select_range(records, range);
  for (const auto& r : records)
    if (!(r.date < range.from) && !(range.to < r.date)) {
      out.first = r.date;
      break;
    }
  return out;
}

std::string format_year_month(YearMonth ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
  return buf;
}

std::vector<double> ingest_plain(const std::string& path) {
  auto in = open_or_fail(path);
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    double v = 0.0;
    if (!parse_number(t, v) || !std::isfinite(v)) parse_fail(lineno, "not a finite number: '" + t + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::ParseError, "line 0: no values found");
  return out;
}

namespace {

std::vector<double> logdiff_center(std::span<const double> y, const YearMonth* first) {
  if (y.size() < 2) fail(ErrorCode::InvalidInput, "log-difference needs at least two values");
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] > 0.0) continue;
    std::string where = "position " + std::to_string(t + 1);
    if (first) {
      const int idx = first->year * 12 + (first->month - 1) + static_cast<int>(t);
      where = format_year_month({idx / 12, idx % 12 + 1});
    }
    fail(ErrorCode::DomainError, "value " + std::to_string(y[t]) + " at " + where + " is not positive");
  }
  std::vector<double> x(y.size() - 1);
  double mean = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    x[t - 1] = std::log(y[t]) - std::log(y[t - 1]);
    mean += x[t - 1];
  }
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  return x;
}

}  // namespace

std::vector<double> transform_logdiff_center(std::span<const double> y) { return logdiff_center(y, nullptr); }

std::vector<double> transform_logdiff_center(std::span<const double> y, YearMonth first) {
  return logdiff_center(y, &first);
}

}  // namespace wsarma
