#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmle.hpp"
#include "sarma.hpp"
#include "test_report.hpp"
#include "uk_table.hpp"

namespace wsarma {

inline constexpr const char* kVersion = "0.1.0";

struct DiagnoseOptions {
  SarmaOrder order;
  std::vector<bool> free_mask;  // empty = all free
  std::vector<int> m_list{4, 8, 12, 15, 18, 20};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  double alpha = 0.05;
  FitOptions fit;
};

/// Band half-widths are NaN for lags beyond the m the band family was computed at.
struct LagRecord {
  int lag = 0;
  double rho = 0.0;
  double band_strong = 0.0;  // z_{1-alpha/2} / sqrt(n)
  double band_weak = 0.0;
  double band_sn = 0.0;
};

struct SkippedTest {
  Method method = Method::LB_S;
  int m = 0;
  std::string reason;
};

/// Where the series came from; filled by the caller that read the input.
struct Provenance {
  std::string input_path;
  std::string input_sha256;
  std::string input_format;
  std::string range;
  int n_raw = 0;
  int n_transformed = 0;
  bool transformed = false;
};

struct DiagnosticReport {
  DiagnoseOptions options;
  FitResult fit;
  std::vector<CoefficientInference> coefficients;
  std::vector<TestReport> tests;
  std::vector<SkippedTest> skipped;
  std::vector<LagRecord> lags;
  /// m behind the weak and SN bands: the largest m <= max(m_list) at which
  /// the estimate exists (0 when none does).
  int band_m_weak = 0;
  int band_m_sn = 0;
  UkSimConfig uk_meta;
  int uk_discarded = 0;
  Provenance provenance;
};

/// Fits, runs every requested test at every m, and computes the three band
/// families for lags 1..max(m_list). A test whose ingredients are numerically
/// degenerate at some m (singular normalizer, unstable VAR) is listed under
/// `skipped` with the error instead of aborting the report.
DiagnosticReport diagnose(std::span<const double> x, const DiagnoseOptions& options, UkTable& table);

std::string report_to_json(const DiagnosticReport& report);
std::string fit_to_json(const FitResult& fit, double level = 0.95);

/// Header lag,rho,band_strong,band_weak_lo,band_weak_hi,band_sn_lo,band_sn_hi.
void emit_plot_data(const DiagnosticReport& report, const std::string& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace wsarma
