#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmle.hpp"
#include "test_report.hpp"
#include "uk_table.hpp"

namespace wsarma {

enum class Dgp {
  Size,   // (1 + 0.6L)(1 + 0.7L^s) MA noise, fitted with the true order
  Power,  // adds an AR(1) term 0.8, fitted without it
};

const char* dgp_name(Dgp d) noexcept;
Dgp parse_dgp(const std::string& name);

struct ExperimentConfig {
  Dgp dgp = Dgp::Size;
  int s = 4;
  int n = 2000;
  int replications = 1000;  // N
  double alpha1 = 0.0;
  std::vector<int> m_list{4, 8, 12, 15, 18, 20};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  /// When > n, each replication draws a path of this length and uses its first n values.
  int path_length = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  /// Replications whose fit or tests fail are dropped; more than this share is an error.
  double max_failure_fraction = 0.02;
  FitOptions fit;
};

/// None marks rows whose frequency is not a size (power experiments).
enum class BandFlag { Inside, Outside95, Outside99, None };

const char* band_flag_name(BandFlag f) noexcept;

struct TableRow {
  int s = 0;
  int n = 0;
  int m = 0;
  Method method = Method::LB_S;
  bool applicable = true;
  double freq = 0.0;  // percent of retained replications
  BandFlag flag = BandFlag::Inside;
};

struct ExperimentResult {
  std::vector<TableRow> rows;
  int replications = 0;
  int failures = 0;
};

/// Exact binomial limits (percent) for an empirical rejection rate at nominal
/// alpha over N replications: lower = (Q(a) - 1) / N, upper = Q(1 - a) / N
/// with Q the binomial quantile and a = (1 - confidence) / 2.
std::pair<double, double> binomial_band(int N, double alpha, double confidence);

BandFlag flag_band(double freq_percent, int N, double alpha);

/// Empirical size under the null design.
ExperimentResult run_size(const ExperimentConfig& config, UkTable& table);
/// Empirical power against the AR(1)-augmented alternative.
ExperimentResult run_power(const ExperimentConfig& config, UkTable& table);
/// Dispatches on config.dgp.
ExperimentResult run_experiment(const ExperimentConfig& config, UkTable& table);

/// Header `s,n,m,method,freq,flag`; n.a. cells for inapplicable rows.
void write_csv(const ExperimentResult& result, std::ostream& out, bool header = true);

}  // namespace wsarma
