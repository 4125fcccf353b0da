#pragma once

#include <vector>

#include <Eigen/Dense>

#include "acf.hpp"
#include "qmle.hpp"
#include "test_report.hpp"
#include "uk_table.hpp"

namespace wsarma {

/// C_m = n^{-2} sum_t S_t S_t', S_t = sum_{j<=t} (Lambda w_j - Lambda w_bar).
/// `basis` and `eigenvalues` diagonalize C; they come from the SVD of the
/// partial-sum matrix, which resolves small eigenvalues far below the
/// rounding floor of C itself.
struct SnNormalizer {
  Eigen::MatrixXd C;
  Eigen::MatrixXd Lambda;
  Eigen::MatrixXd basis;
  Eigen::VectorXd eigenvalues;
};

/// From the W rows and Phi_m. Throws DegenerateNormalizer when C is singular.
SnNormalizer sn_normalizer(const Eigen::MatrixXd& w, const Eigen::MatrixXd& phi);
/// Requires at least one free coefficient.
SnNormalizer sn_normalizer(const FitResult& fit, int m);

struct SnStatistics {
  double q_sn = 0.0;     // n sigma^4 rho' C^{-1} rho
  double q_sn_lb = 0.0;  // same with rho replaced by D^{1/2} rho, D = diag((n+2)/(n-h))
};

SnStatistics sn_statistics(const AcfSet& acf, double sigma2, const SnNormalizer& normalizer);
SnStatistics sn_statistics(const FitResult& fit, int m);

/// Per-lag limits sqrt(U_1(level) C_hh / n) / sigma^2 from the one-dimensional statistic.
std::vector<double> sn_bands(const SnNormalizer& normalizer, double sigma2, int n, double u1);

/// Rejects iff the statistic exceeds U_m(1 - alpha). p_value is NaN:
/// the table holds quantiles only.
TestReport sn_test(const AcfSet& acf, double sigma2, const SnNormalizer& normalizer, PortmanteauKind kind,
                   double alpha, UkTable& table);
TestReport sn_test(const FitResult& fit, int m, double alpha, PortmanteauKind kind, UkTable& table);

}  // namespace wsarma
