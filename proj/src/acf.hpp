#pragma once

#include <span>
#include <vector>

#include "test_report.hpp"

namespace wsarma {

/// Residual autocovariances with divisor n and their autocorrelations.
struct AcfSet {
  double gamma0 = 0.0;
  std::vector<double> gamma;  // gamma(1..m)
  std::vector<double> rho;    // rho(1..m)
  int m = 0;
  int n = 0;
};

AcfSet acf(std::span<const double> residuals, int m);

/// n sum rho^2 (BP) or n(n+2) sum rho^2/(n-h) (LB), without a reference law.
double portmanteau_statistic(const AcfSet& acf, PortmanteauKind kind);

/// Upper tail of chi-square with `dof` degrees of freedom.
double chi_square_tail(double x, double dof);

/// BP_S / LB_S against chi-square with m - k0 degrees of freedom.
/// Throws NotApplicable when m <= k0.
TestReport standard_test(const AcfSet& acf, int k0, PortmanteauKind kind, double alpha = 0.05);

}  // namespace wsarma
