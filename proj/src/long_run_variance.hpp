#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

namespace wsarma {

/// Estimate of sum_h E v_t v_{t-h}' (2 pi times the spectral density at zero).
struct LongRunVariance {
  Eigen::MatrixXd matrix;
  int var_order = 0;
  std::vector<double> aic;  // aic[r] for r = 0..r_max
};

struct LrvOptions {
  int r_max = 5;
  bool center = true;
};

/// VAR spectral estimator: least-squares VAR(r) fits for r = 0..r_max, AIC
/// selection, Xi = A(1)^{-1} Sigma_u A(1)^{-1}'. Rows of v are time points.
LongRunVariance long_run_variance(const Eigen::MatrixXd& v, const LrvOptions& options = {});

}  // namespace wsarma

namespace wsarma {

/// Largest VAR order <= r_max that the sample supports: n > d r + 1 and
/// n - r >= d (r + 1), so each least-squares equation keeps d residual
/// degrees of freedom.
inline int effective_r_max(Eigen::Index n, Eigen::Index d, int r_max) {
  if (d < 1) return 0;
  const Eigen::Index by_size = (n - 2) / d;
  const Eigen::Index by_dof = (n - d) / (d + 1);
  return static_cast<int>(std::max<Eigen::Index>(0, std::min<Eigen::Index>({r_max, by_size, by_dof})));
}

}  // namespace wsarma
