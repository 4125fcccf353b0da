#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sarma.hpp"

namespace wsarma {

struct FitOptions {
  /// One flag per theta entry; false pins that coefficient at 0. Empty means all free.
  std::vector<bool> free_mask;
  int random_starts = 4;
  double start_scale = 0.1;
  std::uint64_t seed = 20190101;
  int max_iterations = 500;
  /// Sup-norm tolerance on the gradient of Q_n(theta) / Q_n(0).
  double gradient_tolerance = 1e-8;
  /// VAR order cap for the long-run variance behind I.
  int lrv_r_max = 5;
};

/// Output of a quasi-maximum-likelihood fit. Matrices and vectors indexed by
/// parameter refer to the free coefficients only, in theta order.
struct FitResult {
  SarmaSpec spec;
  std::vector<int> free_index;
  double sigma2 = 0.0;
  std::vector<double> residuals;
  Eigen::MatrixXd gradients;  // n x k
  Eigen::MatrixXd J;
  Eigen::MatrixXd I;
  Eigen::MatrixXd Sigma;
  Eigen::VectorXd se;
  int n = 0;
  int lrv_order = 0;
  int iterations = 0;
  bool converged = false;

  int k() const noexcept { return static_cast<int>(free_index.size()); }
  Eigen::VectorXd estimates() const;
};

/// Q_n(theta) = mean of squared residuals.
double objective(const SarmaSpec& spec, std::span<const double> x);

/// Fills a FitResult at a given theta without optimizing: residuals,
/// gradients, J, I, Sigma and standard errors.
FitResult evaluate_fit(std::span<const double> x, const SarmaSpec& spec, const std::vector<bool>& free_mask = {},
                       int lrv_r_max = 5);

/// Minimizes Q_n over the admissible region by multi-start BFGS.
FitResult fit(std::span<const double> x, const SarmaOrder& order, const FitOptions& options = {});

struct CoefficientInference {
  int index = 0;  // position in theta
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Two-sided Gaussian inference per free coefficient; `level` sets the interval.
std::vector<CoefficientInference> coefficient_inference(const FitResult& fit, double level = 0.95);

/// Two-sided Gaussian p-value for estimate / se.
double gaussian_two_sided_p(double estimate, double se);

}  // namespace wsarma
