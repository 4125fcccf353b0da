#include "selfnorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "error.hpp"
#include "weak_tests.hpp"

namespace wsarma {

namespace {

constexpr double kMaxCondition = 1e16;

// v' C^{-1} v through the eigen-decomposition.
double quadratic(const SnNormalizer& norm, const Eigen::VectorXd& v) {
  const Eigen::VectorXd c = norm.basis.transpose() * v;
  return (c.array().square() / norm.eigenvalues.array()).sum();
}

}  // namespace

SnNormalizer sn_normalizer(const Eigen::MatrixXd& w, const Eigen::MatrixXd& phi) {
  const Eigen::Index m = phi.rows();
  if (m < 1) fail(ErrorCode::InvalidInput, "m must be >= 1");
  if (w.cols() != phi.cols() + m) fail(ErrorCode::InvalidInput, "W must have k + m columns");
  SnNormalizer out;
  out.Lambda = lambda_matrix(phi);
  const double n = static_cast<double>(w.rows());
  Eigen::MatrixXd s = w * out.Lambda.transpose();  // n x m
  s.rowwise() -= s.colwise().mean();
  for (Eigen::Index t = 1; t < s.rows(); ++t) s.row(t) += s.row(t - 1);
  out.C = Eigen::MatrixXd::Zero(m, m);
  out.C.selfadjointView<Eigen::Lower>().rankUpdate(s.transpose(), 1.0 / (n * n));
  out.C = out.C.selfadjointView<Eigen::Lower>();

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(s / n, Eigen::ComputeThinV);
  out.basis = svd.matrixV();
  out.eigenvalues = svd.singularValues().array().square();
  const double lo = out.eigenvalues.minCoeff();
  const double hi = out.eigenvalues.maxCoeff();
  if (!(hi > 0.0)) fail(ErrorCode::DegenerateNormalizer, "self-normalizer C is zero");
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "self-normalizer C is numerically singular (eigenvalues %.3g .. %.3g)", lo, hi);
    fail(ErrorCode::DegenerateNormalizer, buf);
  }
  return out;
}

SnNormalizer sn_normalizer(const FitResult& fit, int m) {
  if (fit.k() < 1)
    fail(ErrorCode::NotApplicable, "self-normalized tests need at least one estimated coefficient");
  return sn_normalizer(build_w(fit, m), phi_hat(fit, m));
}

SnStatistics sn_statistics(const AcfSet& acf, double sigma2, const SnNormalizer& normalizer) {
  const int m = acf.m;
  if (normalizer.C.rows() != m) fail(ErrorCode::InvalidInput, "normalizer and ACF disagree on m");
  const double n = static_cast<double>(acf.n);
  Eigen::VectorXd rho(m), rho_lb(m);
  for (int h = 0; h < m; ++h) {
    rho(h) = acf.rho[static_cast<std::size_t>(h)];
    rho_lb(h) = std::sqrt((n + 2.0) / (n - (h + 1))) * rho(h);
  }
  const double scale = n * sigma2 * sigma2;
  return {scale * quadratic(normalizer, rho), scale * quadratic(normalizer, rho_lb)};
}

SnStatistics sn_statistics(const FitResult& fit, int m) {
  return sn_statistics(acf(fit.residuals, m), fit.sigma2, sn_normalizer(fit, m));
}

std::vector<double> sn_bands(const SnNormalizer& normalizer, double sigma2, int n, double u1) {
  std::vector<double> out(static_cast<std::size_t>(normalizer.C.rows()));
  for (Eigen::Index h = 0; h < normalizer.C.rows(); ++h)
    out[static_cast<std::size_t>(h)] = std::sqrt(u1 * normalizer.C(h, h) / n) / sigma2;
  return out;
}

TestReport sn_test(const AcfSet& acf, double sigma2, const SnNormalizer& normalizer, PortmanteauKind kind,
                   double alpha, UkTable& table) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  const SnStatistics stats = sn_statistics(acf, sigma2, normalizer);
  TestReport r;
  r.method = kind == PortmanteauKind::LjungBox ? Method::LB_SN : Method::BP_SN;
  r.m = acf.m;
  r.alpha = alpha;
  r.statistic = kind == PortmanteauKind::LjungBox ? stats.q_sn_lb : stats.q_sn;
  r.reference_law = "U_" + std::to_string(acf.m);
  r.critical_value = uk_quantile(acf.m, 1.0 - alpha, table);
  r.p_value = std::numeric_limits<double>::quiet_NaN();
  r.reject = r.statistic > r.critical_value;
  r.bands = sn_bands(normalizer, sigma2, acf.n, uk_quantile(1, 1.0 - alpha, table));
  return r;
}

TestReport sn_test(const FitResult& fit, int m, double alpha, PortmanteauKind kind, UkTable& table) {
  return sn_test(acf(fit.residuals, m), fit.sigma2, sn_normalizer(fit, m), kind, alpha, table);
}

}  // namespace wsarma
