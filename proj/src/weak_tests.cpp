#include "weak_tests.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "error.hpp"

namespace wsarma {

namespace {

void require_lags(const FitResult& fit, int m) {
  if (m < 1) fail(ErrorCode::InvalidInput, "m must be >= 1");
  if (m >= fit.n) fail(ErrorCode::InvalidInput, "m must be smaller than the sample size");
  if (!(fit.sigma2 > 0.0)) fail(ErrorCode::DegenerateSeries, "residual variance is zero");
}

// Lagged residual matrix: row t holds (e_{t-1}, ..., e_{t-m}).
Eigen::MatrixXd lagged(const std::vector<double>& e, int m) {
  const int n = static_cast<int>(e.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, m);
  for (int h = 1; h <= m; ++h)
    for (int t = h; t < n; ++t) out(t, h - 1) = e[static_cast<std::size_t>(t - h)];
  return out;
}

}  // namespace

Eigen::MatrixXd build_w(const FitResult& fit, int m) {
  require_lags(fit, m);
  const int n = fit.n;
  const int k = fit.k();
  const Eigen::Map<const Eigen::VectorXd> e(fit.residuals.data(), n);
  Eigen::MatrixXd w(n, k + m);
  if (k > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(fit.J);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
      fail(ErrorCode::RankDeficient, "J is singular");
    // Row t: -2/sigma^2 e_t (J^{-1} g_t)'.
    const Eigen::MatrixXd jg = ldlt.solve(fit.gradients.transpose());  // k x n
    w.leftCols(k) = (-2.0 / fit.sigma2) * (jg.transpose().array().colwise() * e.array()).matrix();
  }
  w.rightCols(m) = (lagged(fit.residuals, m).array().colwise() * e.array()).matrix();
  return w;
}

Eigen::MatrixXd phi_hat(const FitResult& fit, int m) {
  require_lags(fit, m);
  return lagged(fit.residuals, m).transpose() * fit.gradients / static_cast<double>(fit.n);
}

Eigen::MatrixXd lambda_matrix(const Eigen::MatrixXd& phi) {
  const Eigen::Index m = phi.rows();
  Eigen::MatrixXd out(m, phi.cols() + m);
  out << phi, Eigen::MatrixXd::Identity(m, m);
  return out;
}

SigmaRho sigma_rho(double sigma2, const Eigen::MatrixXd& phi, const Eigen::MatrixXd& xi) {
  if (!(sigma2 > 0.0)) fail(ErrorCode::DegenerateSeries, "residual variance is zero");
  if (xi.rows() != xi.cols() || xi.rows() != phi.rows() + phi.cols())
    fail(ErrorCode::InvalidInput, "Xi must be (k + m) x (k + m)");
  const Eigen::MatrixXd lambda = lambda_matrix(phi);
  Eigen::MatrixXd s = lambda * xi * lambda.transpose() / (sigma2 * sigma2);
  SigmaRho out;
  out.matrix = 0.5 * (s + s.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigen-decomposition of Sigma_rho failed");
  const Eigen::VectorXd values = eig.eigenvalues();  // ascending
  const double top = values.maxCoeff();
  if (!(top > 0.0)) fail(ErrorCode::NonPsdEstimate, "Sigma_rho has no positive eigenvalue");
  out.law.xi.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
    double v = values(i);
    if (v < 0.0) {
      if (v < -1e-8 * top)
        fail(ErrorCode::NonPsdEstimate, "Sigma_rho has eigenvalue " + std::to_string(v) + " (largest " +
                                            std::to_string(top) + ")");
      v = 0.0;
    }
    out.law.xi.push_back(v);
  }
  return out;
}

WeakAnalysis analyze_weak(const FitResult& fit, int m, int lrv_r_max) {
  WeakAnalysis out;
  out.acf = acf(fit.residuals, m);
  out.phi = phi_hat(fit, m);
  out.w = build_w(fit, m);
  LrvOptions opts;
  opts.r_max = effective_r_max(out.w.rows(), out.w.cols(), lrv_r_max);
  out.lrv = long_run_variance(out.w, opts);
  out.sigma = sigma_rho(fit.sigma2, out.phi, out.lrv.matrix);
  return out;
}

TestReport modified_test(const WeakAnalysis& analysis, PortmanteauKind kind, double alpha, bool critical_value) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  TestReport r;
  r.method = kind == PortmanteauKind::LjungBox ? Method::LB_W : Method::BP_W;
  r.m = analysis.acf.m;
  r.alpha = alpha;
  r.statistic = portmanteau_statistic(analysis.acf, kind);
  r.reference_law = "weighted chi-square mixture (" + std::to_string(r.m) + " weights)";
  try {
    r.p_value = quadform_tail(analysis.sigma.law, r.statistic);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::NumericalFailure) throw;
    r.p_value = quadform_tail_mc(analysis.sigma.law, r.statistic, 1000000, 0x5eed);
  }
  r.critical_value = critical_value ? quadform_critical_value(analysis.sigma.law, alpha)
                                    : std::numeric_limits<double>::quiet_NaN();
  r.reject = r.p_value < alpha;
  r.bands = acf_bands_weak(analysis, alpha);
  return r;
}

TestReport modified_test(const FitResult& fit, int m, PortmanteauKind kind, double alpha) {
  return modified_test(analyze_weak(fit, m), kind, alpha, true);
}

std::vector<double> acf_bands_weak(const WeakAnalysis& analysis, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
  const double n = static_cast<double>(analysis.acf.n);
  std::vector<double> out(static_cast<std::size_t>(analysis.acf.m));
  for (int h = 0; h < analysis.acf.m; ++h) out[static_cast<std::size_t>(h)] = z * std::sqrt(analysis.sigma.matrix(h, h) / n);
  return out;
}

std::vector<double> acf_bands_weak(const FitResult& fit, int m, double alpha) {
  return acf_bands_weak(analyze_weak(fit, m), alpha);
}

}  // namespace wsarma
