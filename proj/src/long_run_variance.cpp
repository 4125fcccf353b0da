#include "long_run_variance.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace wsarma {

namespace {

constexpr double kMaxCondition = 1e12;

double log_det_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const auto diag = llt.matrixLLT().diagonal();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    acc += 2.0 * std::log(diag(i));
  }
  return acc;
}

struct VarFit {
  Eigen::MatrixXd coef_sum;  // sum_i A_i
  Eigen::MatrixXd sigma_u;
};

VarFit fit_var(const Eigen::MatrixXd& v, int r) {
  const Eigen::Index n = v.rows();
  const Eigen::Index d = v.cols();
  VarFit out;
  if (r == 0) {
    out.coef_sum = Eigen::MatrixXd::Zero(d, d);
    out.sigma_u = (v.transpose() * v) / static_cast<double>(n);
    return out;
  }
  const Eigen::Index n_eff = n - r;
  Eigen::MatrixXd z(n_eff, r * d);
  for (int i = 1; i <= r; ++i) z.middleCols((i - 1) * d, d) = v.middleRows(r - i, n_eff);
  const auto y = v.bottomRows(n_eff);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(r * d, r * d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.selfadjointView<Eigen::Lower>());
  if (ldlt.info() != Eigen::Success) fail(ErrorCode::UnstableVar, "VAR normal equations are singular");
  const Eigen::MatrixXd b = ldlt.solve(z.transpose() * y);  // (r d) x d, block i is A_i'
  const Eigen::MatrixXd u = y - z * b;
  out.sigma_u = (u.transpose() * u) / static_cast<double>(n_eff);
  out.coef_sum = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < r; ++i) out.coef_sum += b.middleRows(i * d, d).transpose();
  return out;
}

}  // namespace

LongRunVariance long_run_variance(const Eigen::MatrixXd& v_in, const LrvOptions& options) {
  const Eigen::Index n = v_in.rows();
  const Eigen::Index d = v_in.cols();
  if (d < 1) fail(ErrorCode::InvalidInput, "long-run variance needs at least one column");
  if (options.r_max < 0) fail(ErrorCode::InvalidInput, "r_max must be >= 0");
  if (n <= d * options.r_max + 1)
    fail(ErrorCode::InvalidInput, "long-run variance needs n > d * r_max + 1 (n = " + std::to_string(n) +
                                      ", d = " + std::to_string(d) + ")");
  if (!v_in.allFinite()) fail(ErrorCode::InvalidInput, "long-run variance input is not finite");

  Eigen::MatrixXd v = v_in;
  if (options.center) v.rowwise() -= v.colwise().mean();

  LongRunVariance out;
  out.aic.assign(static_cast<std::size_t>(options.r_max) + 1, std::numeric_limits<double>::infinity());
  VarFit best;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int r = 0; r <= options.r_max; ++r) {
    VarFit fit = fit_var(v, r);
    const double ld = log_det_spd(fit.sigma_u);
    if (std::isnan(ld)) continue;
    const double aic = static_cast<double>(n) * ld + 2.0 * r * static_cast<double>(d * d);
    out.aic[static_cast<std::size_t>(r)] = aic;
    if (aic < best_aic) {
      best_aic = aic;
      best = std::move(fit);
      out.var_order = r;
    }
  }
  if (!std::isfinite(best_aic)) fail(ErrorCode::UnstableVar, "no VAR order gave a nonsingular innovation covariance");

  const Eigen::MatrixXd a1 = Eigen::MatrixXd::Identity(d, d) - best.coef_sum;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a1);
  const auto sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > kMaxCondition)
    fail(ErrorCode::UnstableVar, "VAR(" + std::to_string(out.var_order) + ") has a near-unit root: A(1) is singular");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a1);
  const Eigen::MatrixXd a1_inv = lu.inverse();
  Eigen::MatrixXd xi = a1_inv * best.sigma_u * a1_inv.transpose();
  out.matrix = 0.5 * (xi + xi.transpose());
  return out;
}

}  // namespace wsarma
