#include "qmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/normal_distribution.hpp>

#include "error.hpp"
#include "long_run_variance.hpp"
#include "philox.hpp"

namespace wsarma {

namespace {

// Solutions whose nearest operator zero is closer than this to the unit
// circle are treated as boundary solutions.
constexpr double kBoundaryMargin = 1e-3;
constexpr double kMaxStep = 0.5;
constexpr double kPolishTolerance = 1e-13;
constexpr int kPolishIterations = 20;

std::vector<int> free_columns(const SarmaOrder& order, const std::vector<bool>& mask) {
  const int k0 = order.k0();
  if (!mask.empty() && static_cast<int>(mask.size()) != k0)
    fail(ErrorCode::InvalidInput, "coefficient mask has " + std::to_string(mask.size()) + " entries, expected " +
                                      std::to_string(k0));
  std::vector<int> cols;
  for (int l = 0; l < k0; ++l)
    if (mask.empty() || mask[static_cast<std::size_t>(l)]) cols.push_back(l);
  return cols;
}

double boundary_distance(const SarmaSpec& spec) {
  double d = std::numeric_limits<double>::infinity();
  for (auto part : {spec.ar(), spec.ma(), spec.seasonal_ar(), spec.seasonal_ma()})
    d = std::min(d, min_root_modulus(part) - 1.0);
  return d;
}

class Problem {
 public:
  Problem(std::span<const double> x, SarmaOrder order, std::vector<int> cols)
      : x_(x), order_(order), cols_(std::move(cols)) {
    double q0 = 0.0;
    for (double v : x_) q0 += v * v;
    scale_ = q0 / static_cast<double>(x_.size());
    if (!(scale_ > 0.0)) fail(ErrorCode::DegenerateSeries, "series is identically zero");
  }

  int dim() const { return static_cast<int>(cols_.size()); }

  SarmaSpec spec_at(const Eigen::VectorXd& phi) const {
    std::vector<double> theta(static_cast<std::size_t>(order_.k0()), 0.0);
    for (int i = 0; i < dim(); ++i) theta[static_cast<std::size_t>(cols_[i])] = phi(i);
    return SarmaSpec(order_, std::move(theta));
  }

  // Scaled objective Q_n / Q_n(0), its gradient and the Gauss-Newton matrix.
  double eval(const Eigen::VectorXd& phi, Eigen::VectorXd* grad, Eigen::MatrixXd* gn) const {
    const SarmaSpec spec = spec_at(phi);
    const double n = static_cast<double>(x_.size());
    if (!grad && !gn) {
      const auto e = residuals(spec, x_);
      double acc = 0.0;
      for (double v : e) acc += v * v;
      return acc / n / scale_;
    }
    std::vector<double> e;
    const Eigen::MatrixXd g = residual_gradient(spec, x_, cols_, &e);
    const Eigen::Map<const Eigen::VectorXd> ev(e.data(), static_cast<Eigen::Index>(e.size()));
    if (grad) *grad = (2.0 / (n * scale_)) * (g.transpose() * ev);
    if (gn) *gn = (2.0 / (n * scale_)) * (g.transpose() * g);
    return ev.squaredNorm() / n / scale_;
  }

 private:
  std::span<const double> x_;
  SarmaOrder order_;
  std::vector<int> cols_;
  double scale_ = 1.0;
};

enum class StartOutcome { Converged, PrecisionLimit, IterationLimit, Boundary };

struct StartResult {
  Eigen::VectorXd phi;
  double f = 0.0;
  double f_start = 0.0;
  int iterations = 0;
  StartOutcome outcome = StartOutcome::IterationLimit;
};

Eigen::MatrixXd safe_inverse(const Eigen::MatrixXd& gn) {
  const Eigen::Index k = gn.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gn);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return Eigen::MatrixXd::Identity(k, k);
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(1e-8 * top);
  return es.eigenvectors() * clipped.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

StartResult bfgs(const Problem& prob, Eigen::VectorXd phi, const FitOptions& opt) {
  const int k = prob.dim();
  StartResult res;
  Eigen::VectorXd g;
  Eigen::MatrixXd gn;
  double f = prob.eval(phi, &g, &gn);
  res.f_start = f;
  Eigen::MatrixXd h = safe_inverse(gn);
  const double eps = std::numeric_limits<double>::epsilon();

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.cwiseAbs().maxCoeff() < opt.gradient_tolerance) {
      res.outcome = StartOutcome::Converged;
      break;
    }
    Eigen::VectorXd d = -h * g;
    if (!(g.dot(d) < 0.0)) {
      h = safe_inverse(gn);
      d = -h * g;
      if (!(g.dot(d) < 0.0)) d = -g;
    }
    const double dmax = d.cwiseAbs().maxCoeff();
    if (dmax > kMaxStep) d *= kMaxStep / dmax;

    const double slope = g.dot(d);
    double t = 1.0;
    bool accepted = false;
    bool hit_boundary = false;
    Eigen::VectorXd phi_new;
    double f_new = 0.0;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      phi_new = phi + t * d;
      if (!prob.spec_at(phi_new).admissible()) {
        hit_boundary = true;
        continue;
      }
      f_new = prob.eval(phi_new, nullptr, nullptr);
      if (f_new <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      // Objective flat to rounding: accept when the gradient still shrinks.
      if (std::abs(f_new - f) <= 16.0 * eps * std::abs(f)) {
        Eigen::VectorXd g_try;
        prob.eval(phi_new, &g_try, nullptr);
        if (g_try.cwiseAbs().maxCoeff() < g.cwiseAbs().maxCoeff()) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      res.outcome = hit_boundary ? StartOutcome::Boundary : StartOutcome::PrecisionLimit;
      break;
    }
    Eigen::VectorXd g_new;
    f_new = prob.eval(phi_new, &g_new, &gn);
    const Eigen::VectorXd s = phi_new - phi;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    phi = std::move(phi_new);
    f = f_new;
    g = std::move(g_new);
  }
  if (it == opt.max_iterations) res.outcome = StartOutcome::IterationLimit;
  res.phi = std::move(phi);
  res.f = f;
  res.iterations = it;
  return res;
}

}  // namespace

Eigen::VectorXd FitResult::estimates() const {
  Eigen::VectorXd out(k());
  for (int i = 0; i < k(); ++i) out(i) = spec.theta[static_cast<std::size_t>(free_index[static_cast<std::size_t>(i)])];
  return out;
}

double objective(const SarmaSpec& spec, std::span<const double> x) {
  const auto e = residuals(spec, x);
  double acc = 0.0;
  for (double v : e) acc += v * v;
  return acc / static_cast<double>(e.size());
}

FitResult evaluate_fit(std::span<const double> x, const SarmaSpec& spec, const std::vector<bool>& free_mask,
                       int lrv_r_max) {
  validate_series(x);
  FitResult out;
  out.spec = spec;
  out.free_index = free_columns(spec.order, free_mask);
  out.n = static_cast<int>(x.size());
  out.gradients = residual_gradient(spec, x, out.free_index, &out.residuals);
  const double n = out.n;
  const Eigen::Map<const Eigen::VectorXd> e(out.residuals.data(), out.n);
  out.sigma2 = e.squaredNorm() / n;
  if (!(out.sigma2 > 0.0)) fail(ErrorCode::DegenerateSeries, "residuals are identically zero");

  const int k = out.k();
  if (k == 0) {
    out.J.resize(0, 0);
    out.I.resize(0, 0);
    out.Sigma.resize(0, 0);
    out.se.resize(0);
    return out;
  }
  out.J = (2.0 / out.sigma2) * (out.gradients.transpose() * out.gradients) / n;
  out.J = (0.5 * (out.J + out.J.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.J);
  const auto ev = es.eigenvalues();
  if (!(ev(0) > 1e-12 * ev(ev.size() - 1)))
    fail(ErrorCode::RankDeficient, "J is singular: the free coefficients are not identified");

  const Eigen::MatrixXd upsilon = (2.0 / out.sigma2) * (out.gradients.array().colwise() * e.array()).matrix();
  LrvOptions lrv;
  lrv.r_max = effective_r_max(upsilon.rows(), upsilon.cols(), lrv_r_max);
  const LongRunVariance lr = long_run_variance(upsilon, lrv);
  out.I = lr.matrix;
  out.lrv_order = lr.var_order;

  const Eigen::MatrixXd j_inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  out.Sigma = j_inv * out.I * j_inv;
  out.Sigma = (0.5 * (out.Sigma + out.Sigma.transpose())).eval();
  out.se = (out.Sigma.diagonal().cwiseMax(0.0) / n).cwiseSqrt();
  return out;
}

FitResult fit(std::span<const double> x, const SarmaOrder& order, const FitOptions& options) {
  order.validate();
  validate_series(x);
  const std::vector<int> cols = free_columns(order, options.free_mask);
  const int k = static_cast<int>(cols.size());
  if (static_cast<int>(x.size()) <= 10 * k)
    fail(ErrorCode::InvalidInput, "fit needs n > 10 k (n = " + std::to_string(x.size()) + ", k = " +
                                      std::to_string(k) + ")");

  const Problem prob(x, order, cols);
  if (k == 0) {
    FitResult r = evaluate_fit(x, prob.spec_at(Eigen::VectorXd()), options.free_mask, options.lrv_r_max);
    r.converged = true;
    return r;
  }

  std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(k)};
  boost::random::normal_distribution<double> normal(0.0, options.start_scale);
  for (int i = 0; i < options.random_starts; ++i) {
    PhiloxEngine engine(options.seed, static_cast<std::uint64_t>(i) + 1);
    Eigen::VectorXd phi(k);
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (int j = 0; j < k; ++j) phi(j) = normal(engine);
      if (prob.spec_at(phi).admissible()) break;
    }
    if (prob.spec_at(phi).admissible()) starts.push_back(phi);
  }

  const StartResult* best = nullptr;
  std::vector<StartResult> results;
  results.reserve(starts.size());
  bool any_boundary = false;
  for (const auto& s0 : starts) {
    results.push_back(bfgs(prob, s0, options));
    StartResult& r = results.back();
    if (r.outcome != StartOutcome::Boundary &&
        boundary_distance(prob.spec_at(r.phi)) < kBoundaryMargin)
      r.outcome = StartOutcome::Boundary;
  }
  for (const auto& r : results) {
    if (r.outcome == StartOutcome::Boundary) {
      any_boundary = true;
      continue;
    }
    if (!best || r.f < best->f) best = &r;
  }
  if (!best) {
    if (any_boundary)
      fail(ErrorCode::BoundarySolution, "optimizer terminated at the admissibility boundary (theta_0 not interior)");
    fail(ErrorCode::NumericalFailure, "no start produced an admissible solution");
  }
  for (const auto& r : results)
    if (r.outcome == StartOutcome::Boundary && r.f < best->f - 1e-10)
      fail(ErrorCode::BoundarySolution, "the smallest objective lies at the admissibility boundary");

  // Polish the winner well below the stopping tolerance.
  Eigen::VectorXd phi_hat = best->phi;
  int iterations = best->iterations;
  if (best->outcome == StartOutcome::Converged) {
    FitOptions tight = options;
    tight.gradient_tolerance = std::min(options.gradient_tolerance, kPolishTolerance);
    tight.max_iterations = kPolishIterations;
    const StartResult polished = bfgs(prob, best->phi, tight);
    if (polished.outcome != StartOutcome::Boundary && polished.f <= best->f + 16.0 * std::numeric_limits<double>::epsilon() * std::abs(best->f) &&
        boundary_distance(prob.spec_at(polished.phi)) >= kBoundaryMargin) {
      phi_hat = polished.phi;
      iterations += polished.iterations;
    }
  }

  FitResult out = evaluate_fit(x, prob.spec_at(phi_hat), options.free_mask, options.lrv_r_max);
  out.iterations = iterations;
  out.converged = best->outcome == StartOutcome::Converged;
  return out;
}

double gaussian_two_sided_p(double estimate, double se) {
  if (!(se > 0.0) || !std::isfinite(se)) fail(ErrorCode::DegenerateInference, "standard error is zero or not finite");
  return std::erfc(std::abs(estimate / se) / std::sqrt(2.0));
}

std::vector<CoefficientInference> coefficient_inference(const FitResult& f, double level) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidInput, "confidence level must lie in (0,1)");
  const double zq = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
  std::vector<CoefficientInference> out;
  for (int i = 0; i < f.k(); ++i) {
    CoefficientInference ci;
    ci.index = f.free_index[static_cast<std::size_t>(i)];
    ci.estimate = f.spec.theta[static_cast<std::size_t>(ci.index)];
    ci.se = f.se(i);
    ci.p_value = gaussian_two_sided_p(ci.estimate, ci.se);
    ci.z = ci.estimate / ci.se;
    ci.ci_low = ci.estimate - zq * ci.se;
    ci.ci_high = ci.estimate + zq * ci.se;
    out.push_back(ci);
  }
  return out;
}

}  // namespace wsarma
