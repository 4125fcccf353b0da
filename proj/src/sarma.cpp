#include "sarma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace wsarma {

namespace {

constexpr double kRootMargin = 1e-8;

struct LagTerm {
  int lag;
  double coef;
};

std::vector<LagTerm> sparse_terms(const std::vector<double>& c) {
  std::vector<LagTerm> out;
  for (std::size_t k = 1; k < c.size(); ++k)
    if (c[k] != 0.0) out.push_back({static_cast<int>(k), c[k]});
  return out;
}

// Partial derivative of the expanded product 1 - sum c_k L^k with respect to
// one coefficient, as additive lag terms of c_k.
std::vector<LagTerm> product_derivative(std::span<const double> nonseasonal, std::span<const double> seasonal, int s,
                                        bool wrt_seasonal, int index) {
  std::vector<LagTerm> out;
  if (!wrt_seasonal) {
    const int i = index + 1;
    out.push_back({i, 1.0});
    for (std::size_t j = 0; j < seasonal.size(); ++j)
      out.push_back({s * static_cast<int>(j + 1) + i, -seasonal[j]});
  } else {
    const int sj = s * (index + 1);
    out.push_back({sj, 1.0});
    for (std::size_t i = 0; i < nonseasonal.size(); ++i)
      out.push_back({sj + static_cast<int>(i + 1), -nonseasonal[i]});
  }
  return out;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double c : v)
    if (!std::isfinite(c)) fail(ErrorCode::InvalidInput, std::string(what) + " contains non-finite values");
}

}  // namespace

void SarmaOrder::validate() const {
  if (p < 0 || q < 0 || P < 0 || Q < 0) fail(ErrorCode::InvalidInput, "SARMA orders must be nonnegative");
  if (s < 1) fail(ErrorCode::InvalidInput, "season length must be >= 1");
}

SarmaSpec::SarmaSpec(SarmaOrder o, std::vector<double> t) : order(o), theta(std::move(t)) {
  order.validate();
  if (static_cast<int>(theta.size()) != order.k0())
    fail(ErrorCode::InvalidInput, "theta has " + std::to_string(theta.size()) + " entries, order needs " +
                                      std::to_string(order.k0()));
  require_finite(theta, "theta");
}

bool SarmaSpec::admissible() const {
  // Seasonal factors are polynomials in z^s; |z| > 1 iff |z^s| > 1.
  return check_roots(ar()) && check_roots(ma()) && check_roots(seasonal_ar()) && check_roots(seasonal_ma());
}

double min_root_modulus(std::span<const double> coeffs) {
  require_finite(coeffs, "polynomial coefficients");
  std::size_t d = coeffs.size();
  while (d > 0 && coeffs[d - 1] == 0.0) --d;
  if (d == 0) return std::numeric_limits<double>::infinity();
  if (d == 1) return 1.0 / std::abs(coeffs[0]);
  // Zeros of 1 - sum c_i z^i are reciprocals of the companion eigenvalues of
  // lambda^d - c_1 lambda^{d-1} - ... - c_d.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) companion(0, static_cast<Eigen::Index>(i)) = coeffs[i];
  for (std::size_t i = 1; i < d; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "companion eigenvalue solve failed");
  const double spectral_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  return 1.0 / spectral_radius;
}

bool check_roots(std::span<const double> coeffs) { return min_root_modulus(coeffs) > 1.0 + kRootMargin; }

std::vector<double> expand_product(std::span<const double> nonseasonal, std::span<const double> seasonal, int s) {
  if (s < 1) fail(ErrorCode::InvalidInput, "season length must be >= 1");
  require_finite(nonseasonal, "nonseasonal coefficients");
  require_finite(seasonal, "seasonal coefficients");
  const std::size_t p = nonseasonal.size();
  const std::size_t P = seasonal.size();
  std::vector<double> c(p + static_cast<std::size_t>(s) * P + 1, 0.0);
  for (std::size_t i = 0; i < p; ++i) c[i + 1] += nonseasonal[i];
  for (std::size_t j = 0; j < P; ++j) {
    const std::size_t sj = static_cast<std::size_t>(s) * (j + 1);
    c[sj] += seasonal[j];
    for (std::size_t i = 0; i < p; ++i) c[sj + i + 1] -= nonseasonal[i] * seasonal[j];
  }
  return c;
}

void validate_series(std::span<const double> x) {
  if (x.empty()) fail(ErrorCode::InvalidInput, "series is empty");
  require_finite(x, "series");
}

std::vector<double> residuals(const SarmaSpec& spec, std::span<const double> x) {
  validate_series(x);
  const auto ar = sparse_terms(expand_product(spec.ar(), spec.seasonal_ar(), spec.order.s));
  const auto ma = sparse_terms(expand_product(spec.ma(), spec.seasonal_ma(), spec.order.s));
  const int n = static_cast<int>(x.size());
  std::vector<double> e(x.size(), 0.0);
  for (int t = 0; t < n; ++t) {
    double v = x[t];
    for (const auto& term : ar)
      if (t >= term.lag) v -= term.coef * x[t - term.lag];
    for (const auto& term : ma)
      if (t >= term.lag) v += term.coef * e[t - term.lag];
    e[t] = v;
  }
  return e;
}

Eigen::MatrixXd residual_gradient(const SarmaSpec& spec, std::span<const double> x) {
  std::vector<int> all(static_cast<std::size_t>(spec.order.k0()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return residual_gradient(spec, x, all, nullptr);
}

Eigen::MatrixXd residual_gradient(const SarmaSpec& spec, std::span<const double> x, std::span<const int> columns,
                                  std::vector<double>* e_out) {
  const SarmaOrder& o = spec.order;
  std::vector<double> e = residuals(spec, x);
  const auto ma = sparse_terms(expand_product(spec.ma(), spec.seasonal_ma(), o.s));
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd grad(n, static_cast<Eigen::Index>(columns.size()));

  for (std::size_t c = 0; c < columns.size(); ++c) {
    const int l = columns[c];
    if (l < 0 || l >= o.k0()) fail(ErrorCode::InvalidInput, "gradient column out of range");
    // AR-side parameters enter through -sum dphi_k X_{t-k}; MA-side through
    // +sum dpsi_k e_{t-k}.
    std::vector<LagTerm> d_x;
    std::vector<LagTerm> d_e;
    if (l < o.p) {
      d_x = product_derivative(spec.ar(), spec.seasonal_ar(), o.s, false, l);
    } else if (l < o.p + o.q) {
      d_e = product_derivative(spec.ma(), spec.seasonal_ma(), o.s, false, l - o.p);
    } else if (l < o.p + o.q + o.P) {
      d_x = product_derivative(spec.ar(), spec.seasonal_ar(), o.s, true, l - o.p - o.q);
    } else {
      d_e = product_derivative(spec.ma(), spec.seasonal_ma(), o.s, true, l - o.p - o.q - o.P);
    }
    double* g = grad.col(static_cast<Eigen::Index>(c)).data();
    for (int t = 0; t < n; ++t) {
      double v = 0.0;
      for (const auto& term : d_x)
        if (t >= term.lag) v -= term.coef * x[t - term.lag];
      for (const auto& term : d_e)
        if (t >= term.lag) v += term.coef * e[t - term.lag];
      for (const auto& term : ma)
        if (t >= term.lag) v += term.coef * g[t - term.lag];
      g[t] = v;
    }
  }
  if (e_out) *e_out = std::move(e);
  return grad;
}

std::size_t default_burnin(const SarmaOrder& order) {
  return 50 + 10 * static_cast<std::size_t>(order.s * std::max(order.P, order.Q) + std::max(order.p, order.q));
}

std::vector<double> simulate(const SarmaSpec& spec, std::span<const double> noise, std::size_t burnin) {
  if (!spec.admissible())
    fail(ErrorCode::NonStationarySpec, "spec has an operator zero on or inside the unit disk");
  const std::size_t min_burnin = static_cast<std::size_t>(spec.order.ar_span() + spec.order.ma_span());
  if (burnin < min_burnin)
    fail(ErrorCode::InvalidInput, "burn-in must be at least p + sP + q + sQ = " + std::to_string(min_burnin));
  if (noise.size() <= burnin) fail(ErrorCode::InvalidInput, "noise must be longer than the burn-in");
  require_finite(noise, "noise");

  const auto ar = sparse_terms(expand_product(spec.ar(), spec.seasonal_ar(), spec.order.s));
  const auto ma = sparse_terms(expand_product(spec.ma(), spec.seasonal_ma(), spec.order.s));
  const int total = static_cast<int>(noise.size());
  std::vector<double> x(noise.size(), 0.0);
  for (int t = 0; t < total; ++t) {
    double v = noise[t];
    for (const auto& term : ar)
      if (t >= term.lag) v += term.coef * x[t - term.lag];
    for (const auto& term : ma)
      if (t >= term.lag) v -= term.coef * noise[t - term.lag];
    x[t] = v;
  }
  return {x.begin() + static_cast<std::ptrdiff_t>(burnin), x.end()};
}

}  // namespace wsarma
