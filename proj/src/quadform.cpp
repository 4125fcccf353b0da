#include "quadform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/normal_distribution.hpp>

#include "error.hpp"
#include "philox.hpp"

namespace wsarma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxPanels = 4000;
constexpr double kNegligibleTail = 1e-12;

// Wynn's epsilon algorithm over a growing sequence of partial sums.
class WynnEpsilon {
 public:
  // Returns the current extrapolated limit after appending `s`.
  // diag_[j] holds eps_j^{(N-j)} after N+1 terms.
  double push(double s) {
    std::vector<double> row{s};
    double best = s;
    for (std::size_t j = 0; j < diag_.size() && row.size() < kDepth; ++j) {
      const double diff = row[j] - diag_[j];
      const double below = j == 0 ? 0.0 : diag_[j - 1];
      if (diff == 0.0 || !std::isfinite(diff)) break;
      row.push_back(below + 1.0 / diff);
      if (j % 2 == 1) best = row.back();
    }
    diag_ = std::move(row);
    return best;
  }

 private:
  static constexpr std::size_t kDepth = 40;
  std::vector<double> diag_;
};

std::vector<double> normalized_weights(const MixtureLaw& law, double& scale) {
  scale = 0.0;
  for (double w : law.xi) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidInput, "mixture weights must be finite and >= 0");
    scale = std::max(scale, w);
  }
  if (!(scale > 0.0)) fail(ErrorCode::InvalidInput, "mixture weights are all zero");
  std::vector<double> out;
  for (double w : law.xi)
    if (w > 0.0) out.push_back(w / scale);
  return out;
}

// log of the Chernoff bound min_t exp(-t y) prod (1 - 2 t w_i)^{-1/2}, w_i <= 1.
double log_chernoff(const std::vector<double>& w, double y) {
  double sum_w = 0.0;
  for (double v : w) sum_w += v;
  if (y <= sum_w) return 0.0;
  auto slope = [&](double t) {
    double d = -y;
    for (double v : w) d += v / (1.0 - 2.0 * t * v);
    return d;
  };
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  double out = -lo * y;
  for (double v : w) out -= 0.5 * std::log1p(-2.0 * lo * v);
  return out;
}

}  // namespace

double quadform_tail(const MixtureLaw& law, double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidInput, "quadratic-form argument must be finite");
  if (x < 0.0) fail(ErrorCode::InvalidInput, "quadratic-form argument must be >= 0");
  double scale = 0.0;
  const std::vector<double> w = normalized_weights(law, scale);
  if (x == 0.0) return 1.0;
  const double y = x / scale;
  if (log_chernoff(w, y) < std::log(kNegligibleTail)) return std::exp(log_chernoff(w, y));
  double sum_w = 0.0;
  for (double v : w) sum_w += v;

  auto integrand = [&](double u) {
    if (u < 1e-300) return 0.5 * (sum_w - y);
    double theta = -0.5 * y * u;
    double log_rho = 0.0;
    for (double v : w) {
      theta += 0.5 * std::atan(v * u);
      log_rho += 0.25 * std::log1p(v * v * u * u);
    }
    return std::sin(theta) / (u * std::exp(log_rho));
  };

  // Truncation bound for integrating only up to u: 1 / (pi k u^k prod sqrt(w)).
  const double k = 0.5 * static_cast<double>(w.size());
  double log_prod = 0.0;
  for (double v : w) log_prod += 0.5 * std::log(v);
  auto truncation = [&](double u) { return std::exp(-std::log(kPi * k) - k * std::log(u) - log_prod); };

  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double width = 2.0 * kPi / y;  // half-period of sin(y u / 2)
  WynnEpsilon wynn;
  double partial = 0.0;
  double last = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  for (int panel = 0; panel < kMaxPanels; ++panel) {
    const double a = panel * width;
    const double b = a + width;
    double err = 0.0;
    partial += Quad::integrate(integrand, a, b, 15, 1e-13, &err);
    if (truncation(b) < 1e-10) return std::clamp(0.5 + partial / kPi, 0.0, 1.0);
    const double est = wynn.push(partial);
    if (panel >= 8 && std::abs(est - last) < 1e-11 * std::max(1.0, std::abs(est))) {
      if (++stable >= 3) return std::clamp(0.5 + est / kPi, 0.0, 1.0);
    } else {
      stable = 0;
    }
    last = est;
  }
  fail(ErrorCode::NumericalFailure, "Imhof integral did not converge");
}

double quadform_tail_mc(const MixtureLaw& law, double x, std::uint64_t draws, std::uint64_t seed) {
  if (draws == 0) fail(ErrorCode::InvalidInput, "Monte Carlo needs at least one draw");
  for (double w : law.xi)
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidInput, "mixture weights must be finite and >= 0");
  PhiloxEngine engine(seed);
  boost::random::normal_distribution<double> normal;
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < draws; ++r) {
    double q = 0.0;
    for (double w : law.xi) {
      const double z = normal(engine);
      q += w * z * z;
    }
    if (q > x) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

double quadform_critical_value(const MixtureLaw& law, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  double hi = 1.0;
  for (double w : law.xi) hi += w;
  int guard = 0;
  while (quadform_tail(law, hi) > alpha) {
    hi *= 2.0;
    if (++guard > 200) fail(ErrorCode::NumericalFailure, "critical value bracket failed");
  }
  double lo = 0.0;
  while (hi - lo > 1e-6 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (quadform_tail(law, mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wsarma
