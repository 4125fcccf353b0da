#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wsarma {

/// Orders of a multiplicative seasonal ARMA model (p,q)(P,Q)_s.
struct SarmaOrder {
  int p = 0;
  int q = 0;
  int P = 0;
  int Q = 0;
  int s = 1;

  int k0() const noexcept { return p + q + P + Q; }
  /// Largest AR lag of the expanded operator (p + sP).
  int ar_span() const noexcept { return p + s * P; }
  /// Largest MA lag of the expanded operator (q + sQ).
  int ma_span() const noexcept { return q + s * Q; }

  void validate() const;
  bool operator==(const SarmaOrder&) const = default;
};

/// Model identity. `theta` is laid out (a_1..a_p, b_1..b_q, A_1..A_P, B_1..B_Q)
/// with A,B the seasonal AR/MA coefficients.
struct SarmaSpec {
  SarmaOrder order;
  std::vector<double> theta;

  SarmaSpec() = default;
  SarmaSpec(SarmaOrder o, std::vector<double> t);

  std::span<const double> ar() const { return {theta.data(), static_cast<std::size_t>(order.p)}; }
  std::span<const double> ma() const {
    return {theta.data() + order.p, static_cast<std::size_t>(order.q)};
  }
  std::span<const double> seasonal_ar() const {
    return {theta.data() + order.p + order.q, static_cast<std::size_t>(order.P)};
  }
  std::span<const double> seasonal_ma() const {
    return {theta.data() + order.p + order.q + order.P, static_cast<std::size_t>(order.Q)};
  }

  /// True iff all four operator factors have their zeros strictly outside the unit disk.
  bool admissible() const;
};

/// Returns true iff every zero of 1 - c_1 z - ... - c_d z^d has modulus > 1 + 1e-8.
/// An empty coefficient vector is the constant polynomial and has no zeros.
bool check_roots(std::span<const double> coeffs);

/// Smallest modulus among the zeros of 1 - sum c_i z^i (infinity when there are none).
double min_root_modulus(std::span<const double> coeffs);

/// Lag coefficients c_k (index k = lag, c_0 unused and zero) of
/// (1 - sum a_i L^i)(1 - sum A_j L^{sj}) = 1 - sum c_k L^k.
std::vector<double> expand_product(std::span<const double> nonseasonal, std::span<const double> seasonal, int s);

/// Residual recursion with zero initial values; output length equals x.size().
std::vector<double> residuals(const SarmaSpec& spec, std::span<const double> x);

/// n x k0 matrix of d e_t / d theta_l from differentiating the residual recursion.
Eigen::MatrixXd residual_gradient(const SarmaSpec& spec, std::span<const double> x);

/// Same as residual_gradient, restricted to the listed theta columns. Fills
/// `e` with the residuals when non-null.
Eigen::MatrixXd residual_gradient(const SarmaSpec& spec, std::span<const double> x, std::span<const int> columns,
                                  std::vector<double>* e);

/// Burn-in used when none is given: 50 + 10 (s max(P,Q) + max(p,q)).
std::size_t default_burnin(const SarmaOrder& order);

/// Runs the model recursion driven by `noise` and drops the first `burnin`
/// values; the output has noise.size() - burnin entries.
std::vector<double> simulate(const SarmaSpec& spec, std::span<const double> noise, std::size_t burnin);

/// Throws InvalidInput unless x is non-empty and finite.
void validate_series(std::span<const double> x);

}  // namespace wsarma
