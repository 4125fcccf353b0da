#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "noise.hpp"
#include "sarma.hpp"

namespace testing {

inline std::vector<double> simulate_series(const wsarma::SarmaSpec& spec, std::size_t n, std::uint64_t seed,
                                           double alpha1 = 0.0) {
  wsarma::NoiseConfig nc;
  nc.kind = alpha1 > 0.0 ? wsarma::NoiseKind::Arch1 : wsarma::NoiseKind::StrongGaussian;
  nc.alpha1 = alpha1;
  nc.seed = seed;
  const std::size_t burnin = wsarma::default_burnin(spec.order);
  return wsarma::simulate(spec, wsarma::generate_noise(nc, n + burnin), burnin);
}

inline double sample_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(const std::vector<double>& x) {
  const double mu = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size());
}

// Lag-h sample autocorrelation around the sample mean.
inline double sample_acf(const std::vector<double>& x, std::size_t h) {
  const double mu = sample_mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    den += (x[t] - mu) * (x[t] - mu);
    if (t >= h) num += (x[t] - mu) * (x[t - h] - mu);
  }
  return num / den;
}

// Coefficients uniform in (-0.6, 0.6): each factor of degree <= 2 with
// |c_1| + |c_2| < 1 has its zeros outside the unit disk.
inline wsarma::SarmaSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 2), sdeg(0, 1), season(2, 6);
  wsarma::SarmaOrder o{deg(rng), deg(rng), sdeg(rng), sdeg(rng), season(rng)};
  if (o.k0() == 0) o.q = 1;
  std::uniform_real_distribution<double> coef(-0.45, 0.45);
  std::vector<double> theta(static_cast<std::size_t>(o.k0()));
  for (double& t : theta) t = coef(rng);
  return {o, theta};
}

}  // namespace testing
