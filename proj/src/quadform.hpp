#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wsarma {

/// Law of sum_i xi_i Z_i^2 with Z_i iid N(0,1); weights sorted descending.
struct MixtureLaw {
  std::vector<double> xi;
};

/// P(sum xi_i Z_i^2 > x) by Imhof's inversion of the characteristic function.
/// The oscillatory tail of the integral is summed panel by panel and
/// accelerated with Wynn's epsilon algorithm; absolute error <= 1e-6. Far in the
/// tail, where the Chernoff bound drops below 1e-12, the bound is returned.
double quadform_tail(const MixtureLaw& law, double x);

/// Monte Carlo exceedance frequency of the same law; deterministic per seed.
double quadform_tail_mc(const MixtureLaw& law, double x, std::uint64_t draws, std::uint64_t seed);

/// S(1 - alpha) with P(sum xi_i Z_i^2 > S) = alpha, by bisection to 1e-6.
double quadform_critical_value(const MixtureLaw& law, double alpha);

}  // namespace wsarma
