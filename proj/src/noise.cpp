#include "noise.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "error.hpp"
#include "philox.hpp"

namespace wsarma {

std::vector<double> generate_noise(const NoiseConfig& config, std::size_t n) {
  if (n < 1) fail(ErrorCode::InvalidInput, "noise length must be >= 1");
  const double alpha1 = config.kind == NoiseKind::StrongGaussian ? 0.0 : config.alpha1;
  if (!(alpha1 >= 0.0) || !std::isfinite(alpha1)) fail(ErrorCode::InvalidInput, "alpha1 must be >= 0");
  if (!(config.omega > 0.0) || !std::isfinite(config.omega)) fail(ErrorCode::InvalidInput, "omega must be > 0");

  PhiloxEngine engine(config.seed);
  boost::random::normal_distribution<double> normal;
  std::vector<double> out(n);
  double prev = 0.0;
  const std::size_t total = n + config.burnin;
  for (std::size_t t = 0; t < total; ++t) {
    const double eps = std::sqrt(config.omega + alpha1 * prev * prev) * normal(engine);
    if (t >= config.burnin) out[t - config.burnin] = eps;
    prev = eps;
  }
  return out;
}

std::uint64_t stream_for_replication(std::uint64_t master_seed, std::uint64_t replication_index) noexcept {
  return derive_seed(master_seed, replication_index, 0x243F6A88u);
}

}  // namespace wsarma
