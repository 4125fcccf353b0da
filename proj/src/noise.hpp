#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wsarma {

enum class NoiseKind { StrongGaussian, Arch1 };

/// Innovation regime. StrongGaussian is Arch1 with alpha1 = 0.
struct NoiseConfig {
  NoiseKind kind = NoiseKind::StrongGaussian;
  double alpha1 = 0.0;
  double omega = 1.0;
  std::uint64_t seed = 0;
  std::size_t burnin = 500;
};

/// eps_t = sigma_t eta_t, sigma_t^2 = omega + alpha1 eps_{t-1}^2, eta iid N(0,1).
std::vector<double> generate_noise(const NoiseConfig& config, std::size_t n);

/// Seed of the independent stream used by replication `replication_index`.
std::uint64_t stream_for_replication(std::uint64_t master_seed, std::uint64_t replication_index) noexcept;

}  // namespace wsarma
