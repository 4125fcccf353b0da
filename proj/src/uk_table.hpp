#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace wsarma {

/// Simulation settings behind a U_K quantile table.
struct UkSimConfig {
  int grid_steps = 5000;      // T
  int replications = 200000;  // R
  std::uint64_t seed = 20240601;
  int k_max = 20;
  std::vector<double> levels{0.90, 0.95, 0.99};
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Equal grid, replication count, seed and K range. Levels may differ.
  bool same_simulation(const UkSimConfig& other) const noexcept;
};

/// Quantiles of U_K = B_K(1)' V_K^{-1} B_K(1), V_K = int_0^1 (B_K(r) - r B_K(1))(...)' dr.
class UkTable {
 public:
  UkTable() = default;
  UkTable(UkSimConfig meta, std::map<std::pair<int, long>, double> quantiles, int discarded);

  const UkSimConfig& meta() const noexcept { return meta_; }
  int discarded() const noexcept { return discarded_; }
  bool has(int K, double level) const;
  /// Throws NotApplicable when (K, level) is not tabulated.
  double quantile(int K, double level) const;
  /// Ordered (K, level, quantile) rows.
  std::vector<std::tuple<int, double, double>> rows() const;

  static long level_key(double level);

 private:
  UkSimConfig meta_;
  std::map<std::pair<int, long>, double> quantiles_;
  int discarded_ = 0;
};

/// Simulates every K = 1..k_max from shared 20-dimensional paths. Deterministic
/// in the seed regardless of the thread count.
UkTable simulate_uk_table(const UkSimConfig& config);

void save_uk_table(const UkTable& table, const std::string& path);
UkTable load_uk_table(const std::string& path);

/// Loads `path` when its simulation settings match `config` and it covers the
/// requested levels; otherwise simulates and rewrites the file.
UkTable load_or_simulate_uk_table(const std::string& path, const UkSimConfig& config);

/// Tabulated quantile; simulates again with the extra level when it is missing.
double uk_quantile(int K, double level, UkTable& table);

}  // namespace wsarma
