#include "uk_table.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "error.hpp"
#include "philox.hpp"

namespace wsarma {

namespace {

constexpr const char* kMagic = "wsarma-uk-table";
constexpr int kFormatVersion = 1;
constexpr std::uint32_t kPathTag = 0xB7E15162;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void validate_config(const UkSimConfig& c) {
  if (c.grid_steps < 10) fail(ErrorCode::InvalidInput, "U_K grid needs at least 10 steps");
  if (c.replications < 100) fail(ErrorCode::InvalidInput, "U_K simulation needs at least 100 replications");
  if (c.k_max < 1) fail(ErrorCode::InvalidInput, "U_K table needs k_max >= 1");
  if (c.levels.empty()) fail(ErrorCode::InvalidInput, "U_K table needs at least one level");
  for (double l : c.levels)
    if (!(l > 0.0 && l < 1.0)) fail(ErrorCode::InvalidInput, "U_K levels must lie in (0,1)");
}

struct PathWorkspace {
  RowMatrix w;
  Eigen::MatrixXd gram;
  Eigen::VectorXd end;
};

// One draw of (U_1, ..., U_kmax) from a shared path; false when V is degenerate.
bool draw_path(PhiloxEngine& engine, int T, int d, PathWorkspace& ws, double* out) {
  boost::random::normal_distribution<double> normal;
  ws.w.resize(T, d);
  double* data = ws.w.data();
  const std::size_t total = static_cast<std::size_t>(T) * d;
  for (std::size_t i = 0; i < total; ++i) data[i] = normal(engine);
  for (int t = 1; t < T; ++t) ws.w.row(t) += ws.w.row(t - 1);
  ws.end = ws.w.row(T - 1).transpose();
  for (int t = 0; t < T; ++t) ws.w.row(t) -= (static_cast<double>(t + 1) / T) * ws.end.transpose();
  ws.gram.noalias() = ws.w.transpose() * ws.w;
  Eigen::LLT<Eigen::MatrixXd> llt(ws.gram);
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  const double scale = ws.gram.diagonal().maxCoeff();
  for (int j = 0; j < d; ++j)
    if (!(diag(j) * diag(j) > 1e-12 * scale)) return false;
  const Eigen::VectorXd y = llt.matrixL().solve(ws.end);
  double acc = 0.0;
  for (int k = 0; k < d; ++k) {
    acc += y(k) * y(k);
    out[k] = static_cast<double>(T) * acc;
  }
  return true;
}

double empirical_quantile(std::vector<double>& sorted, double level) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

bool UkSimConfig::same_simulation(const UkSimConfig& o) const noexcept {
  return grid_steps == o.grid_steps && replications == o.replications && seed == o.seed && k_max == o.k_max;
}

UkTable::UkTable(UkSimConfig meta, std::map<std::pair<int, long>, double> quantiles, int discarded)
    : meta_(std::move(meta)), quantiles_(std::move(quantiles)), discarded_(discarded) {}

long UkTable::level_key(double level) { return std::lround(level * 1e6); }

bool UkTable::has(int K, double level) const { return quantiles_.count({K, level_key(level)}) > 0; }

double UkTable::quantile(int K, double level) const {
  const auto it = quantiles_.find({K, level_key(level)});
  if (it == quantiles_.end())
    fail(ErrorCode::NotApplicable, "U_K quantile not tabulated for K = " + std::to_string(K) +
                                       ", level = " + std::to_string(level));
  return it->second;
}

std::vector<std::tuple<int, double, double>> UkTable::rows() const {
  std::vector<std::tuple<int, double, double>> out;
  for (const auto& [key, q] : quantiles_) out.emplace_back(key.first, static_cast<double>(key.second) / 1e6, q);
  return out;
}

UkTable simulate_uk_table(const UkSimConfig& config) {
  validate_config(config);
  const int T = config.grid_steps;
  const int R = config.replications;
  const int d = config.k_max;
  const int max_discards = R / 1000;
  std::vector<double> draws(static_cast<std::size_t>(R) * d);
  std::vector<int> redraws(static_cast<std::size_t>(R), 0);

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(R));
  constexpr int kChunk = 256;
  std::atomic<int> next{0};
  std::atomic<int> discarded{0};
  auto worker = [&] {
    PathWorkspace ws;
    for (;;) {
      const int begin = next.fetch_add(kChunk);
      if (begin >= R || discarded.load() > max_discards) return;
      const int end = std::min(R, begin + kChunk);
      for (int r = begin; r < end; ++r) {
        for (int attempt = 0;; ++attempt) {
          PhiloxEngine engine(derive_seed(config.seed, static_cast<std::uint64_t>(r), kPathTag + attempt));
          if (draw_path(engine, T, d, ws, &draws[static_cast<std::size_t>(r) * d])) break;
          redraws[static_cast<std::size_t>(r)] = attempt + 1;
          if (discarded.fetch_add(1) + 1 > max_discards) return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (discarded.load() > max_discards)
    fail(ErrorCode::NumericalFailure, "more than 0.1% of U_K draws had a singular V_K");

  int total_discards = 0;
  for (int v : redraws) total_discards += v;

  std::map<std::pair<int, long>, double> quantiles;
  std::vector<double> column(static_cast<std::size_t>(R));
  for (int k = 0; k < d; ++k) {
    for (int r = 0; r < R; ++r) column[static_cast<std::size_t>(r)] = draws[static_cast<std::size_t>(r) * d + k];
    std::sort(column.begin(), column.end());
    for (double level : config.levels) quantiles[{k + 1, UkTable::level_key(level)}] = empirical_quantile(column, level);
  }
  return UkTable(config, std::move(quantiles), total_discards);
}

void save_uk_table(const UkTable& table, const std::string& path) {
  std::ostringstream os;
  const auto& m = table.meta();
  os << "# U_K = B_K(1)' V_K^{-1} B_K(1) quantiles from simulated Brownian paths\n";
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "discarded " << table.discarded() << '\n';
  os << "# K level quantile T R seed\n";
  char buf[128];
  for (const auto& [k, level, q] : table.rows()) {
    std::snprintf(buf, sizeof buf, "%d %.6g %.17g %d %d %llu\n", k, level, q, m.grid_steps, m.replications,
                  static_cast<unsigned long long>(m.seed));
    os << buf;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write U_K table: " + path);
  out << os.str();
  if (!out) fail(ErrorCode::IoError, "error writing U_K table: " + path);
}

UkTable load_uk_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open U_K table: " + path);
  std::string line;
  bool header = false;
  int discarded = 0;
  bool have_meta = false;
  UkSimConfig meta;
  meta.k_max = 0;
  std::set<long> levels;
  std::map<std::pair<int, long>, double> quantiles;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!header) {
      std::string magic;
      int version = 0;
      if (!(ls >> magic >> version) || magic != kMagic || version != kFormatVersion)
        fail(ErrorCode::ParseError, path + ": not a version " + std::to_string(kFormatVersion) + " U_K table");
      header = true;
      continue;
    }
    if (line.rfind("discarded", 0) == 0) {
      std::string word;
      if (!(ls >> word >> discarded)) fail(ErrorCode::ParseError, path + ": line " + std::to_string(line_no) + ": bad discard count");
      continue;
    }
    int k = 0, T = 0, R = 0;
    double level = 0.0, q = 0.0;
    unsigned long long seed = 0;
    if (!(ls >> k >> level >> q >> T >> R >> seed) || k < 1 || !(level > 0.0 && level < 1.0) || !std::isfinite(q))
      fail(ErrorCode::ParseError, path + ": line " + std::to_string(line_no) + ": malformed row");
    if (!have_meta) {
      meta.grid_steps = T;
      meta.replications = R;
      meta.seed = seed;
      have_meta = true;
    } else if (T != meta.grid_steps || R != meta.replications || seed != meta.seed) {
      fail(ErrorCode::ParseError, path + ": line " + std::to_string(line_no) + ": rows disagree on T, R or seed");
    }
    meta.k_max = std::max(meta.k_max, k);
    levels.insert(UkTable::level_key(level));
    quantiles[{k, UkTable::level_key(level)}] = q;
  }
  if (!header || !have_meta) fail(ErrorCode::ParseError, path + ": empty U_K table");
  meta.levels.clear();
  for (long l : levels) meta.levels.push_back(static_cast<double>(l) / 1e6);
  for (int k = 1; k <= meta.k_max; ++k)
    for (long l : levels)
      if (!quantiles.count({k, l})) fail(ErrorCode::ParseError, path + ": missing row for K = " + std::to_string(k));
  return UkTable(meta, std::move(quantiles), discarded);
}

UkTable load_or_simulate_uk_table(const std::string& path, const UkSimConfig& config) {
  UkSimConfig wanted = config;
  if (!path.empty()) {
    std::ifstream probe(path);
    if (probe) {
      probe.close();
      try {
        UkTable cached = load_uk_table(path);
        if (cached.meta().same_simulation(config)) {
          bool complete = true;
          for (double l : config.levels) complete = complete && cached.has(1, l);
          if (complete) return cached;
          for (double l : cached.meta().levels)
            if (std::none_of(wanted.levels.begin(), wanted.levels.end(),
                             [&](double x) { return UkTable::level_key(x) == UkTable::level_key(l); }))
              wanted.levels.push_back(l);
        }
      } catch (const Error& err) {
        if (err.code() != ErrorCode::ParseError) throw;
      }
    }
  }
  std::sort(wanted.levels.begin(), wanted.levels.end());
  UkTable table = simulate_uk_table(wanted);
  if (!path.empty()) save_uk_table(table, path);
  return table;
}

double uk_quantile(int K, double level, UkTable& table) {
  if (K < 1 || K > table.meta().k_max)
    fail(ErrorCode::NotApplicable, "U_K is tabulated for K = 1.." + std::to_string(table.meta().k_max) +
                                       ", requested K = " + std::to_string(K));
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidInput, "level must lie in (0,1)");
  if (!table.has(K, level)) {
    UkSimConfig cfg = table.meta();
    cfg.levels.push_back(level);
    std::sort(cfg.levels.begin(), cfg.levels.end());
    table = simulate_uk_table(cfg);
  }
  return table.quantile(K, level);
}

}  // namespace wsarma
