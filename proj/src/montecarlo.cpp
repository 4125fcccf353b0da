#include "montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <boost/math/distributions/binomial.hpp>

#include "acf.hpp"
#include "error.hpp"
#include "noise.hpp"
#include "sarma.hpp"
#include "selfnorm.hpp"
#include "weak_tests.hpp"

namespace wsarma {

namespace {

constexpr std::uint8_t kNotApplicable = 2;

struct Design {
  SarmaSpec truth;
  SarmaOrder fitted;
};

Design design_for(const ExperimentConfig& c) {
  Design d;
  if (c.dgp == Dgp::Size) {
    d.truth = SarmaSpec({0, 1, 0, 1, c.s}, {-0.6, -0.7});
  } else {
    d.truth = SarmaSpec({1, 1, 0, 1, c.s}, {0.8, -0.6, -0.7});
  }
  d.fitted = {0, 1, 0, 1, c.s};
  return d;
}

void validate(const ExperimentConfig& c) {
  if (c.s < 1) fail(ErrorCode::InvalidInput, "season must be >= 1");
  if (c.replications < 1) fail(ErrorCode::InvalidInput, "need at least one replication");
  if (c.m_list.empty()) fail(ErrorCode::InvalidInput, "m list is empty");
  if (c.methods.empty()) fail(ErrorCode::InvalidInput, "method list is empty");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  if (!(c.alpha1 >= 0.0)) fail(ErrorCode::InvalidInput, "alpha1 must be >= 0");
  if (!(c.max_failure_fraction >= 0.0 && c.max_failure_fraction <= 1.0))
    fail(ErrorCode::InvalidInput, "max_failure_fraction must lie in [0,1]");
  for (int m : c.m_list)
    if (m < 1 || m >= c.n) fail(ErrorCode::InvalidInput, "every m must satisfy 1 <= m < n");
}

bool wants(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

// Rejection decision per (m, method) for one replication, laid out m-major.
void one_replication(const ExperimentConfig& c, const Design& d, const UkTable& table, std::uint64_t index,
                     std::uint8_t* out) {
  const std::uint64_t seed = stream_for_replication(c.master_seed, index);
  const int length = std::max(c.n, c.path_length);
  const std::size_t burnin = default_burnin(d.truth.order);
  NoiseConfig nc;
  nc.kind = c.alpha1 > 0.0 ? NoiseKind::Arch1 : NoiseKind::StrongGaussian;
  nc.alpha1 = c.alpha1;
  nc.seed = seed;
  const std::vector<double> noise = generate_noise(nc, static_cast<std::size_t>(length) + burnin);
  std::vector<double> x = simulate(d.truth, noise, burnin);
  x.resize(static_cast<std::size_t>(c.n));

  const FitResult f = fit(x, d.fitted, c.fit);
  const bool need_w = wants(c.methods, Method::LB_W) || wants(c.methods, Method::BP_W);
  const bool need_sn = wants(c.methods, Method::LB_SN) || wants(c.methods, Method::BP_SN);
  const std::size_t nm = c.methods.size();
  for (std::size_t mi = 0; mi < c.m_list.size(); ++mi) {
    const int m = c.m_list[mi];
    const AcfSet a = acf(f.residuals, m);
    WeakAnalysis weak;
    if (need_w) weak = analyze_weak(f, m, c.fit.lrv_r_max);
    SnStatistics sn;
    if (need_sn) {
      const SnNormalizer norm = need_w ? sn_normalizer(weak.w, weak.phi) : sn_normalizer(f, m);
      sn = sn_statistics(a, f.sigma2, norm);
    }
    for (std::size_t j = 0; j < nm; ++j) {
      const Method method = c.methods[j];
      const PortmanteauKind kind = method_kind(method);
      std::uint8_t& cell = out[mi * nm + j];
      switch (method) {
        case Method::LB_S:
        case Method::BP_S:
          if (m <= f.k()) {
            cell = kNotApplicable;
          } else {
            cell = standard_test(a, f.k(), kind, c.alpha).reject ? 1 : 0;
          }
          break;
        case Method::LB_W:
        case Method::BP_W:
          cell = modified_test(weak, kind, c.alpha, false).reject ? 1 : 0;
          break;
        case Method::LB_SN:
        case Method::BP_SN: {
          const double stat = kind == PortmanteauKind::LjungBox ? sn.q_sn_lb : sn.q_sn;
          cell = stat > table.quantile(m, 1.0 - c.alpha) ? 1 : 0;
          break;
        }
      }
    }
  }
}

ExperimentResult run(const ExperimentConfig& c, UkTable& table) {
  validate(c);
  const Design d = design_for(c);
  if (wants(c.methods, Method::LB_SN) || wants(c.methods, Method::BP_SN))
    for (int m : c.m_list) uk_quantile(m, 1.0 - c.alpha, table);

  const int N = c.replications;
  const std::size_t cells = c.m_list.size() * c.methods.size();
  std::vector<std::uint8_t> decisions(static_cast<std::size_t>(N) * cells, 0);
  std::vector<std::uint8_t> failed(static_cast<std::size_t>(N), 0);

  unsigned workers = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(N));
  std::atomic<int> next{0};
  const UkTable& frozen = table;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= N) return;
      try {
        one_replication(c, d, frozen, static_cast<std::uint64_t>(r), &decisions[static_cast<std::size_t>(r) * cells]);
      } catch (const Error&) {
        failed[static_cast<std::size_t>(r)] = 1;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  ExperimentResult out;
  out.replications = N;
  for (std::uint8_t f : failed) out.failures += f;
  if (out.failures > c.max_failure_fraction * N || out.failures == N) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g%%", 100.0 * c.max_failure_fraction);
    fail(ErrorCode::ExperimentIntegrity, std::to_string(out.failures) + " of " + std::to_string(N) +
                                             " replications failed (ceiling " + buf + ")");
  }
  const int retained = N - out.failures;
  const std::size_t nm = c.methods.size();
  for (std::size_t mi = 0; mi < c.m_list.size(); ++mi) {
    for (std::size_t j = 0; j < nm; ++j) {
      TableRow row;
      row.s = c.s;
      row.n = c.n;
      row.m = c.m_list[mi];
      row.method = c.methods[j];
      int rejections = 0;
      for (int r = 0; r < N; ++r) {
        if (failed[static_cast<std::size_t>(r)]) continue;
        const std::uint8_t v = decisions[static_cast<std::size_t>(r) * cells + mi * nm + j];
        if (v == kNotApplicable) row.applicable = false;
        rejections += v == 1;
      }
      if (!row.applicable) {
        row.freq = std::nan("");
        row.flag = BandFlag::None;
      } else {
        row.freq = 100.0 * rejections / retained;
        row.flag = c.dgp == Dgp::Size ? flag_band(row.freq, retained, c.alpha) : BandFlag::None;
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

// Smallest k with P(X <= k) >= p.
int binomial_quantile(int N, double alpha, double p) {
  const boost::math::binomial_distribution<double> law(N, alpha);
  for (int k = 0; k <= N; ++k)
    if (boost::math::cdf(law, k) >= p) return k;
  return N;
}

}  // namespace

const char* dgp_name(Dgp d) noexcept { return d == Dgp::Size ? "size" : "power"; }

Dgp parse_dgp(const std::string& name) {
  if (name == "size") return Dgp::Size;
  if (name == "power") return Dgp::Power;
  fail(ErrorCode::InvalidInput, "unknown design '" + name + "' (expected size or power)");
}

const char* band_flag_name(BandFlag f) noexcept {
  switch (f) {
    case BandFlag::Inside: return "inside";
    case BandFlag::Outside95: return "outside-95";
    case BandFlag::Outside99: return "outside-99";
    case BandFlag::None: return "-";
  }
  return "?";
}

std::pair<double, double> binomial_band(int N, double alpha, double confidence) {
  if (N < 1) fail(ErrorCode::InvalidInput, "N must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  if (!(confidence > 0.0 && confidence < 1.0)) fail(ErrorCode::InvalidInput, "confidence must lie in (0,1)");
  const double a = (1.0 - confidence) / 2.0;
  const double lower = 100.0 * (binomial_quantile(N, alpha, a) - 1) / N;
  const double upper = 100.0 * binomial_quantile(N, alpha, 1.0 - a) / N;
  return {std::max(0.0, lower), upper};
}

BandFlag flag_band(double freq_percent, int N, double alpha) {
  constexpr double kSlack = 1e-9;
  const auto outside = [&](std::pair<double, double> band) {
    return freq_percent < band.first - kSlack || freq_percent > band.second + kSlack;
  };
  if (outside(binomial_band(N, alpha, 0.99))) return BandFlag::Outside99;
  if (outside(binomial_band(N, alpha, 0.95))) return BandFlag::Outside95;
  return BandFlag::Inside;
}

ExperimentResult run_size(const ExperimentConfig& config, UkTable& table) {
  if (config.dgp != Dgp::Size) fail(ErrorCode::InvalidInput, "run_size needs the size design");
  return run(config, table);
}

ExperimentResult run_power(const ExperimentConfig& config, UkTable& table) {
  if (config.dgp != Dgp::Power) fail(ErrorCode::InvalidInput, "run_power needs the power design");
  return run(config, table);
}

ExperimentResult run_experiment(const ExperimentConfig& config, UkTable& table) { return run(config, table); }

void write_csv(const ExperimentResult& result, std::ostream& out, bool header) {
  if (header) out << "s,n,m,method,freq,flag\n";
  char freq[32];
  for (const auto& row : result.rows) {
    if (row.applicable)
      std::snprintf(freq, sizeof freq, "%.1f", row.freq);
    else
      std::snprintf(freq, sizeof freq, "n.a.");
    out << row.s << ',' << row.n << ',' << row.m << ',' << method_name(row.method) << ',' << freq << ','
        << (row.applicable ? band_flag_name(row.flag) : "n.a.") << '\n';
  }
}

}  // namespace wsarma
