#include "diagnose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "acf.hpp"
#include "error.hpp"
#include "selfnorm.hpp"
#include "weak_tests.hpp"

namespace wsarma {

namespace {

using nlohmann::ordered_json;

std::string coefficient_name(const SarmaOrder& o, int index) {
  if (index < o.p) return "a" + std::to_string(index + 1);
  index -= o.p;
  if (index < o.q) return "b" + std::to_string(index + 1);
  index -= o.q;
  if (index < o.P) return "A" + std::to_string(index + 1);
  return "B" + std::to_string(index - o.P + 1);
}

std::string describe(const Error& e) { return std::string(error_code_name(e.code())) + ": " + e.what(); }

ordered_json order_json(const SarmaOrder& o) {
  return {{"p", o.p}, {"q", o.q}, {"P", o.P}, {"Q", o.Q}, {"s", o.s}};
}

ordered_json fit_json(const FitResult& f, double level) {
  ordered_json coefs = ordered_json::array();
  for (const auto& c : coefficient_inference(f, level)) {
    coefs.push_back({{"name", coefficient_name(f.spec.order, c.index)},
                     {"estimate", c.estimate},
                     {"se", c.se},
                     {"z", c.z},
                     {"p_value", c.p_value},
                     {"ci_low", c.ci_low},
                     {"ci_high", c.ci_high}});
  }
  return {{"order", order_json(f.spec.order)},
          {"theta", f.spec.theta},
          {"sigma2", f.sigma2},
          {"n", f.n},
          {"iterations", f.iterations},
          {"converged", f.converged},
          {"lrv_var_order", f.lrv_order},
          {"ci_level", level},
          {"coefficients", coefs}};
}

}  // namespace

DiagnosticReport diagnose(std::span<const double> x, const DiagnoseOptions& options, UkTable& table) {
  if (options.m_list.empty()) fail(ErrorCode::InvalidInput, "m list is empty");
  if (options.methods.empty()) fail(ErrorCode::InvalidInput, "method list is empty");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in (0,1)");
  for (int m : options.m_list)
    if (m < 1 || m >= static_cast<int>(x.size())) fail(ErrorCode::InvalidInput, "every m must satisfy 1 <= m < n");

  DiagnosticReport report;
  report.options = options;
  FitOptions fo = options.fit;
  fo.free_mask = options.free_mask;
  report.fit = fit(x, options.order, fo);
  report.options.fit = fo;
  report.coefficients = coefficient_inference(report.fit, 1.0 - options.alpha);
  const FitResult& f = report.fit;
  const bool sn_possible = f.k() >= 1;

  for (int m : options.m_list) {
    const AcfSet a = acf(f.residuals, m);
    std::optional<WeakAnalysis> weak;
    std::string weak_error;
    try {
      weak = analyze_weak(f, m, fo.lrv_r_max);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) throw;
      weak_error = describe(e);
    }
    std::optional<SnNormalizer> norm;
    std::string sn_error = "self-normalized tests need an estimated coefficient";
    if (sn_possible) {
      try {
        norm = weak ? sn_normalizer(weak->w, weak->phi) : sn_normalizer(f, m);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidInput) throw;
        sn_error = describe(e);
      }
    }
    for (Method method : options.methods) {
      const PortmanteauKind kind = method_kind(method);
      switch (method) {
        case Method::LB_S:
        case Method::BP_S:
          if (m <= f.k()) {
            report.skipped.push_back({method, m, "m must exceed the number of estimated coefficients"});
          } else {
            report.tests.push_back(standard_test(a, f.k(), kind, options.alpha));
          }
          break;
        case Method::LB_W:
        case Method::BP_W:
          if (weak)
            report.tests.push_back(modified_test(*weak, kind, options.alpha, true));
          else
            report.skipped.push_back({method, m, weak_error});
          break;
        case Method::LB_SN:
        case Method::BP_SN:
          if (!norm) {
            report.skipped.push_back({method, m, sn_error});
          } else if (m > table.meta().k_max) {
            report.skipped.push_back({method, m, "U_K is tabulated only up to K = " + std::to_string(table.meta().k_max)});
          } else {
            report.tests.push_back(sn_test(a, f.sigma2, *norm, kind, options.alpha, table));
          }
          break;
      }
    }
  }

  const int m_max = *std::max_element(options.m_list.begin(), options.m_list.end());
  const AcfSet a = acf(f.residuals, m_max);
  std::vector<double> wb(static_cast<std::size_t>(m_max), std::nan(""));
  std::vector<double> sb(static_cast<std::size_t>(m_max), std::nan(""));
  for (int m = m_max; m >= 1 && report.band_m_weak == 0; --m) {
    try {
      const auto bands = acf_bands_weak(analyze_weak(f, m, fo.lrv_r_max), options.alpha);
      std::copy(bands.begin(), bands.end(), wb.begin());
      report.band_m_weak = m;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) throw;
    }
  }
  if (sn_possible) {
    const double u1 = uk_quantile(1, 1.0 - options.alpha, table);
    for (int m = m_max; m >= 1 && report.band_m_sn == 0; --m) {
      try {
        const auto bands = sn_bands(sn_normalizer(f, m), f.sigma2, f.n, u1);
        std::copy(bands.begin(), bands.end(), sb.begin());
        report.band_m_sn = m;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidInput) throw;
      }
    }
  }
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - options.alpha / 2.0);
  for (int h = 1; h <= m_max; ++h) {
    const auto i = static_cast<std::size_t>(h - 1);
    report.lags.push_back({h, a.rho[i], z / std::sqrt(static_cast<double>(f.n)), wb[i], sb[i]});
  }
  report.uk_meta = table.meta();
  report.uk_discarded = table.discarded();
  return report;
}

std::string fit_to_json(const FitResult& fit, double level) { return fit_json(fit, level).dump(2) + "\n"; }

std::string report_to_json(const DiagnosticReport& r) {
  ordered_json tests = ordered_json::array();
  for (const auto& t : r.tests) {
    ordered_json j = {{"method", method_name(t.method)},
                      {"m", t.m},
                      {"statistic", t.statistic},
                      {"reference_law", t.reference_law},
                      {"critical_value", t.critical_value}};
    if (std::isfinite(t.p_value)) j["p_value"] = t.p_value;
    j["alpha"] = t.alpha;
    j["reject"] = t.reject;
    tests.push_back(std::move(j));
  }
  ordered_json skipped = ordered_json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"method", method_name(s.method)}, {"m", s.m}, {"reason", s.reason}});
  ordered_json lags = ordered_json::array();
  for (const auto& l : r.lags) {
    ordered_json j = {{"lag", l.lag}, {"rho", l.rho}, {"band_strong", l.band_strong}};
    if (std::isfinite(l.band_weak)) j["band_weak"] = l.band_weak;
    if (std::isfinite(l.band_sn)) j["band_sn"] = l.band_sn;
    lags.push_back(std::move(j));
  }
  ordered_json methods = ordered_json::array();
  for (Method m : r.options.methods) methods.push_back(method_name(m));
  ordered_json mask = ordered_json::array();
  for (bool b : r.options.free_mask) mask.push_back(b);
  const auto& fo = r.options.fit;
  const auto& p = r.provenance;
  ordered_json out = {
      {"version", kVersion},
      {"fit", fit_json(r.fit, 1.0 - r.options.alpha)},
      {"tests", tests},
      {"skipped", skipped},
      {"lags", lags},
      {"band_m", {{"weak", r.band_m_weak}, {"sn", r.band_m_sn}}},
      {"provenance",
       {{"input", {{"path", p.input_path},
                   {"sha256", p.input_sha256},
                   {"format", p.input_format},
                   {"range", p.range},
                   {"n_raw", p.n_raw},
                   {"n_transformed", p.n_transformed},
                   {"log_difference_centered", p.transformed}}},
        {"config", {{"order", order_json(r.options.order)},
                    {"free_mask", mask},
                    {"m", r.options.m_list},
                    {"methods", methods},
                    {"alpha", r.options.alpha},
                    {"random_starts", fo.random_starts},
                    {"start_scale", fo.start_scale},
                    {"max_iterations", fo.max_iterations},
                    {"gradient_tolerance", fo.gradient_tolerance},
                    {"lrv_r_max", fo.lrv_r_max}}},
        {"seeds", {{"fit", fo.seed}, {"uk_table", r.uk_meta.seed}}},
        {"uk_table", {{"grid_steps", r.uk_meta.grid_steps},
                      {"replications", r.uk_meta.replications},
                      {"seed", r.uk_meta.seed},
                      {"k_max", r.uk_meta.k_max},
                      {"discarded", r.uk_discarded}}}}}};
  return out.dump(2) + "\n";
}

void emit_plot_data(const DiagnosticReport& report, const std::string& path) {
  std::string text = "lag,rho,band_strong,band_weak_lo,band_weak_hi,band_sn_lo,band_sn_hi\n";
  char buf[256];
  for (const auto& l : report.lags) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", l.lag, l.rho, l.band_strong,
                  -l.band_weak, l.band_weak, -l.band_sn, l.band_sn);
    text += buf;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write plot data: " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "error writing plot data: " + path);
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::IoError, "SHA-256 failed for " + path);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace wsarma
