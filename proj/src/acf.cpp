#include "acf.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "error.hpp"

namespace wsarma {

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::LB_S: return "LB_S";
    case Method::BP_S: return "BP_S";
    case Method::LB_W: return "LB_W";
    case Method::BP_W: return "BP_W";
    case Method::LB_SN: return "LB_SN";
    case Method::BP_SN: return "BP_SN";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string key;
  for (char c : name) key += static_cast<char>(c == '-' ? '_' : std::toupper(static_cast<unsigned char>(c)));
  for (Method m : kAllMethods)
    if (key == method_name(m)) return m;
  fail(ErrorCode::InvalidInput, "unknown test method '" + name + "'");
}

PortmanteauKind method_kind(Method m) noexcept {
  switch (m) {
    case Method::BP_S:
    case Method::BP_W:
    case Method::BP_SN: return PortmanteauKind::BoxPierce;
    default: return PortmanteauKind::LjungBox;
  }
}

AcfSet acf(std::span<const double> e, int m) {
  const int n = static_cast<int>(e.size());
  if (m < 1 || m >= n) fail(ErrorCode::InvalidInput, "acf requires 0 < m < n");
  AcfSet out;
  out.m = m;
  out.n = n;
  double g0 = 0.0;
  for (double v : e) g0 += v * v;
  out.gamma0 = g0 / n;
  if (!(out.gamma0 > 0.0)) fail(ErrorCode::DegenerateSeries, "residuals are identically zero");
  out.gamma.resize(static_cast<std::size_t>(m));
  out.rho.resize(static_cast<std::size_t>(m));
  for (int h = 1; h <= m; ++h) {
    double acc = 0.0;
    for (int t = h; t < n; ++t) acc += e[t] * e[t - h];
    out.gamma[h - 1] = acc / n;
    out.rho[h - 1] = out.gamma[h - 1] / out.gamma0;
  }
  return out;
}

double portmanteau_statistic(const AcfSet& a, PortmanteauKind kind) {
  const double n = a.n;
  double q = 0.0;
  for (int h = 1; h <= a.m; ++h) {
    const double r2 = a.rho[h - 1] * a.rho[h - 1];
    q += kind == PortmanteauKind::BoxPierce ? r2 : r2 / (n - h);
  }
  return kind == PortmanteauKind::BoxPierce ? n * q : n * (n + 2.0) * q;
}

double chi_square_tail(double x, double dof) {
  if (!(dof > 0.0)) fail(ErrorCode::InvalidInput, "chi-square degrees of freedom must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

TestReport standard_test(const AcfSet& a, int k0, PortmanteauKind kind, double alpha) {
  if (a.m <= k0)
    fail(ErrorCode::NotApplicable, "standard test not applicable for m = " + std::to_string(a.m) +
                                       " <= k0 = " + std::to_string(k0));
  const int dof = a.m - k0;
  TestReport r;
  r.method = kind == PortmanteauKind::BoxPierce ? Method::BP_S : Method::LB_S;
  r.m = a.m;
  r.alpha = alpha;
  r.statistic = portmanteau_statistic(a, kind);
  r.reference_law = "chi-square(" + std::to_string(dof) + ")";
  r.critical_value = 2.0 * boost::math::gamma_q_inv(dof / 2.0, alpha);
  r.p_value = chi_square_tail(r.statistic, dof);
  r.reject = r.statistic > r.critical_value;
  return r;
}

}  // namespace wsarma
