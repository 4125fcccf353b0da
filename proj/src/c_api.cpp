#include "wsarma/wsarma.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diagnose.hpp"
#include "error.hpp"
#include "montecarlo.hpp"
#include "noise.hpp"
#include "qmle.hpp"
#include "quadform.hpp"
#include "sarma.hpp"
#include "silso.hpp"
#include "uk_table.hpp"

struct wsarma_series {
  std::vector<double> values;
  std::optional<wsarma::YearMonth> first;
};

struct wsarma_fit {
  wsarma::FitResult result;
};

struct wsarma_uk_table {
  wsarma::UkTable table;
};

struct wsarma_report {
  wsarma::DiagnosticReport report;
};

namespace {

thread_local std::string g_last_error;

template <class F>
wsarma_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return WSARMA_OK;
  } catch (const wsarma::Error& e) {
    g_last_error = e.what();
    return static_cast<wsarma_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return WSARMA_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) wsarma::fail(wsarma::ErrorCode::InvalidInput, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

wsarma::SarmaOrder to_order(wsarma_order o) { return {o.p, o.q, o.P, o.Q, o.s}; }

wsarma::FitOptions to_fit_options(const wsarma_fit_options* o) {
  wsarma::FitOptions out;
  if (!o) return out;
  if (o->free_mask) {
    out.free_mask.reserve(o->mask_len);
    for (std::size_t i = 0; i < o->mask_len; ++i) out.free_mask.push_back(o->free_mask[i] != 0);
  }
  out.random_starts = o->random_starts;
  out.start_scale = o->start_scale;
  out.seed = o->seed;
  out.max_iterations = o->max_iterations;
  out.gradient_tolerance = o->gradient_tolerance;
  out.lrv_r_max = o->lrv_r_max;
  return out;
}

std::vector<wsarma::Method> parse_methods(const char* text) {
  std::vector<wsarma::Method> out;
  if (!text) return {std::begin(wsarma::kAllMethods), std::end(wsarma::kAllMethods)};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(wsarma::parse_method(item));
  if (out.empty()) wsarma::fail(wsarma::ErrorCode::InvalidInput, "method list is empty");
  return out;
}

std::vector<int> to_m_list(const int* m, std::size_t count) {
  if (!m || count == 0) wsarma::fail(wsarma::ErrorCode::InvalidInput, "m list is empty");
  return {m, m + count};
}

wsarma::UkSimConfig to_uk_config(const wsarma_uk_config* c) {
  wsarma::UkSimConfig out;
  if (!c) return out;
  out.grid_steps = c->grid_steps;
  out.replications = c->replications;
  out.seed = c->seed;
  out.k_max = c->k_max;
  out.threads = c->threads;
  return out;
}

}  // namespace

extern "C" {

const char* wsarma_version(void) { return wsarma::kVersion; }

const char* wsarma_last_error(void) { return g_last_error.c_str(); }

const char* wsarma_status_name(wsarma_status status) {
  if (status == WSARMA_OK) return "ok";
  if (status == WSARMA_E_INTERNAL) return "internal-error";
  if (status >= WSARMA_E_INVALID_INPUT && status <= WSARMA_E_IO_ERROR)
    return wsarma::error_code_name(static_cast<wsarma::ErrorCode>(static_cast<int>(status)));
  return "unknown";
}

void wsarma_string_free(char* s) { std::free(s); }

wsarma_status wsarma_series_from_array(const double* x, size_t n, wsarma_series** out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) need(x, "x");
    for (size_t i = 0; i < n; ++i)
      if (!std::isfinite(x[i])) wsarma::fail(wsarma::ErrorCode::InvalidInput, "series value " + std::to_string(i) + " is not finite");
    auto s = std::make_unique<wsarma_series>();
    s->values.assign(x, x + n);
    *out = s.release();
  });
}

wsarma_status wsarma_series_load_silso(const char* path, const char* from, const char* to, wsarma_series** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    wsarma::MonthRange range;
    if (from) range.from = wsarma::parse_year_month(from);
    if (to) range.to = wsarma::parse_year_month(to);
    auto monthly = wsarma::ingest_silso_monthly(path, range);
    auto s = std::make_unique<wsarma_series>();
    s->values = std::move(monthly.values);
    s->first = monthly.first;
    *out = s.release();
  });
}

wsarma_status wsarma_series_load_plain(const char* path, wsarma_series** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto s = std::make_unique<wsarma_series>();
    s->values = wsarma::ingest_plain(path);
    *out = s.release();
  });
}

wsarma_status wsarma_series_logdiff_center(const wsarma_series* in, const char* first_month, wsarma_series** out) {
  return guarded([&] {
    need(in, "series");
    need(out, "out");
    std::optional<wsarma::YearMonth> first = in->first;
    if (first_month) first = wsarma::parse_year_month(first_month);
    auto s = std::make_unique<wsarma_series>();
    s->values = first ? wsarma::transform_logdiff_center(in->values, *first)
                      : wsarma::transform_logdiff_center(in->values);
    *out = s.release();
  });
}

size_t wsarma_series_length(const wsarma_series* s) { return s ? s->values.size() : 0; }

const double* wsarma_series_data(const wsarma_series* s) { return s ? s->values.data() : nullptr; }

void wsarma_series_free(wsarma_series* s) { delete s; }

void wsarma_noise_config_default(wsarma_noise_config* cfg) {
  if (!cfg) return;
  const wsarma::NoiseConfig d;
  cfg->alpha1 = d.alpha1;
  cfg->omega = d.omega;
  cfg->seed = d.seed;
  cfg->noise_burnin = d.burnin;
}

wsarma_status wsarma_simulate(wsarma_order order, const double* theta, size_t theta_len,
                              const wsarma_noise_config* noise, size_t n, size_t model_burnin, wsarma_series** out) {
  return guarded([&] {
    need(out, "out");
    if (theta_len > 0) need(theta, "theta");
    const wsarma::SarmaSpec spec(to_order(order), std::vector<double>(theta, theta + theta_len));
    wsarma::NoiseConfig nc;
    if (noise) {
      nc.alpha1 = noise->alpha1;
      nc.omega = noise->omega;
      nc.seed = noise->seed;
      nc.burnin = noise->noise_burnin;
    }
    nc.kind = nc.alpha1 > 0.0 ? wsarma::NoiseKind::Arch1 : wsarma::NoiseKind::StrongGaussian;
    if (n == 0) wsarma::fail(wsarma::ErrorCode::InvalidInput, "n must be >= 1");
    const std::size_t burnin = model_burnin ? model_burnin : wsarma::default_burnin(spec.order);
    const auto eps = wsarma::generate_noise(nc, n + burnin);
    auto s = std::make_unique<wsarma_series>();
    s->values = wsarma::simulate(spec, eps, burnin);
    *out = s.release();
  });
}

void wsarma_fit_options_default(wsarma_fit_options* opts) {
  if (!opts) return;
  const wsarma::FitOptions d;
  opts->free_mask = nullptr;
  opts->mask_len = 0;
  opts->random_starts = d.random_starts;
  opts->start_scale = d.start_scale;
  opts->seed = d.seed;
  opts->max_iterations = d.max_iterations;
  opts->gradient_tolerance = d.gradient_tolerance;
  opts->lrv_r_max = d.lrv_r_max;
}

wsarma_status wsarma_fit_series(const wsarma_series* x, wsarma_order order, const wsarma_fit_options* opts,
                                wsarma_fit** out) {
  return guarded([&] {
    need(x, "series");
    need(out, "out");
    auto f = std::make_unique<wsarma_fit>();
    f->result = wsarma::fit(x->values, to_order(order), to_fit_options(opts));
    *out = f.release();
  });
}

size_t wsarma_fit_theta_len(const wsarma_fit* f) { return f ? f->result.spec.theta.size() : 0; }

size_t wsarma_fit_num_free(const wsarma_fit* f) { return f ? static_cast<size_t>(f->result.k()) : 0; }

wsarma_status wsarma_fit_theta(const wsarma_fit* f, double* theta, size_t len) {
  return guarded([&] {
    need(f, "fit");
    need(theta, "theta");
    const auto& t = f->result.spec.theta;
    if (len < t.size()) wsarma::fail(wsarma::ErrorCode::InvalidInput, "theta buffer is too short");
    std::copy(t.begin(), t.end(), theta);
  });
}

wsarma_status wsarma_fit_se(const wsarma_fit* f, double* se, size_t len) {
  return guarded([&] {
    need(f, "fit");
    need(se, "se");
    const auto& v = f->result.se;
    if (len < static_cast<size_t>(v.size())) wsarma::fail(wsarma::ErrorCode::InvalidInput, "se buffer is too short");
    for (Eigen::Index i = 0; i < v.size(); ++i) se[i] = v(i);
  });
}

double wsarma_fit_sigma2(const wsarma_fit* f) { return f ? f->result.sigma2 : 0.0; }

wsarma_status wsarma_fit_json(const wsarma_fit* f, double level, char** out) {
  return guarded([&] {
    need(f, "fit");
    need(out, "out");
    *out = dup_string(wsarma::fit_to_json(f->result, level));
  });
}

void wsarma_fit_free(wsarma_fit* f) { delete f; }

void wsarma_uk_config_default(wsarma_uk_config* cfg) {
  if (!cfg) return;
  const wsarma::UkSimConfig d;
  cfg->grid_steps = d.grid_steps;
  cfg->replications = d.replications;
  cfg->seed = d.seed;
  cfg->k_max = d.k_max;
  cfg->threads = d.threads;
}

wsarma_status wsarma_uk_table_open(const char* cache_path, const wsarma_uk_config* cfg, wsarma_uk_table** out) {
  return guarded([&] {
    need(out, "out");
    auto t = std::make_unique<wsarma_uk_table>();
    t->table = wsarma::load_or_simulate_uk_table(cache_path ? cache_path : "", to_uk_config(cfg));
    *out = t.release();
  });
}

wsarma_status wsarma_uk_table_save(const wsarma_uk_table* t, const char* path) {
  return guarded([&] {
    need(t, "table");
    need(path, "path");
    wsarma::save_uk_table(t->table, path);
  });
}

wsarma_status wsarma_uk_quantile(wsarma_uk_table* t, int K, double level, double* out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    *out = wsarma::uk_quantile(K, level, t->table);
  });
}

wsarma_status wsarma_uk_table_text(const wsarma_uk_table* t, char** out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    const auto& m = t->table.meta();
    std::ostringstream os;
    os << "# T=" << m.grid_steps << " R=" << m.replications << " seed=" << m.seed
       << " discarded=" << t->table.discarded() << '\n';
    os << "K level quantile\n";
    char buf[96];
    for (const auto& [k, level, q] : t->table.rows()) {
      std::snprintf(buf, sizeof buf, "%d %.2f %.4f\n", k, level, q);
      os << buf;
    }
    *out = dup_string(os.str());
  });
}

void wsarma_uk_table_free(wsarma_uk_table* t) { delete t; }

wsarma_status wsarma_diagnose(const wsarma_series* x, const wsarma_diagnose_options* opts,
                              const wsarma_provenance* prov, wsarma_uk_table* table, wsarma_report** out) {
  return guarded([&] {
    need(x, "series");
    need(opts, "options");
    need(table, "table");
    need(out, "out");
    wsarma::DiagnoseOptions d;
    d.order = to_order(opts->order);
    d.m_list = to_m_list(opts->m_list, opts->m_count);
    d.methods = parse_methods(opts->methods);
    d.alpha = opts->alpha;
    d.fit = to_fit_options(opts->fit);
    d.free_mask = d.fit.free_mask;
    auto r = std::make_unique<wsarma_report>();
    r->report = wsarma::diagnose(x->values, d, table->table);
    auto& p = r->report.provenance;
    p.n_transformed = static_cast<int>(x->values.size());
    p.n_raw = p.n_transformed;
    if (prov) {
      if (prov->input_path) {
        p.input_path = prov->input_path;
        p.input_sha256 = wsarma::sha256_file(prov->input_path);
      }
      if (prov->input_format) p.input_format = prov->input_format;
      if (prov->range) p.range = prov->range;
      if (prov->n_raw > 0) p.n_raw = prov->n_raw;
      p.transformed = prov->transformed != 0;
    }
    *out = r.release();
  });
}

wsarma_status wsarma_report_json(const wsarma_report* r, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(wsarma::report_to_json(r->report));
  });
}

wsarma_status wsarma_report_write_plot(const wsarma_report* r, const char* path) {
  return guarded([&] {
    need(r, "report");
    need(path, "path");
    wsarma::emit_plot_data(r->report, path);
  });
}

void wsarma_report_free(wsarma_report* r) { delete r; }

wsarma_status wsarma_mc_run(const wsarma_mc_config* cfg, wsarma_uk_table* table, char** csv_out, int* failures) {
  return guarded([&] {
    need(cfg, "config");
    need(table, "table");
    need(csv_out, "csv_out");
    wsarma::ExperimentConfig c;
    c.dgp = wsarma::parse_dgp(cfg->design ? cfg->design : "size");
    c.s = cfg->s;
    c.n = cfg->n;
    c.replications = cfg->replications;
    c.alpha1 = cfg->alpha1;
    c.m_list = to_m_list(cfg->m_list, cfg->m_count);
    c.methods = parse_methods(cfg->methods);
    c.alpha = cfg->alpha;
    c.master_seed = cfg->master_seed;
    c.path_length = cfg->path_length;
    c.threads = cfg->threads;
    if (cfg->max_failure_fraction > 0.0) c.max_failure_fraction = cfg->max_failure_fraction;
    const auto result = wsarma::run_experiment(c, table->table);
    std::ostringstream os;
    wsarma::write_csv(result, os);
    *csv_out = dup_string(os.str());
    if (failures) *failures = result.failures;
  });
}

wsarma_status wsarma_quadform_tail(const double* xi, size_t k, double x, double* out) {
  return guarded([&] {
    need(out, "out");
    if (k > 0) need(xi, "xi");
    wsarma::MixtureLaw law{std::vector<double>(xi, xi + k)};
    *out = wsarma::quadform_tail(law, x);
  });
}

}  // extern "C"
