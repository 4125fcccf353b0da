#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsarma/wsarma.h"

namespace {

enum Exit { kOk = 0, kParse = 2, kNumeric = 3, kNotApplicable = 4 };

int exit_code(wsarma_status s) {
  switch (s) {
    case WSARMA_OK: return kOk;
    case WSARMA_E_NOT_APPLICABLE: return kNotApplicable;
    case WSARMA_E_INVALID_INPUT:
    case WSARMA_E_NON_STATIONARY_SPEC:
    case WSARMA_E_PARSE_ERROR:
    case WSARMA_E_MISSING_DATA:
    case WSARMA_E_DOMAIN_ERROR:
    case WSARMA_E_IO_ERROR: return kParse;
    default: return kNumeric;
  }
}

struct Failure {
  int code;
};

void check(wsarma_status s) {
  if (s == WSARMA_OK) return;
  std::cerr << "wsarma: " << wsarma_status_name(s) << ": " << wsarma_last_error() << '\n';
  throw Failure{exit_code(s)};
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "wsarma: " << msg << '\n';
  throw Failure{kParse};
}

template <class T, void (*Free)(T*)>
struct Owned {
  T* p = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Series = Owned<wsarma_series, wsarma_series_free>;
using Fit = Owned<wsarma_fit, wsarma_fit_free>;
using Table = Owned<wsarma_uk_table, wsarma_uk_table_free>;
using Report = Owned<wsarma_report, wsarma_report_free>;

struct CString {
  char* p = nullptr;
  ~CString() { wsarma_string_free(p); }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error(std::string("bad integer in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

wsarma_order parse_order(const std::string& text, int season) {
  const auto v = parse_ints(text, "--order");
  if (v.size() != 4) usage_error("--order expects p,q,P,Q");
  return {v[0], v[1], v[2], v[3], season};
}

// "a1,a2" -> mask with those coefficients pinned at zero.
std::vector<int> mask_from_fixed(const std::string& fixed, const wsarma_order& o) {
  std::vector<int> mask(static_cast<std::size_t>(o.p + o.q + o.P + o.Q), 1);
  for (const auto& name : split(fixed, ',')) {
    if (name.size() < 2) usage_error("bad coefficient name '" + name + "'");
    const char family = name[0];
    int idx = 0;
    try {
      idx = std::stoi(name.substr(1));
    } catch (const std::exception&) {
      usage_error("bad coefficient name '" + name + "'");
    }
    int offset = 0, count = 0;
    switch (family) {
      case 'a': offset = 0; count = o.p; break;
      case 'b': offset = o.p; count = o.q; break;
      case 'A': offset = o.p + o.q; count = o.P; break;
      case 'B': offset = o.p + o.q + o.P; count = o.Q; break;
      default: usage_error("coefficient names start with a, b, A or B: '" + name + "'");
    }
    if (idx < 1 || idx > count) usage_error("coefficient '" + name + "' is not in the model");
    mask[static_cast<std::size_t>(offset + idx - 1)] = 0;
  }
  return mask;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) usage_error("cannot write " + path);
  out << text;
}

std::string default_uk_cache() {
  if (const char* env = std::getenv("WSARMA_UK_TABLE")) return env;
  std::filesystem::path base;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"))
    base = xdg;
  else if (const char* home = std::getenv("HOME"))
    base = std::filesystem::path(home) / ".cache";
  else
    return "wsarma_uk_table.txt";
  std::error_code ec;
  std::filesystem::create_directories(base / "wsarma", ec);
  return (base / "wsarma" / "uk_table.txt").string();
}

struct UkFlags {
  std::string cache;
  int steps = 0;
  int reps = 0;
  unsigned long long seed = 0;
  unsigned threads = 0;

  void add(CLI::App* app, bool cache_flag = true) {
    if (cache_flag) app->add_option("--uk-table", cache, "U_K quantile cache file");
    app->add_option("--uk-steps", steps, "Brownian grid steps for U_K simulation");
    app->add_option("--uk-reps", reps, "replications for U_K simulation");
    app->add_option("--uk-seed", seed, "seed for U_K simulation");
  }

  wsarma_uk_config config() const {
    wsarma_uk_config c;
    wsarma_uk_config_default(&c);
    if (steps > 0) c.grid_steps = steps;
    if (reps > 0) c.replications = reps;
    if (seed > 0) c.seed = seed;
    c.threads = threads;
    return c;
  }

  void open(Table& t) const {
    const wsarma_uk_config c = config();
    const std::string path = cache.empty() ? default_uk_cache() : cache;
    check(wsarma_uk_table_open(path.c_str(), &c, t.out()));
  }
};

struct InputFlags {
  std::string path;
  std::string format = "silso";
  std::string range = "2010-01:2018-12";
  bool raw = false;

  void add(CLI::App* app) {
    app->add_option("input", path, "input series file")->required();
    app->add_option("--format", format, "silso or plain")->check(CLI::IsMember({"silso", "plain"}));
    app->add_option("--range", range, "month range FROM:TO for SILSO input");
    app->add_flag("--raw", raw, "skip the log-difference and centering step");
  }

  // Returns the series to model and the raw count.
  int load(Series& out) const {
    Series raw_series;
    if (format == "silso") {
      const auto parts = split(range, ':');
      if (parts.size() != 2) usage_error("--range expects YYYY-MM:YYYY-MM");
      check(wsarma_series_load_silso(path.c_str(), parts[0].c_str(), parts[1].c_str(), raw_series.out()));
    } else {
      check(wsarma_series_load_plain(path.c_str(), raw_series.out()));
    }
    const int n_raw = static_cast<int>(wsarma_series_length(raw_series.get()));
    if (raw) {
      check(wsarma_series_from_array(wsarma_series_data(raw_series.get()), wsarma_series_length(raw_series.get()),
                                     out.out()));
    } else {
      check(wsarma_series_logdiff_center(raw_series.get(), nullptr, out.out()));
    }
    return n_raw;
  }
};

struct ModelFlags {
  std::string order = "0,0,0,0";
  int season = 1;
  std::string fix;
  unsigned long long seed = 0;
  int starts = -1;

  void add(CLI::App* app) {
    app->add_option("--order", order, "p,q,P,Q")->required();
    app->add_option("--season", season, "seasonal period s");
    app->add_option("--fix", fix, "coefficients pinned at zero, e.g. a1,a2");
    app->add_option("--seed", seed, "seed for the optimizer's random starts");
    app->add_option("--starts", starts, "number of random optimizer starts");
  }
};

struct FitSetup {
  wsarma_order order;
  std::vector<int> mask;
  wsarma_fit_options opts;
};

FitSetup fit_setup(const ModelFlags& m) {
  FitSetup f;
  f.order = parse_order(m.order, m.season);
  wsarma_fit_options_default(&f.opts);
  if (!m.fix.empty()) {
    f.mask = mask_from_fixed(m.fix, f.order);
    f.opts.free_mask = f.mask.data();
    f.opts.mask_len = f.mask.size();
  }
  if (m.seed > 0) f.opts.seed = m.seed;
  if (m.starts >= 0) f.opts.random_starts = m.starts;
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Portmanteau diagnostics for weak seasonal ARMA models"};
  app.set_version_flag("--version", std::string(wsarma_version()));
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a SARMA path");
  std::string sim_order = "0,1,0,1", sim_theta, sim_out;
  int sim_season = 12, sim_n = 500;
  double sim_alpha1 = 0.0;
  unsigned long long sim_seed = 1;
  sim->add_option("--order", sim_order, "p,q,P,Q");
  sim->add_option("--season", sim_season, "seasonal period s");
  sim->add_option("--theta", sim_theta, "coefficients a..., b..., A..., B...")->required();
  sim->add_option("--n", sim_n, "length");
  sim->add_option("--alpha1", sim_alpha1, "ARCH(1) coefficient (0 = iid Gaussian noise)");
  sim->add_option("--seed", sim_seed, "noise seed");
  sim->add_option("--out", sim_out, "output file (default stdout)");

  // fit
  auto* fitc = app.add_subcommand("fit", "fit a SARMA model by QMLE");
  InputFlags fit_in;
  ModelFlags fit_model;
  std::string fit_out;
  fit_in.add(fitc);
  fit_model.add(fitc);
  fitc->add_option("--out", fit_out, "report file (default stdout)");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "fit and run the portmanteau tests");
  InputFlags diag_in;
  ModelFlags diag_model;
  UkFlags diag_uk;
  std::string diag_m = "4,8,12,15,18,20", diag_methods = "lb-sn,bp-sn,lb-w,bp-w,lb-s,bp-s", diag_out, diag_plot;
  double diag_alpha = 0.05;
  diag_in.add(diag);
  diag_model.add(diag);
  diag_uk.add(diag);
  diag->add_option("--m", diag_m, "lags m, comma-separated");
  diag->add_option("--methods", diag_methods, "tests, comma-separated");
  diag->add_option("--alpha", diag_alpha, "nominal level");
  diag->add_option("--out", diag_out, "report file (default stdout)");
  diag->add_option("--plot", diag_plot, "plot data CSV");

  // mc-size / mc-power
  struct McFlags {
    int season = 4, n = 2000, reps = 1000, path_length = 0;
    double alpha1 = 0.0, alpha = 0.05, max_failures = 0.02;
    std::string m = "4,8,12,15,18,20", methods = "lb-sn,bp-sn,lb-w,bp-w,lb-s,bp-s", out;
    unsigned long long seed = 1;
    unsigned threads = 0;
    UkFlags uk;
  };
  McFlags mc_size, mc_power;
  auto add_mc = [&](CLI::App* c, McFlags& f) {
    c->add_option("--season", f.season, "seasonal period s");
    c->add_option("--n", f.n, "sample size");
    c->add_option("--reps", f.reps, "replications N");
    c->add_option("--alpha1", f.alpha1, "ARCH(1) coefficient");
    c->add_option("--m", f.m, "lags m, comma-separated");
    c->add_option("--methods", f.methods, "tests, comma-separated");
    c->add_option("--alpha", f.alpha, "nominal level");
    c->add_option("--seed", f.seed, "master seed");
    c->add_option("--path-length", f.path_length, "use the first n values of paths this long");
    c->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    c->add_option("--max-failures", f.max_failures, "largest tolerated share of failed fits")
        ->check(CLI::Range(0.0, 1.0));
    c->add_option("--out", f.out, "CSV file (default stdout)");
    f.uk.add(c);
  };
  auto* mcs = app.add_subcommand("mc-size", "empirical size under the MA(1)xSMA(1) null");
  add_mc(mcs, mc_size);
  auto* mcp = app.add_subcommand("mc-power", "empirical power against the ARMA(1,1)xSMA(1) alternative");
  add_mc(mcp, mc_power);

  // tabulate-uk
  auto* tab = app.add_subcommand("tabulate-uk", "simulate (or load) the U_K quantile table");
  UkFlags tab_uk;
  std::string tab_out;
  tab_uk.add(tab);
  tab->add_option("--threads", tab_uk.threads, "worker threads (0 = all cores)");
  tab->add_option("--out", tab_out, "print destination (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  try {
    if (*sim) {
      const wsarma_order order = parse_order(sim_order, sim_season);
      const auto theta = parse_doubles(sim_theta, "--theta");
      wsarma_noise_config nc;
      wsarma_noise_config_default(&nc);
      nc.alpha1 = sim_alpha1;
      nc.seed = sim_seed;
      if (sim_n < 1) usage_error("--n must be >= 1");
      Series s;
      check(wsarma_simulate(order, theta.data(), theta.size(), &nc, static_cast<size_t>(sim_n), 0, s.out()));
      std::string text;
      char buf[32];
      const double* d = wsarma_series_data(s.get());
      for (size_t i = 0; i < wsarma_series_length(s.get()); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", d[i]);
        text += buf;
      }
      write_text(sim_out, text);
    } else if (*fitc) {
      Series x;
      fit_in.load(x);
      FitSetup setup = fit_setup(fit_model);
      Fit f;
      check(wsarma_fit_series(x.get(), setup.order, &setup.opts, f.out()));
      CString json;
      check(wsarma_fit_json(f.get(), 0.95, &json.p));
      write_text(fit_out, json.p);
    } else if (*diag) {
      Series x;
      const int n_raw = diag_in.load(x);
      FitSetup setup = fit_setup(diag_model);
      const auto m_list = parse_ints(diag_m, "--m");
      Table table;
      diag_uk.open(table);
      wsarma_diagnose_options opts;
      opts.order = setup.order;
      opts.m_list = m_list.data();
      opts.m_count = m_list.size();
      opts.methods = diag_methods.c_str();
      opts.alpha = diag_alpha;
      opts.fit = &setup.opts;
      wsarma_provenance prov;
      prov.input_path = diag_in.path.c_str();
      prov.input_format = diag_in.format.c_str();
      prov.range = diag_in.format == "silso" ? diag_in.range.c_str() : "";
      prov.n_raw = n_raw;
      prov.transformed = diag_in.raw ? 0 : 1;
      Report report;
      check(wsarma_diagnose(x.get(), &opts, &prov, table.get(), report.out()));
      CString json;
      check(wsarma_report_json(report.get(), &json.p));
      write_text(diag_out, json.p);
      if (!diag_plot.empty()) check(wsarma_report_write_plot(report.get(), diag_plot.c_str()));
    } else if (*mcs || *mcp) {
      const bool size = mcs->parsed();
      McFlags& f = size ? mc_size : mc_power;
      const auto m_list = parse_ints(f.m, "--m");
      f.uk.threads = f.threads;
      Table table;
      f.uk.open(table);
      wsarma_mc_config cfg;
      cfg.design = size ? "size" : "power";
      cfg.s = f.season;
      cfg.n = f.n;
      cfg.replications = f.reps;
      cfg.alpha1 = f.alpha1;
      cfg.m_list = m_list.data();
      cfg.m_count = m_list.size();
      cfg.methods = f.methods.c_str();
      cfg.alpha = f.alpha;
      cfg.master_seed = f.seed;
      cfg.path_length = f.path_length;
      cfg.threads = f.threads;
      cfg.max_failure_fraction = f.max_failures > 0.0 ? f.max_failures : 1e-12;  // 0 tolerates none
      CString csv;
      int failures = 0;
      check(wsarma_mc_run(&cfg, table.get(), &csv.p, &failures));
      if (failures > 0) std::cerr << "wsarma: " << failures << " replications excluded after failed fits\n";
      write_text(f.out, csv.p);
    } else if (*tab) {
      Table table;
      const wsarma_uk_config c = tab_uk.config();
      const std::string path = tab_uk.cache.empty() ? default_uk_cache() : tab_uk.cache;
      check(wsarma_uk_table_open(path.c_str(), &c, table.out()));
      CString text;
      check(wsarma_uk_table_text(table.get(), &text.p));
      write_text(tab_out, text.p);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kOk;
}
