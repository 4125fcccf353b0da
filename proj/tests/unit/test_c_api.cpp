#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <wsarma/wsarma.h>

namespace {

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

wsarma_uk_table* small_table() {
  wsarma_uk_config cfg;
  wsarma_uk_config_default(&cfg);
  cfg.grid_steps = 400;
  cfg.replications = 2000;
  cfg.seed = 3;
  wsarma_uk_table* t = nullptr;
  REQUIRE(wsarma_uk_table_open(nullptr, &cfg, &t) == WSARMA_OK);
  return t;
}

wsarma_series* simulated(size_t n, uint64_t seed) {
  const double theta[] = {-0.6, -0.7};
  wsarma_noise_config noise;
  wsarma_noise_config_default(&noise);
  noise.seed = seed;
  wsarma_series* s = nullptr;
  REQUIRE(wsarma_simulate({0, 1, 0, 1, 4}, theta, 2, &noise, n, 0, &s) == WSARMA_OK);
  return s;
}

}  // namespace

TEST_CASE("C API: version and status names") {
  CHECK(std::string(wsarma_version()) == "0.1.0");
  CHECK(std::string(wsarma_status_name(WSARMA_OK)) == "ok");
  CHECK(std::string(wsarma_status_name(WSARMA_E_DEGENERATE_NORMALIZER)) == "degenerate-normalizer");
}

TEST_CASE("C API: series, fit and JSON") {
  wsarma_series* s = simulated(800, 5);
  CHECK(wsarma_series_length(s) == 800);
  wsarma_fit* f = nullptr;
  REQUIRE(wsarma_fit_series(s, {0, 1, 0, 1, 4}, nullptr, &f) == WSARMA_OK);
  CHECK(wsarma_fit_theta_len(f) == 2);
  CHECK(wsarma_fit_num_free(f) == 2);
  double theta[2], se[2];
  REQUIRE(wsarma_fit_theta(f, theta, 2) == WSARMA_OK);
  REQUIRE(wsarma_fit_se(f, se, 2) == WSARMA_OK);
  CHECK(std::abs(theta[0] + 0.6) < 0.1);
  CHECK(se[1] > 0.0);
  CHECK(wsarma_fit_sigma2(f) > 0.0);
  CHECK(wsarma_fit_theta(f, theta, 1) == WSARMA_E_INVALID_INPUT);
  char* json = nullptr;
  REQUIRE(wsarma_fit_json(f, 0.95, &json) == WSARMA_OK);
  CHECK(std::strstr(json, "\"coefficients\"") != nullptr);
  wsarma_string_free(json);
  wsarma_fit_free(f);
  wsarma_series_free(s);
}

TEST_CASE("C API: masked fit") {
  wsarma_series* s = simulated(600, 6);
  const int mask[] = {0, 1, 1};
  wsarma_fit_options opt;
  wsarma_fit_options_default(&opt);
  opt.free_mask = mask;
  opt.mask_len = 3;
  wsarma_fit* f = nullptr;
  REQUIRE(wsarma_fit_series(s, {1, 1, 0, 1, 4}, &opt, &f) == WSARMA_OK);
  double theta[3];
  REQUIRE(wsarma_fit_theta(f, theta, 3) == WSARMA_OK);
  CHECK(theta[0] == 0.0);
  CHECK(wsarma_fit_num_free(f) == 2);
  wsarma_fit_free(f);
  wsarma_series_free(s);
}

TEST_CASE("C API: errors carry a status and a message") {
  const double x[] = {1.0, NAN};
  wsarma_series* s = nullptr;
  CHECK(wsarma_series_from_array(x, 2, &s) == WSARMA_E_INVALID_INPUT);
  CHECK(std::strlen(wsarma_last_error()) > 0);
  CHECK(wsarma_series_load_silso("/nonexistent.csv", nullptr, nullptr, &s) == WSARMA_E_IO_ERROR);
  CHECK(wsarma_series_from_array(nullptr, 2, &s) == WSARMA_E_INVALID_INPUT);

  const double y[] = {1.0, 0.0, 2.0};
  wsarma_series* t = nullptr;
  REQUIRE(wsarma_series_from_array(y, 3, &t) == WSARMA_OK);
  wsarma_series* u = nullptr;
  CHECK(wsarma_series_logdiff_center(t, "2011-12", &u) == WSARMA_E_DOMAIN_ERROR);
  CHECK(std::string(wsarma_last_error()).find("2012-01") != std::string::npos);
  wsarma_series_free(t);

  wsarma_uk_table* table = small_table();
  double q = 0.0;
  CHECK(wsarma_uk_quantile(table, 25, 0.95, &q) == WSARMA_E_NOT_APPLICABLE);
  wsarma_uk_table_free(table);
}

TEST_CASE("C API: SILSO ingestion and diagnose") {
  wsarma_series* raw = nullptr;
  REQUIRE(wsarma_series_load_silso(WSARMA_TEST_DATA "/SN_m_tot_1990_2020.csv", nullptr, nullptr, &raw) == WSARMA_OK);
  CHECK(wsarma_series_length(raw) == 108);
  wsarma_series* x = nullptr;
  REQUIRE(wsarma_series_logdiff_center(raw, "2010-01", &x) == WSARMA_OK);
  CHECK(wsarma_series_length(x) == 107);

  wsarma_uk_table* table = small_table();
  const int mask[] = {0, 0, 1, 1, 1};
  const int ms[] = {4, 12};
  wsarma_fit_options fo;
  wsarma_fit_options_default(&fo);
  fo.free_mask = mask;
  fo.mask_len = 5;
  wsarma_diagnose_options opt{};
  opt.order = {3, 1, 0, 1, 12};
  opt.m_list = ms;
  opt.m_count = 2;
  opt.methods = "lb-sn,lb-w,lb-s";
  opt.alpha = 0.05;
  opt.fit = &fo;
  wsarma_provenance prov{};
  prov.input_path = WSARMA_TEST_DATA "/SN_m_tot_1990_2020.csv";
  prov.input_format = "silso";
  prov.range = "2010-01:2018-12";
  prov.n_raw = 108;
  prov.transformed = 1;
  wsarma_report* rep = nullptr;
  REQUIRE(wsarma_diagnose(x, &opt, &prov, table, &rep) == WSARMA_OK);
  char* json = nullptr;
  REQUIRE(wsarma_report_json(rep, &json) == WSARMA_OK);
  const std::string text(json);
  wsarma_string_free(json);
  CHECK(text.find("\"sha256\"") != std::string::npos);
  CHECK(text.find("\"n_transformed\": 107") != std::string::npos);
  CHECK(text.find("\"LB_SN\"") != std::string::npos);
  const std::string plot = temp_path("wsarma_c_plot.csv");
  CHECK(wsarma_report_write_plot(rep, plot.c_str()) == WSARMA_OK);
  CHECK(std::filesystem::exists(plot));
  std::filesystem::remove(plot);

  opt.methods = "lb-q";
  wsarma_report* bad = nullptr;
  CHECK(wsarma_diagnose(x, &opt, &prov, table, &bad) == WSARMA_E_INVALID_INPUT);

  wsarma_report_free(rep);
  wsarma_uk_table_free(table);
  wsarma_series_free(x);
  wsarma_series_free(raw);
}

TEST_CASE("C API: Monte Carlo and quadratic forms") {
  wsarma_uk_table* table = small_table();
  const int ms[] = {4};
  wsarma_mc_config cfg{};
  cfg.design = "size";
  cfg.s = 4;
  cfg.n = 300;
  cfg.replications = 10;
  cfg.m_list = ms;
  cfg.m_count = 1;
  cfg.alpha = 0.05;
  cfg.master_seed = 1;
  char* csv = nullptr;
  int failures = -1;
  REQUIRE(wsarma_mc_run(&cfg, table, &csv, &failures) == WSARMA_OK);
  CHECK(std::string(csv).rfind("s,n,m,method,freq,flag\n", 0) == 0);
  CHECK(failures >= 0);
  wsarma_string_free(csv);
  cfg.design = "other";
  CHECK(wsarma_mc_run(&cfg, table, &csv, &failures) == WSARMA_E_INVALID_INPUT);
  wsarma_uk_table_free(table);

  const double xi[] = {1.0};
  double p = 0.0;
  REQUIRE(wsarma_quadform_tail(xi, 1, 3.8415, &p) == WSARMA_OK);
  CHECK(std::abs(p - 0.05) < 1e-4);
}

TEST_CASE("C API: U_K cache round trip") {
  wsarma_uk_table* t = small_table();
  const std::string path = temp_path("wsarma_c_uk.txt");
  REQUIRE(wsarma_uk_table_save(t, path.c_str()) == WSARMA_OK);
  wsarma_uk_config cfg;
  wsarma_uk_config_default(&cfg);
  cfg.grid_steps = 400;
  cfg.replications = 2000;
  cfg.seed = 3;
  wsarma_uk_table* u = nullptr;
  REQUIRE(wsarma_uk_table_open(path.c_str(), &cfg, &u) == WSARMA_OK);
  char *a = nullptr, *b = nullptr;
  REQUIRE(wsarma_uk_table_text(t, &a) == WSARMA_OK);
  REQUIRE(wsarma_uk_table_text(u, &b) == WSARMA_OK);
  CHECK(std::string(a) == std::string(b));
  wsarma_string_free(a);
  wsarma_string_free(b);
  wsarma_uk_table_free(u);
  wsarma_uk_table_free(t);
  std::filesystem::remove(path);
}
