#include <doctest.h>

#include <sstream>

#include "error.hpp"
#include "montecarlo.hpp"

using namespace wsarma;

namespace {

UkTable small_table() {
  UkSimConfig cfg;
  cfg.grid_steps = 400;
  cfg.replications = 2000;
  cfg.seed = 8;
  return simulate_uk_table(cfg);
}

}  // namespace

TEST_CASE("binomial bands") {
  const auto b95 = binomial_band(1000, 0.05, 0.95);
  const auto b99 = binomial_band(1000, 0.05, 0.99);
  CHECK(b95.first == doctest::Approx(3.6));
  CHECK(b95.second == doctest::Approx(6.4));
  CHECK(b99.first == doctest::Approx(3.2));
  CHECK(b99.second == doctest::Approx(6.9));
  CHECK(flag_band(5.0, 1000, 0.05) == BandFlag::Inside);
  CHECK(flag_band(6.8, 1000, 0.05) == BandFlag::Outside95);
  CHECK(flag_band(8.7, 1000, 0.05) == BandFlag::Outside99);
  CHECK(flag_band(3.2, 1000, 0.05) == BandFlag::Outside95);
  CHECK(flag_band(3.1, 1000, 0.05) == BandFlag::Outside99);
  CHECK(flag_band(6.9, 1000, 0.05) == BandFlag::Outside95);
  CHECK(flag_band(6.4, 1000, 0.05) == BandFlag::Inside);
  CHECK(std::string(band_flag_name(BandFlag::Outside99)) == "outside-99");
}

TEST_CASE("one replication gives 0 or 100 percent") {
  UkTable table = small_table();
  ExperimentConfig c;
  c.n = 300;
  c.replications = 1;
  c.m_list = {4, 8};
  const auto r = run_size(c, table);
  REQUIRE(r.rows.size() == 2 * 6);
  for (const auto& row : r.rows) {
    if (!row.applicable) continue;
    CHECK((row.freq == 0.0 || row.freq == 100.0));
  }
}

TEST_CASE("size rows: layout, applicability and flags") {
  UkTable table = small_table();
  ExperimentConfig c;
  c.n = 400;
  c.replications = 40;
  c.m_list = {2, 6};
  const auto r = run_size(c, table);
  CHECK(r.replications == 40);
  REQUIRE(r.rows.size() == 12);
  for (const auto& row : r.rows) {
    CHECK(row.s == 4);
    CHECK(row.n == 400);
    const bool standard = row.method == Method::LB_S || row.method == Method::BP_S;
    CHECK(row.applicable == !(standard && row.m <= 2));
    if (row.applicable) CHECK(row.flag == flag_band(row.freq, 40 - r.failures, 0.05));
  }
}

TEST_CASE("power rows at a very small n") {
  UkTable table = small_table();
  ExperimentConfig c;
  c.dgp = Dgp::Power;
  c.n = 50;
  c.replications = 30;
  c.m_list = {4, 8};
  c.max_failure_fraction = 1.0;
  const auto r = run_power(c, table);
  REQUIRE(r.rows.size() == 12);
  CHECK(r.failures < 30);
  for (const auto& row : r.rows) {
    CHECK(row.freq >= 0.0);
    CHECK(row.freq <= 100.0);
    CHECK(row.flag == BandFlag::None);
  }
}

TEST_CASE("failure ceiling") {
  UkTable table = small_table();
  ExperimentConfig c;
  c.dgp = Dgp::Power;
  c.n = 50;
  c.replications = 60;
  c.m_list = {4};
  c.max_failure_fraction = 1.0;
  const int failures = run_power(c, table).failures;
  REQUIRE(failures > 0);
  c.max_failure_fraction = 0.5 * failures / 60.0;
  try {
    run_power(c, table);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExperimentIntegrity);
  }
}

TEST_CASE("experiments are deterministic across thread counts") {
  UkTable table = small_table();
  ExperimentConfig c;
  c.s = 12;
  c.n = 300;
  c.replications = 24;
  c.alpha1 = 0.45;
  c.m_list = {4, 12};
  c.threads = 1;
  const auto a = run_size(c, table);
  c.threads = 5;
  const auto b = run_size(c, table);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("csv format") {
  ExperimentResult r;
  r.rows.push_back({4, 2000, 12, Method::LB_SN, true, 4.9, BandFlag::Inside});
  r.rows.push_back({4, 2000, 1, Method::LB_S, false, 0.0, BandFlag::Inside});
  r.rows.push_back({4, 2000, 12, Method::LB_W, true, 100.0, BandFlag::None});
  std::ostringstream out;
  write_csv(r, out);
  CHECK(out.str() ==
        "s,n,m,method,freq,flag\n4,2000,12,LB_SN,4.9,inside\n4,2000,1,LB_S,n.a.,n.a.\n4,2000,12,LB_W,100.0,-\n");
}

TEST_CASE("experiment config validation") {
  UkTable table = small_table();
  ExperimentConfig c;
  c.replications = 0;
  CHECK_THROWS_AS(run_size(c, table), Error);
  c = {};
  c.m_list = {};
  CHECK_THROWS_AS(run_size(c, table), Error);
  c = {};
  c.max_failure_fraction = 1.5;
  CHECK_THROWS_AS(run_size(c, table), Error);
  c = {};
  c.dgp = Dgp::Power;
  CHECK_THROWS_AS(run_size(c, table), Error);
  CHECK(parse_dgp("power") == Dgp::Power);
  CHECK_THROWS_AS(parse_dgp("bogus"), Error);
}
