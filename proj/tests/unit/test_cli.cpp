#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

const std::string kCli = WSARMA_CLI;
const std::string kData = WSARMA_TEST_DATA "/SN_m_tot_1990_2020.csv";

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

const std::string& uk_flags() {
  static const std::string flags = " --uk-table " + temp_path("wsarma_cli_uk.txt") + " --uk-steps 400 --uk-reps 2000";
  return flags;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {(std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cli: success paths") {
  CHECK(run("--help") == 0);
  CHECK(run("tabulate-uk" + uk_flags()) == 0);
  const std::string sim = temp_path("wsarma_cli_sim.txt");
  CHECK(run("simulate --order 0,1,0,1 --season 4 --theta -0.6,-0.7 --n 400 --seed 3 --out " + sim) == 0);
  CHECK(run("fit " + sim + " --format plain --raw --order 0,1,0,1 --season 4") == 0);
  const std::string out = temp_path("wsarma_cli_report.json");
  const std::string plot = temp_path("wsarma_cli_plot.csv");
  CHECK(run("diagnose " + kData + " --order 3,1,0,1 --season 12 --fix a1,a2 --m 4,12 --out " + out + " --plot " +
            plot + uk_flags()) == 0);
  const std::string report = slurp(out);
  CHECK(report.find("\"sha256\"") != std::string::npos);
  CHECK(report.find("\"range\": \"2010-01:2018-12\"") != std::string::npos);
  CHECK(slurp(plot).rfind("lag,rho,band_strong,", 0) == 0);

  const std::string out2 = temp_path("wsarma_cli_report2.json");
  CHECK(run("diagnose " + kData + " --order 3,1,0,1 --season 12 --fix a1,a2 --m 4,12 --out " + out2 + uk_flags()) == 0);
  CHECK(slurp(out2) == report);
  CHECK(run("mc-size --season 4 --n 200 --reps 4 --m 4" + uk_flags()) == 0);
  CHECK(run("mc-power --season 4 --n 50 --reps 40 --m 4 --methods lb-s --max-failures 1" + uk_flags()) == 0);
  for (const auto& p : {sim, out, out2, plot}) std::filesystem::remove(p);
}

TEST_CASE("cli: parse and domain errors exit with 2") {
  const std::string bad = temp_path("wsarma_cli_bad.csv");
  {
    std::ofstream f(bad);
    f << "2010;01;2010.042;oops;1;1;1\n";
  }
  CHECK(run("fit " + bad + " --order 0,1,0,0") == 2);
  CHECK(run("fit /nonexistent/file.csv --order 0,1,0,0") == 2);
  CHECK(run("fit " + kData + " --order 0,1") == 2);
  CHECK(run("fit " + kData + " --order 0,1,0,0 --range 2018-12:2010-01") == 2);
  CHECK(run("diagnose " + kData + " --order 0,1,0,0 --methods lb-q") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("mc-size --max-failures 2") == 2);
  {
    std::ofstream f(bad);
    f << "1.0\n2.0\n0.0\n3.0\n";
  }
  CHECK(run("fit " + bad + " --format plain --order 0,1,0,0") == 2);
  std::filesystem::remove(bad);
}

TEST_CASE("cli: not-applicable configuration exits with 4") {
  CHECK(run("mc-size --season 4 --n 200 --reps 2 --m 25 --methods lb-sn" + uk_flags()) == 4);
}

TEST_CASE("cli: numerical failure exits with 3") {
  const std::string flat = temp_path("wsarma_cli_flat.txt");
  {
    std::ofstream f(flat);
    for (int i = 0; i < 60; ++i) f << "0\n";
  }
  CHECK(run("fit " + flat + " --format plain --raw --order 0,1,0,0") == 3);
  std::filesystem::remove(flat);
}
