#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout and stderr together.
Run cli(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path() / "hocfd_cli_test";
  std::filesystem::create_directories(dir);
  const auto log = dir / "stdout.txt";
  const std::string cmd = std::string(HOCFD_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string out_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hocfd_cli_test" / "out";
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::vector<double> last_column(const std::string& text) {
  std::vector<double> v;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) v.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  return v;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists every flag and command") {
  const auto r = cli("--help");
  CHECK(r.code == 0);
  for (const char* s : {"--config", "--set", "--out", "--seed", "--threads", "price", "converge",
                        "stability-map", "vn-check", "analytic", "mc", "dump-weights"})
    CHECK(r.out.find(s) != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("--threads 0 analytic").code == 2);
  CHECK(cli("--set model.rho=2 analytic --out " + out_dir()).code == 2);
  CHECK(cli("--set grid.nope=1 analytic").code == 2);
  CHECK(cli("--config /nonexistent.ini analytic").code == 2);
  const auto r = cli("--set grid.h=0.4 --set study.probe_S=1000 --out " + out_dir() + " price");
  CHECK(r.code == 2);
  CHECK(r.out.find("outside the domain") != std::string::npos);
}

TEST_CASE("analytic prices fall with S") {
  const auto r = cli("--set study.probe_sigma=0.1 --out " + out_dir() + " analytic");
  REQUIRE(r.code == 0);
  const auto v = last_column(r.out);
  REQUIRE(v.size() == 3);
  CHECK(v[0] > v[1]);
  CHECK(v[1] > v[2]);
  CHECK(std::filesystem::exists(std::filesystem::path(out_dir()) / "analytic.csv"));
}

TEST_CASE("dump-weights writes the centre gamma") {
  const auto r = cli("--set grid.h=0.4 --out " + out_dir() + " dump-weights");
  REQUIRE(r.code == 0);
  std::ifstream in(std::filesystem::path(out_dir()) / "weights.csv");
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'j') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string s; std::getline(ss, s, ',');) cols.push_back(s);
    if (cols.at(2) == "0") {
      CHECK(std::stod(cols.at(4)) == doctest::Approx(2.0 / 3.0));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("price on a coarse grid") {
  const auto r = cli("--set grid.h=0.2 --out " + out_dir() + " price");
  CHECK(r.code == 0);
  CHECK(last_column(r.out).size() == 6);
  CHECK(std::filesystem::exists(std::filesystem::path(out_dir()) / "surface.csv"));
}

TEST_CASE("mc with a seed") {
  const std::string args = "--seed 5 --set study.mc_paths=2000 --set study.mc_steps=20 "
                           "--set study.probe_S=100 --set study.probe_sigma=0.1 --out " + out_dir() + " mc";
  const auto a = cli(args), b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("an unattained stability bound exits with 3") {
  // The rho = 0 box contains modes where |G| exceeds one by far more than the
  // tolerance, so even a small search reports a failure.
  const auto r = cli("--set study.samples=2000 --set study.refine_starts=1 --set study.rho_sweep=0 --out " +
                     out_dir() + " vn-check");
  CHECK(r.code == 3);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("an aborted study exits with 3") {
  const auto r = cli("--set study.ladder=0.4,0.2,0.1 --set study.reference_h=0.05 "
                     "--set grid.x_half_width=2.1 --out " + out_dir() + " converge");
  CHECK(r.code == 3);
}

}
