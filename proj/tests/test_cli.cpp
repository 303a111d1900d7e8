// End-to-end checks of the command-line tool: byte-stable outputs, schema
// rows, exit codes. The binary path comes in through TCMAP_CLI_PATH.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli() { return TCMAP_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("tcmap_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate writes a schema-versioned, byte-stable csv") {
  TempDir d1("sim1"), d2("sim2");
  std::string base =
      "simulate --lambda 0.5 --delta 0.04 --h 0.001 --x0 -1 --y0 -1.005 -n "
      "2000 --out ";
  REQUIRE(run(base + d1.path.string()) == 0);
  REQUIRE(run(base + d2.path.string()) == 0);
  std::string a = slurp(d1.path / "simulate.csv");
  std::string b = slurp(d2.path / "simulate.csv");
  CHECK(a == b);
  CHECK(a.rfind("schema_version,1\n", 0) == 0);
  CHECK(a.find("step,x,y,eps,h,branch,flag") != std::string::npos);
  CHECK(a.find("S_a_minus") != std::string::npos);
}

TEST_CASE("canard simulation keeps the two columns identical") {
  TempDir d("canard");
  REQUIRE(run("simulate --lambda 1 --delta 0.04 --h 0.001 --x0 0.25 --y0 "
              "0.25 -n 500 --out " +
              d.path.string()) == 0);
  std::string text = slurp(d.path / "simulate.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // schema
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string step, x, y;
    std::getline(ls, step, ',');
    std::getline(ls, x, ',');
    std::getline(ls, y, ',');
    CHECK(x == y);  // byte-equal decimal renderings
    ++rows;
  }
  CHECK(rows == 501);
}

TEST_CASE("chart run reports conjugacy residual and the conserved product") {
  TempDir d("chart");
  REQUIRE(run("chart --chart k1 --point 1,-1,0.025,0.01 -n 500 --out " +
              d.path.string()) == 0);
  std::string text = slurp(d.path / "chart.csv");
  CHECK(text.find("step,r1,y1,eps1,h1,conj_residual,invariant_product") !=
        std::string::npos);
  // every residual stays tiny; scrape the column
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  double prod0 = -1;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    for (int i = 0; i < 6; ++i) std::getline(ls, cell, ',');
    double res = std::stod(cell);
    CHECK(res <= 1e-12);
    std::getline(ls, cell, ',');
    double prod = std::stod(cell);
    if (prod0 < 0) prod0 = prod;
    CHECK(std::abs(prod - prod0) <= 1e-12 * prod0);
  }
}

TEST_CASE("chart rejects a point outside the domain box") {
  TempDir d("chartbad");
  CHECK(run("chart --chart k1 --point 2,-1,0.025,0.01 -n 10 --out " +
            d.path.string()) == 2);
}

TEST_CASE("sweep over an eps decade fits the exit-height exponent") {
  TempDir d("sweep");
  REQUIRE(run("sweep --lambda 2 --axis eps --grid "
              "0.01,0.0137,0.0189,0.026,0.0357,0.049,0.0673,0.0924 "
              "--samples 8 --out " +
              d.path.string()) == 0);
  std::string fits = slurp(d.path / "sweep_fits.csv");
  CHECK(fits.find("exit_height_vs_eps") != std::string::npos);
  // slope cell of that row sits inside the frozen band
  std::istringstream in(fits);
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("exit_height_vs_eps,", 0) == 0) {
      std::stringstream ls(line);
      std::string cell;
      std::getline(ls, cell, ',');
      std::getline(ls, cell, ',');
      double slope = std::stod(cell);
      CHECK(slope >= 0.25);
      CHECK(slope <= 0.42);
      found = true;
    }
  }
  CHECK(found);
  CHECK(slurp(d.path / "sweep.csv").rfind("schema_version,1\n", 0) == 0);
}

TEST_CASE("sweep with an empty grid is a usage error") {
  TempDir d("sweepbad");
  CHECK(run("sweep --axis eps --grid '' --out " + d.path.string()) == 2);
}

TEST_CASE("verify validates the hypotheses before running") {
  TempDir d("verifybad");
  // h*rho^3 >= eps
  CHECK(run("verify --lambda 0.5 --delta 0.1 --h 0.01 --eps 0.005 --out " +
            d.path.string()) == 2);
}

TEST_CASE("print-config is flat key=value") {
  std::string cmd = cli() + " --print-config > /tmp/tcmap_cfg.txt 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::string text = slurp("/tmp/tcmap_cfg.txt");
  CHECK(text.find("lambda=0.5") != std::string::npos);
  CHECK(text.find("nu=0.01") != std::string::npos);
  CHECK(text.find("gamma=1.5") != std::string::npos);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir d("cfg");
  fs::path cfgfile = d.path / "run.cfg";
  std::ofstream(cfgfile) << "lambda=2\ndelta=0.05\nh=0.002\n";
  std::string cmd = cli() + " --config " + cfgfile.string() +
                    " --lambda 0.5 --print-config > " +
                    (d.path / "cfg_out.txt").string() + " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::string text = slurp(d.path / "cfg_out.txt");
  CHECK(text.find("lambda=0.5") != std::string::npos);  // flag wins
  CHECK(text.find("delta=0.05") != std::string::npos);  // file value
}
