#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) {
    dir = fs::temp_directory_path() / ("g2flow_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  // runs the CLI with cwd = dir; returns the exit code
  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + G2FLOW_BIN + "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string read(const fs::path& rel) const {
    std::ifstream f(dir / rel, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  void write(const fs::path& rel, const std::string& text) const { std::ofstream(dir / rel) << text; }
};

std::vector<std::vector<double>> read_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("check suites are deterministic") {
  Sandbox box("det");
  REQUIRE(box.run("--out a check --suite variation --seed 7") == 0);
  REQUIRE(box.run("--threads 3 --out b check --suite variation --seed 7") == 0);
  const std::string a = box.read("a/check_variation.jsonl");
  CHECK(!a.empty());
  CHECK(a == box.read("b/check_variation.jsonl"));
  CHECK(a.find("PASS max_rel_err=") != std::string::npos);
  const json m = json::parse(box.read("a/manifest.json"));
  CHECK(m["command"] == "check");
  CHECK(m["seed"] == 7);
  CHECK(m["outcome"] == "pass");
  CHECK(m["config_digest"].get<std::string>().rfind("sha256:", 0) == 0);
  CHECK(m["config_digest"] == json::parse(box.read("b/manifest.json"))["config_digest"]);
}

TEST_CASE("calibration agrees across seeds") {
  Sandbox box("cal");
  REQUIRE(box.run("--out s1 calibrate-a --seed 1") == 0);
  REQUIRE(box.run("--out s2 calibrate-a --seed 2") == 0);
  const json a = json::parse(box.read("s1/calibration.json"));
  const json b = json::parse(box.read("s2/calibration.json"));
  for (const char* key : {"A", "samples", "relative_spread"}) CHECK(a.contains(key));
  const double A1 = a["A"], A2 = b["A"];
  CHECK(std::abs(A1 - A2) <= 1e-6 * std::abs(A1));
  CHECK(json::parse(box.read("stdout.txt"))["A"] == b["A"]);
}

TEST_CASE("flow from the flat structure") {
  Sandbox box("fixed");
  box.write("fixedpoint.json", R"({"seed": 1, "epsilon": 0.0, "t_end": 0.02, "A": -0.5})");
  REQUIRE(box.run("--out run flow --config fixedpoint.json") == 0);
  const auto rows = read_csv(box.read("run/diagnostics.csv"));
  REQUIRE(rows.size() >= 2);
  for (const auto& r : rows) {
    REQUIRE(r.size() == 6 + 35);
    CHECK(r[1] == rows[0][1]);
  }
  const std::string header = box.read("run/diagnostics.csv").substr(0, 60);
  CHECK(header.rfind("t,V,tau2_l2,dsigma_l2,dt,min_metric_eig,p_123,", 0) == 0);
  CHECK(fs::exists(box.dir / "run/snapshots/state_00000.g2f1"));
  // nothing is written outside the output directory
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(box.dir)) names.insert(e.path().filename().string());
  CHECK(names == std::set<std::string>{"fixedpoint.json", "run", "stdout.txt", "stderr.txt"});
}

TEST_CASE("flow and pullback outputs are reproducible and match the scalar kernels") {
  Sandbox box("flow");
  box.write("cfg.json", R"({"seed": 4, "n": 8, "max_mode": 1, "epsilon": 0.01, "t_end": 0.02, "fixed_steps": 6, "A": -0.5})");
  REQUIRE(box.run("--out a flow --config cfg.json") == 0);
  REQUIRE(box.run("--threads 2 --out b flow --config cfg.json") == 0);
  REQUIRE(box.run("--out c flow --config cfg.json", "G2FLOW_SIMD=off") == 0);
  CHECK(box.read("a/diagnostics.csv") == box.read("b/diagnostics.csv"));
  CHECK(box.read("a/snapshots/state_00006.g2f1") == box.read("b/snapshots/state_00006.g2f1"));
  CHECK(json::parse(box.read("c/manifest.json"))["simd"] == "scalar");
  const auto simd = read_csv(box.read("a/diagnostics.csv"));
  const auto scalar = read_csv(box.read("c/diagnostics.csv"));
  REQUIRE(simd.size() == scalar.size());
  for (std::size_t i = 0; i < simd.size(); ++i)
    for (std::size_t j = 0; j < simd[i].size(); ++j)
      CHECK(std::abs(simd[i][j] - scalar[i][j]) <= 1e-12 * std::max(1.0, std::abs(scalar[i][j])));

  REQUIRE(box.run("--out p pullback --config cfg.json") == 0);
  const json rep = json::parse(box.read("p/pullback.json"));
  CHECK(rep["plain_flow_residual"].get<double>() <= 1e-4);
  CHECK(fs::exists(box.dir / "p/pulled_diagnostics.csv"));
}

TEST_CASE("configuration errors exit with code 1") {
  Sandbox box("err");
  CHECK(box.run("") == 1);
  CHECK(box.run("frobnicate") == 1);
  CHECK(box.run("check --suite variation") == 1);
  CHECK(box.run("check --suite nope --seed 1") == 1);
  CHECK(box.run("calibrate-a --seed 1 --bogus") == 1);
  CHECK(box.run("symbol --xi 1,0,0") == 1);
  CHECK(box.run("flow --config missing.json") == 1);
  box.write("noseed.json", R"({"epsilon": 0.01})");
  CHECK(box.run("flow --config noseed.json") == 1);
  box.write("typo.json", R"({"seed": 1, "t_ned": 0.1})");
  CHECK(box.run("flow --config typo.json") == 1);
  CHECK(box.read("stderr.txt").find("t_ned") != std::string::npos);
  box.write("broken.json", R"({"seed": 1,)");
  CHECK(box.run("flow --config broken.json") == 1);
  box.write("indef.json", R"({"seed": 1, "epsilon": 3.0, "A": -0.5})");
  CHECK(box.run("flow --config indef.json") == 1);
  box.write("plain.json", R"({"seed": 1, "gauge": "plain", "A": -0.5})");
  CHECK(box.run("pullback --config plain.json") == 1);
}

TEST_CASE("symbol subcommand prints the closed-cone matrix") {
  Sandbox box("sym");
  REQUIRE(box.run("--out s symbol --lambda -5 --mu -1 --xi 1,0,0,0,0,0,0") == 0);
  const std::string out = box.read("stdout.txt");
  CHECK(out == box.read("s/symbol.csv"));
  std::stringstream ss(out);
  std::string line;
  std::getline(ss, line);
  CHECK(line.rfind("row,e^123,", 0) == 0);
  int rows = 0;
  while (std::getline(ss, line) && !line.empty()) {
    ++rows;
    std::stringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      const double v = std::stod(cell);
      CHECK(std::abs(v - (col == rows - 1 ? -1.0 : 0.0)) <= 1e-6);
      ++col;
    }
    CHECK(col == 15);
  }
  CHECK(rows == 15);
  std::getline(ss, line);
  CHECK(line == "eigenvalue,real,imag");
}
