// Runs the ifstool binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;  ///< stdout and stderr interleaved
};

Run run(const std::string& args) {
  const std::string cmd = std::string(IFSTOOL_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ifs::Vec2> read_cloud(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y");
  std::vector<ifs::Vec2> out;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return out;
}

/// Value after "key: " in the measure summary.
double field(const std::string& text, const std::string& key) {
  const auto at = text.find(key + ": ");
  if (at == std::string::npos) return std::nan("");
  return std::stod(text.substr(at + key.size() + 2));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ifstool_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, AnalyzeTriangle) {
  const auto r = run("analyze " + config("triangle.json") + " --max-k 3 --json");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["min_contractive_k"], 2);
  EXPECT_NEAR(j["iterates"][1]["critical_p1"]["value"].get<double>(), oracle::kCriticalP1, 1e-8);
  EXPECT_EQ(j["iterates"][0]["critical_p1"]["kind"], "never_contractive");
  EXPECT_EQ(j["contractive_word"]["word"], nlohmann::json::array({2, 2}));
  const auto text = run("analyze " + config("triangle.json") + " --max-k 3");
  EXPECT_NE(text.out.find("min k contractive on average: 2"), std::string::npos) << text.out;
}

TEST_F(Cli, AnalyzeOtherConfigs) {
  auto j = nlohmann::json::parse(run("analyze " + config("half_contraction.json") + " --json").out);
  EXPECT_EQ(j["min_contractive_k"], 1);
  j = nlohmann::json::parse(run("analyze " + config("shear_pair.json") + " --max-k 2 --json").out);
  EXPECT_NEAR(j["iterates"][1]["average_contractivity"].get<double>(), 0.75, 1e-15);
}

TEST_F(Cli, ChaosStaysInTriangle) {
  const auto out = path("cloud.csv");
  const auto r = run("chaos " + config("triangle.json") + " --start 0.3,0.3 --n 20000 --out " + out);
  ASSERT_EQ(r.status, 0) << r.out;
  const auto cloud = read_cloud(out);
  EXPECT_EQ(cloud.size(), 20000u);
  for (const auto& p : cloud) ASSERT_LE(oracle::barycentric_violation(p), 1e-9);
}

TEST_F(Cli, ChaosSingleRowAndDeterminism) {
  ASSERT_EQ(run("chaos " + config("triangle.json") + " --n 1 --burn-in 0 --out " + path("one.csv")).status, 0);
  EXPECT_EQ(read_cloud(path("one.csv")).size(), 1u);
  const std::string flags = " --n 5000 --seed 7 --chunks 4 --start 0.1,0.2 --out ";
  ASSERT_EQ(run("chaos " + config("triangle.json") + flags + path("a.csv")).status, 0);
  ASSERT_EQ(run("chaos " + config("triangle.json") + flags + path("b.csv")).status, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, ChaosDivergenceExitsNonzero) {
  const auto cfg = write("grow.json", R"({"maps": [{"A": [[3, 0], [0, 3]], "b": [1, 0], "p": 1}]})");
  const auto r = run("chaos " + cfg + " --start 1,1 --out " + path("x.csv"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("DivergedOrbit"), std::string::npos) << r.out;
}

TEST_F(Cli, MeasureTriangleFromPointMass) {
  const auto r = run("measure " + config("triangle.json") + " --init point:0.3,0.3 --out " + path("tri"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_LE(field(r.out, "tv_to_uniform_on_hint"), 0.05) << r.out;
  EXPECT_EQ(field(r.out, "escaped_mass"), 0.0);
  EXPECT_EQ(slurp(path("tri.pgm")).rfind("P2\n256 256\n255\n", 0), 0u);
  EXPECT_EQ(slurp(path("tri.csv")).rfind("cell_x_index,cell_y_index,mass\n", 0), 0u);
  EXPECT_EQ(slurp(path("tri_log.csv")).rfind("iteration,tv_residual\n1,", 0), 0u);
}

TEST_F(Cli, MeasureShearPair) {
  const auto r = run("measure " + config("shear_pair.json") + " --probe 1,0 --radius 0.05 --out " + path("sp"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_GE(field(r.out, "mass_within_radius"), 0.99) << r.out;
}

TEST_F(Cli, MeasureToleranceOne) {
  const auto r = run("measure " + config("triangle.json") + " --grid 64 --tol 1 --out " + path("m"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(field(r.out, "iterations"), 1.0);
  EXPECT_NE(r.out.find("converged: true"), std::string::npos);
}

TEST_F(Cli, MeasureWithoutProbabilities) {
  const auto cfg = write("np.json", R"({"maps": [{"A": [[0.5, 0], [0, 0.5]], "b": [0, 0]}]})");
  const auto r = run("measure " + cfg + " --grid 16 --out " + path("m"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("MissingProbabilities"), std::string::npos) << r.out;
}

TEST_F(Cli, FibreWitnesses) {
  auto r = run("fibre " + config("triangle.json") + " --address 1:1 --depth 40 --json");
  ASSERT_EQ(r.status, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["class"], "segment");
  EXPECT_NEAR(j["segment"][0][0].get<double>(), 0.0, 1e-6);
  EXPECT_NEAR(j["segment"][1][0].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(j["decay"].size(), 40u);
  j = nlohmann::json::parse(run("fibre " + config("triangle.json") + " --address 2:2 --depth 40 --json").out);
  EXPECT_EQ(j["class"], "point");
  EXPECT_NEAR(j["point"][0].get<double>(), 0.25, 1e-6);
  EXPECT_NEAR(j["point"][1].get<double>(), 0.5, 1e-6);
}

TEST_F(Cli, FibreDepthOne) {
  const auto j = nlohmann::json::parse(run("fibre " + config("triangle.json") + " --address 1 --depth 1 --json").out);
  const auto image = oracle::triangle().image(oracle::triangle_f1());
  ASSERT_EQ(j["decay"][0]["vertices"].size(), image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    EXPECT_EQ(j["decay"][0]["vertices"][i][0].get<double>(), image.vertices()[i].x);
    EXPECT_EQ(j["decay"][0]["vertices"][i][1].get<double>(), image.vertices()[i].y);
  }
}

TEST_F(Cli, FibreFibredness) {
  const auto r = run("fibre " + config("triangle.json") + " --address 2:2 --fibredness");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("strongly fibred (contractive word 22"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("point fibred: no"), std::string::npos) << r.out;
}

TEST_F(Cli, FibreErrors) {
  auto r = run("fibre " + config("triangle.json") + " --address 1x2");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("AddressParseError"), std::string::npos) << r.out;
  const auto nohint = write("nohint.json", R"({"maps": [{"A": [[0.5, 0], [0, 0.5]], "b": [0, 0]}]})");
  EXPECT_EQ(run("fibre " + nohint + " --address 1:1").status, 2);
  const auto bad = write("bad.json",
                         R"({"maps": [{"A": [[0, 0.5], [-1, -0.5]], "b": [0, 1]}], "invariant_hint": [[0,0],[1,0],[1,1],[0,1]]})");
  r = run("fibre " + bad + " --address 1:1");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("NotInvariant"), std::string::npos) << r.out;
}

TEST_F(Cli, MalformedConfigsGiveDiagnostics) {
  const std::pair<const char*, const char*> cases[] = {
      {R"({"maps": [{"A": [[1, 0], [0, 1]], "b": [0]}]})", "maps[0].b"},
      {R"({"maps": [{"A": [[1, 0], [0, 1]], "b": [0, 0], "p": 0.4}, {"A": [[1, 0], [0, 1]], "b": [0, 0], "p": 0.4}]})", "maps[].p"},
      {"{\"maps\": [", "line 1"},
      {"", "line"},
  };
  int i = 0;
  for (const auto& [text, needle] : cases) {
    const auto cfg = write("c" + std::to_string(i++) + ".json", text);
    const auto r = run("analyze " + cfg);
    EXPECT_EQ(r.status, 2) << text;
    EXPECT_NE(r.out.find(needle), std::string::npos) << r.out;
  }
  EXPECT_EQ(run("analyze " + path("missing.json")).status, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("chaos " + config("triangle.json") + " --start \"1;2\"").status, 2);
  EXPECT_EQ(run("measure " + config("triangle.json")).status, 2);  // --out is required
  EXPECT_EQ(run("verify --scale medium").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, BuiltinRoundTrip) {
  ASSERT_EQ(run("builtin triangle --p1 0.3 --out " + path("t.json")).status, 0);
  const auto again = run("builtin triangle --p1 0.3");
  EXPECT_EQ(again.out, slurp(path("t.json")));
  const auto j = nlohmann::json::parse(slurp(path("t.json")));
  EXPECT_EQ(j["maps"][0]["p"].get<double>(), 0.3);
  EXPECT_EQ(j["maps"][1]["p"].get<double>(), 1.0 - 0.3);
  EXPECT_EQ(slurp(config("triangle.json")), run("builtin triangle").out);
  EXPECT_EQ(run("builtin triangle --p1 1.5").status, 2);
}

TEST_F(Cli, VerifyExitCodeMatchesReport) {
  const auto r = run("verify --scale quick --json " + path("v.json"));
  const auto j = nlohmann::json::parse(slurp(path("v.json")));
  EXPECT_EQ(j["checks"].size(), 14u);
  EXPECT_EQ(r.status, j["passed"].get<bool>() ? 0 : 1) << r.out;
  for (const auto& c : j["checks"])
    EXPECT_NE(r.out.find((c["status"] == "PASS" ? "PASS " : "FAIL ") + c["id"].get<std::string>()), std::string::npos);
}
