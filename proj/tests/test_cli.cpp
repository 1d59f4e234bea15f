#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  fs::path dir;
};

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hsfem_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliRun run(const std::string& name, const std::string& args) {
  CliRun r;
  r.dir = fresh_dir(name);
  const std::string cmd = "cd '" + r.dir.string() + "' && '" + HSFEM_CLI + "' " + args +
                          " --out out > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Second data row, eigenvalue column.
double csv_value(const fs::path& p, int row) {
  std::ifstream in(p);
  std::string line;
  for (int i = 0; i <= row; ++i) std::getline(in, line);
  std::stringstream s(line);
  std::string index, value;
  std::getline(s, index, ',');
  std::getline(s, value, ',');
  return std::stod(value);
}

}  // namespace

TEST(Cli, SpectrumSquare) {
  const CliRun r = run("spectrum_square", "spectrum --domain square --h 0.05 -m 6");
  ASSERT_EQ(r.exit_code, 0);
  for (const char* f : {"neumann.csv", "dirichlet.csv", "operator_a.csv"})
    EXPECT_TRUE(fs::exists(r.dir / "out" / f)) << f;
  EXPECT_NEAR(csv_value(r.dir / "out/operator_a.csv", 1), 9.87, 0.1);
}

TEST(Cli, SpectrumDisk) {
  const CliRun r = run("spectrum_disk", "spectrum --domain disk:1 --h 0.05 -m 6");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NEAR(csv_value(r.dir / "out/operator_a.csv", 1), 3.39, 0.03);
  EXPECT_NEAR(csv_value(r.dir / "out/operator_a.csv", 2), 3.39, 0.03);
}

TEST(Cli, MalformedDomainFileWritesNothing) {
  const fs::path dir = fresh_dir("bad_file");
  std::ofstream(dir / "bad.txt") << "polygon\n0 0\n1 oops\n";
  const std::string cmd = "cd '" + dir.string() + "' && '" + HSFEM_CLI +
                          "' spectrum --domain file:bad.txt --out out 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 4);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_NE(slurp(dir / "stderr.txt").find("bad.txt:3"), std::string::npos);
}

TEST(Cli, VerifySquareAndDisk) {
  const CliRun sq = run("verify_square", "verify --domain square --h 0.05 -m 6 --tol-union 0.02");
  EXPECT_EQ(sq.exit_code, 0);
  const CliRun disk = run("verify_disk", "verify --domain disk:1 --h 0.05 -m 6");
  ASSERT_EQ(disk.exit_code, 0);
  const auto j = nlohmann::json::parse(slurp(disk.dir / "out/verify.json"));
  EXPECT_TRUE(j.at("friedlander").at("holds").get<bool>());
  EXPECT_TRUE(j.at("pass").at("all").get<bool>());
}

TEST(Cli, VerifyRejectsUnresolvedM) {
  const CliRun r = run("verify_coarse", "verify --domain square --h 0.2 -m 30");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(slurp(r.dir / "stderr.txt").find("mesh too coarse"), std::string::npos);
  EXPECT_FALSE(fs::exists(r.dir / "out/verify.json"));
}

TEST(Cli, HotspotsLipTriangle) {
  const CliRun r = run("hot_lip", "hotspots --domain polygon:lip_triangle --h 0.03 --vtk");
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(slurp(r.dir / "out/hotspots.json"));
  EXPECT_TRUE(j.at("report").at("max_location").at("on_boundary").get<bool>());
  EXPECT_TRUE(j.at("report").at("min_location").at("on_boundary").get<bool>());
  EXPECT_TRUE(fs::exists(r.dir / "out/hotspots.vtk"));
}

TEST(Cli, HotspotsDisk) { EXPECT_EQ(run("hot_disk", "hotspots --domain disk:1").exit_code, 0); }

TEST(Cli, RequireLipRejectsEllipse) {
  const CliRun r = run("hot_ellipse", "hotspots --domain ellipse:2,1 --require-lip");
  EXPECT_EQ(r.exit_code, 5);
  EXPECT_FALSE(fs::exists(r.dir / "out/hotspots.json"));
}

TEST(Cli, ConvergenceTable) {
  const CliRun r = run("conv", "convergence --domain square --h 0.1 --refinements 0");
  ASSERT_EQ(r.exit_code, 0);
  const std::string csv = slurp(r.dir / "out/convergence.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run("neg_h", "spectrum --domain square --h -1").exit_code, 4);
  EXPECT_EQ(run("bad_spec", "spectrum --domain hexagon").exit_code, 4);
  EXPECT_EQ(run("bad_flag", "spectrum --domain square --frobnicate").exit_code, 4);
  EXPECT_EQ(run("fine_mesh", "spectrum --domain square --h 1e-5").exit_code, 3);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path dir = fresh_dir("config");
  std::ofstream(dir / "run.toml") << "domain = \"disk:1\"\nh = 0.5\nm = 3\n";
  const std::string cmd = "cd '" + dir.string() + "' && '" + HSFEM_CLI +
                          "' spectrum --config run.toml --h 0.1 --out out 2> stderr.txt";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0) << slurp(dir / "stderr.txt");
  EXPECT_NEAR(csv_value(dir / "out/neumann.csv", 2), 3.39, 0.1);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
  const CliRun a = run("det_a", "spectrum --domain ellipse:2,1 --h 0.1 -m 6");
  const CliRun b = run("det_b", "spectrum --domain ellipse:2,1 --h 0.1 -m 6");
  ASSERT_EQ(a.exit_code, 0);
  ASSERT_EQ(b.exit_code, 0);
  for (const char* f : {"neumann.csv", "dirichlet.csv", "operator_a.csv"})
    EXPECT_EQ(slurp(a.dir / "out" / f), slurp(b.dir / "out" / f)) << f;
}
