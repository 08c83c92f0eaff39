#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("tiedown_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(TIEDOWN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out_flag() { return "--out " + scratch_dir().string(); }

}  // namespace

TEST(Cli, StableDensityWritesReport) {
  ASSERT_EQ(run(out_flag() + " --name sd stable-density --alpha 0.5 --scale 1 --ymax 20"), 0);
  const auto dir = scratch_dir() / "stable-density" / "sd";
  for (const char* f : {"params.echo", "density.csv", "density.svg", "summary.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto summary = slurp(dir / "summary.csv");
  EXPECT_EQ(summary.rfind("experiment,n,metric,value,tolerance,pass\n", 0), 0u);
  EXPECT_NE(summary.find("max_abs_err_vs_levy"), std::string::npos);
  EXPECT_NE(summary.find(",true"), std::string::npos);
  EXPECT_NE(slurp(dir / "params.echo").find("stable-density.ymax=20"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--bogus stable-density"), 2);
  EXPECT_EQ(run(out_flag() + " renewal-lld --alpha 1.5"), 2);
  EXPECT_EQ(run(out_flag() + " renewal-lld --n 100000"), 3);
  EXPECT_EQ(run(out_flag() + " --name tiny bpy-table --samples 2000 --dump 10"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, ReproducibleAcrossWorkerCounts) {
  ASSERT_EQ(run(out_flag() + " --seed 5 --workers 1 --name w1 renewal-bridge --n 1024 --accepted 500"), 0);
  ASSERT_EQ(run(out_flag() + " --seed 5 --workers 3 --name w3 renewal-bridge --n 1024 --accepted 500"), 0);
  const auto base = scratch_dir() / "renewal-bridge";
  EXPECT_EQ(slurp(base / "w1" / "summary.csv"), slurp(base / "w3" / "summary.csv"));
  EXPECT_EQ(slurp(base / "w1" / "bridge.csv"), slurp(base / "w3" / "bridge.csv"));
  // 3000 orbits are too few for the 0.02 arcsine tolerance; only the bytes matter here.
  const int rc = run(out_flag() + " --seed 5 --name m1 map-arcsine --n 500 --orbits 3000");
  EXPECT_EQ(run(out_flag() + " --seed 5 --workers 2 --name m2 map-arcsine --n 500 --orbits 3000"), rc);
  EXPECT_EQ(slurp(scratch_dir() / "map-arcsine" / "m1" / "summary.csv"),
            slurp(scratch_dir() / "map-arcsine" / "m2" / "summary.csv"));
  EXPECT_EQ(slurp(scratch_dir() / "map-arcsine" / "m1" / "occupation.csv"),
            slurp(scratch_dir() / "map-arcsine" / "m2" / "occupation.csv"));
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = scratch_dir() / "lld.toml";
  std::ofstream(cfg) << "seed = 11\n[renewal-lld]\nn = [256, 512]\nk = [1, 2]\n";
  ASSERT_EQ(run("--config " + cfg.string() + " " + out_flag() + " --name cfg renewal-lld --k 4"), 0);
  const auto dir = scratch_dir() / "renewal-lld" / "cfg";
  const auto echo = slurp(dir / "params.echo");
  EXPECT_NE(echo.find("seed=11"), std::string::npos);
  EXPECT_NE(echo.find("renewal-lld.k=4"), std::string::npos);
  const auto csv = slurp(dir / "lld.csv");
  EXPECT_NE(csv.find("512,4,"), std::string::npos);
  EXPECT_EQ(csv.find(",1,"), std::string::npos);
}

TEST(Cli, MapSpecFile) {
  const auto spec = scratch_dir() / "three.map";
  std::ofstream(spec) << "map polynomial\nalpha 0.5\nbreaks 0.3 0.7\n";
  ASSERT_EQ(run(out_flag() + " --name gen map-returns --map " + spec.string() + " --samples 50000 --horizon 1024"), 0);
  const auto csv = slurp(scratch_dir() / "map-returns" / "gen" / "returns.csv");
  EXPECT_EQ(csv.rfind("n,tail1,tail2,tail3\n", 0), 0u);
  EXPECT_EQ(run(out_flag() + " map-returns --map " + (scratch_dir() / "missing.map").string()), 3);
}
