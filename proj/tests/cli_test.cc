#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DDCTL_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddctl_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(CliTest, StabilizationSucceeds) {
  const fs::path out = temp_dir("stab");
  const Result r = run("synth --scenario paper.stab --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("Hurwitz=true"), std::string::npos) << r.out;
  for (const char* f : {"data.csv", "ellipsoid.csv", "outcome.csv", "trace.csv", "report.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const Result c = run("certify --scenario paper.stab --in " + out.string());
  EXPECT_EQ(c.code, 0) << c.out;
}

TEST(CliTest, BaselineOnH2PatternIsInfeasible) {
  const fs::path out = temp_dir("h2_baseline");
  const Result r = run("synth --scenario paper.h2 --mode baseline --out " + out.string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("nfeasible"), std::string::npos) << r.out;
}

TEST(CliTest, MalformedPatternRowPointsAtTheLine) {
  const fs::path dir = temp_dir("bad");
  std::ofstream(dir / "bad.txt") << "preset = paper.stab\npattern.row1 = 0 1 1\n";
  const Result r = run("synth --scenario " + (dir / "bad.txt").string() + " --out " + dir.string());
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;
}

TEST(CliTest, UnknownSubcommandIsAUsageError) {
  EXPECT_EQ(run("frobnicate").code, 1);
}

}  // namespace
