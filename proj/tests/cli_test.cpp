#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef POLYREP_BIN
#error "POLYREP_BIN must name the polyrep executable"
#endif

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(POLYREP_BIN) + " " + args + " 2>&1";
  Outcome o{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[256];
  while (fgets(buf, sizeof buf, pipe)) o.out += buf;
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("polyrep_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, ListsBuiltins) {
  const auto o = run("list-builtins");
  EXPECT_EQ(o.status, 0);
  for (const char* name :
       {"example1", "example2", "example2_basin", "coordination_zw", "negdef_mzw"})
    EXPECT_NE(o.out.find(name), std::string::npos) << name;
}

TEST(Cli, RunBuiltinWritesArtifacts) {
  const auto dir = scratch("run");
  const auto o = run("run builtin:example1 --out-dir " + dir.string());
  EXPECT_EQ(o.status, 0) << o.out;
  EXPECT_TRUE(fs::exists(dir / "example1_report.json"));
  EXPECT_TRUE(fs::exists(dir / "example1_trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir / "example1_trajectory.atoms.json"));
}

TEST(Cli, ExitCodesFollowVerdicts) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run("run builtin:negdef_mzw --out-dir " + dir.string()).status, 0);
  EXPECT_EQ(run("run builtin:coordination_zw --seed 3 --out-dir " + dir.string()).status, 1);
  EXPECT_EQ(run("run builtin:missing --out-dir " + dir.string()).status, 2);
}

TEST(Cli, ValidateReportsFieldOnError) {
  const auto dir = scratch("validate");
  std::ofstream(dir / "good.txt") << "space { lower = 0 upper = 1 }\n"
                                     "kernel { variant = harvest_piecewise }\n"
                                     "target { atom { coords = 1 weight = 1 } }\n";
  std::ofstream(dir / "bad.txt") << "space { lower = 0 upper = 1 }\n"
                                    "target { atom { coords = 1 weight = 1 } }\n";
  EXPECT_EQ(run("validate " + (dir / "good.txt").string()).status, 0);
  const auto bad = run("validate " + (dir / "bad.txt").string());
  EXPECT_EQ(bad.status, 2);
  EXPECT_NE(bad.out.find("kernel"), std::string::npos);
}

TEST(Cli, RunsScenarioFile) {
  const auto dir = scratch("file");
  std::ofstream(dir / "s.txt") << "name = from_file\n"
                                  "space { lower = -1 upper = 1 }\n"
                                  "kernel { variant = linear_2mzw }\n"
                                  "target { atom { coords = -1 weight = 1/2 }"
                                  " atom { coords = 1 weight = 1/2 } }\n"
                                  "analyses = [rest_point]\n";
  const auto o = run("run " + (dir / "s.txt").string() + " --out-dir " + dir.string());
  EXPECT_EQ(o.status, 0) << o.out;
  EXPECT_TRUE(fs::exists(dir / "from_file_report.json"));
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(run("").status, 0);
  EXPECT_NE(run("run").status, 0);
}

}  // namespace
