// polyrep: run replicator-dynamics scenarios and stability analyses.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "polyrep/errors.hpp"
#include "polyrep/runner.hpp"
#include "polyrep/scenario.hpp"

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

polyrep::ScenarioConfig load(const std::string& source) {
  if (source.rfind(kBuiltinPrefix, 0) == 0) {
    const auto name = source.substr(kBuiltinPrefix.size());
    const auto* b = polyrep::find_builtin(name);
    if (!b) throw polyrep::IoError("no builtin scenario named '" + name + "'");
    return polyrep::parse_scenario(b->text);
  }
  std::ifstream in(source);
  if (!in) throw polyrep::IoError("cannot read " + source);
  std::ostringstream text;
  text << in.rdbuf();
  const auto dir = std::filesystem::path(source).parent_path();
  return polyrep::parse_scenario(text.str(), dir.empty() ? "." : dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replicator dynamics simulator and stability verifier"};
  app.require_subcommand(1);

  std::string source;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario file or builtin:NAME");
  run->add_option("scenario", source, "Scenario file or builtin:NAME")->required();
  run->add_option("--out-dir", out_dir, "Directory for the report and trajectory");
  run->add_option("--seed", seed, "Override the neighborhood sampler seed");

  auto* list = app.add_subcommand("list-builtins", "List the embedded scenarios");

  std::string file;
  auto* check = app.add_subcommand("validate", "Parse and validate a scenario file");
  check->add_option("file", file, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& b : polyrep::builtins())
        std::cout << b.name << "\t" << b.description << "\n";
      return 0;
    }
    if (*check) {
      const auto cfg = load(file);
      std::cout << "ok: " << cfg.name << "\n";
      return 0;
    }
    const auto cfg = load(source);
    const auto result = polyrep::run_scenario(cfg, {out_dir, seed});
    std::cout << "report: " << result.report_path.string() << "\n";
    if (result.trajectory_path)
      std::cout << "trajectory: " << result.trajectory_path->string() << "\n";
    std::cout << "status: "
              << (result.exit_status == 0   ? "pass"
                  : result.exit_status == 1 ? "fail"
                                            : "error")
              << "\n";
    return result.exit_status;
  } catch (const polyrep::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
