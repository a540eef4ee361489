#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyrep/dynamics.hpp"
#include "polyrep/kernel.hpp"
#include "polyrep/measure.hpp"
#include "polyrep/stability.hpp"

namespace polyrep {

using Space = StrategySpace<double>;
using Measure = DiscreteMeasure<double>;
using Kernel = PayoffKernel<double>;

enum class Analysis { RestPoint, Uninvadable, Unbeatable, NegDef, Certificate, Basin };

const char* to_string(Analysis a);

struct KernelSpec {
  KernelVariant variant = KernelVariant::Linear2mzw;
  double a = 0, b = 0, c = 0, d = 0;  // AffineQuadratic
  Points<double> grid;                // GridTable, dim x n
  Matrix<double> table;               // GridTable, n x n
  double bound = 0;                   // resolved (declared or exact sup)

  friend bool operator==(const KernelSpec& x, const KernelSpec& y);
};

struct OutputSpec {
  std::string trajectory_csv;
  std::string report;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// A fully resolved experiment: every default filled in and every cross-field
/// invariant checked.
struct ScenarioConfig {
  std::string name;
  Space space;
  KernelSpec kernel;
  Measure target;
  std::optional<Measure> initial;
  std::optional<Measure> witness;
  std::optional<IntegratorConfig<double>> integrator;
  std::optional<NeighborhoodSpec<double>> neighborhood;
  std::vector<Analysis> analyses;  // canonical execution order, no repeats
  OutputSpec outputs;

  Kernel build_kernel() const;
  bool requests(Analysis a) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates a scenario document. `base_dir` resolves a GridTable
/// `table_csv` sidecar. Throws ParseError or ValidationError.
ScenarioConfig parse_scenario(std::string_view text,
                              const std::filesystem::path& base_dir = ".");

/// Emits a document that parse_scenario maps back to an equal config.
std::string serialize(const ScenarioConfig& cfg);

/// Loads a GridTable sidecar: first line n grid coordinates, then n rows of n
/// payoffs, comma separated.
void load_grid_csv(const std::filesystem::path& path, KernelSpec& spec);

struct Builtin {
  std::string_view name;
  std::string_view description;
  std::string_view text;
};

const std::vector<Builtin>& builtins();
const Builtin* find_builtin(std::string_view name);

}  // namespace polyrep
