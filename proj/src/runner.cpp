#include "polyrep/runner.hpp"

#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polyrep/errors.hpp"
#include "polyrep/payoff.hpp"
#include "polyrep/stability.hpp"

namespace polyrep {

namespace {

using json = nlohmann::ordered_json;

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json coords_json(const Points<double>& pts, Eigen::Index i) {
  json c = json::array();
  for (Eigen::Index r = 0; r < pts.rows(); ++r) c.push_back(pts(r, i));
  return c;
}

json measure_json(const Measure& m) {
  json atoms = json::array();
  for (Eigen::Index i = 0; i < m.size(); ++i)
    atoms.push_back({{"coords", coords_json(m.points(), i)}, {"weight", m.weight(i)}});
  return atoms;
}

json margin_json(const MarginReport<double>& r, const char* rule) {
  json j;
  j["verdict"] = r.verdict;
  j["rule"] = rule;
  j["tolerance"] = r.tolerance;
  j["n_samples"] = r.margins.size();
  if (r.argmin) {
    j["min_margin"] = r.min_margin;
    j["argmin"] = *r.argmin;
    j["argmin_sample"] = measure_json(*r.argmin_sample);
  } else {
    j["min_margin"] = nullptr;
  }
  j["basis"] = "empirical";
  return j;
}

json negdef_json(const NegDefReport<double>& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["c_estimate"] = r.c_estimate ? json(*r.c_estimate) : json(nullptr);
  j["witness_ratio"] = r.witness_ratio ? json(*r.witness_ratio) : json(nullptr);
  j["evaluated"] = r.evaluated;
  j["skipped"] = r.skipped;
  j["tolerance"] = r.tolerance;
  if (r.worst_sample) j["worst_sample"] = measure_json(*r.worst_sample);
  j["basis"] = "empirical";
  return j;
}

json certificate_json(const CertificateReport<double>& r) {
  json j;
  j["verdict"] = r.verdict();
  j["v_nonneg"] = r.v_nonneg;
  j["v_zero_at_target"] = r.v_zero_at_target;
  j["pinsker_factor2"] = r.pinsker_factor2;
  j["monotone_fraction"] = r.monotone_fraction;
  j["strict_fraction"] = r.strict_fraction;
  j["min_v"] = r.min_v;
  j["max_vdot_defect"] = r.max_vdot_defect;
  j["n_trajectories"] = r.n_trajectories;
  j["n_records"] = r.n_records;
  j["n_pairs"] = r.n_pairs;
  j["unchecked"] = "limit-interchange condition: no finite-sample analogue";
  j["basis"] = "empirical";
  return j;
}

json basin_json(const BasinReport<double>& r) {
  json j;
  j["verdict"] = r.verdict();
  j["n_runs"] = r.n_runs;
  j["tolerance"] = r.tolerance;
  j["max_final"] = r.max_final;
  j["mean_final"] = r.mean_final;
  j["min_final"] = r.min_final;
  j["max_excursion"] = r.max_excursion;
  j["max_excursion_growth"] = r.max_excursion_growth;
  j["initial_distances"] = r.initial_distances;
  j["final_distances"] = r.final_distances;
  j["basis"] = "empirical";
  return j;
}

json tolerances_json() {
  return {{"merge", tol::kMerge},           {"drop", tol::kDrop},
          {"mass", tol::kMass},             {"rest", tol::kRest},
          {"margin", tol::kMargin},         {"negdef", tol::kNegDef},
          {"negdef_skip", tol::kNegDefSkip}, {"step_cap", tol::kStepCap},
          {"v_nonneg", tol::kVNonneg},      {"v_zero", tol::kVZero},
          {"omega", tol::kOmega},           {"monotone", tol::kMonotone},
          {"basin_final", tol::kBasinFinal}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path legend_path_for(const std::filesystem::path& csv) {
  auto p = csv;
  return p.replace_extension(".atoms.json");
}

}  // namespace

std::string trajectory_csv(const Trajectory<double>& traj) {
  std::ostringstream out;
  const Eigen::Index n = traj.points().cols();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",w_" << (i + 1);
  out << ",V,dist,mass_err\n";
  for (std::size_t r = 0; r < traj.size(); ++r) {
    out << g17(traj.times[r]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << g17(traj.weights[r](i));
    if (traj.has_diagnostics())
      out << ',' << g17(traj.v_values[r]) << ',' << g17(traj.distances[r]);
    else
      out << ",,";
    out << ',' << g17(traj.mass_errors[r]) << '\n';
  }
  return out.str();
}

std::string atom_legend(const Trajectory<double>& traj) {
  json cols = json::array();
  for (Eigen::Index i = 0; i < traj.points().cols(); ++i)
    cols.push_back({{"column", "w_" + std::to_string(i + 1)},
                    {"coords", coords_json(traj.points(), i)}});
  return json{{"atoms", cols}}.dump(2) + "\n";
}

RunResult run_scenario(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig cfg = input;
  if (options.seed && cfg.neighborhood) cfg.neighborhood->seed = *options.seed;

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());

  RunResult result;
  result.report_path = options.out_dir / cfg.outputs.report;

  json report;
  report["name"] = cfg.name;
  report["scenario"] = serialize(cfg);
  report["tolerances"] = tolerances_json();
  json analyses = json::object();
  bool failed = false;
  bool errored = false;

  // Runs one analysis step; library errors are recorded in the report
  // instead of aborting the remaining steps.
  auto guarded = [&](const char* key, auto&& body) {
    try {
      body();
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      errored = true;
      analyses[key] = {{"status", "error"}, {"error", e.what()}};
    }
  };
  auto record = [&](const char* key, json j, bool pass) {
    j["status"] = pass ? "pass" : "fail";
    failed = failed || !pass;
    analyses[key] = std::move(j);
  };

  const Kernel kernel = cfg.build_kernel();
  const Measure& target = cfg.target;

  if (cfg.requests(Analysis::RestPoint)) {
    guarded("rest_point", [&] {
      const double residual = rest_point_residual(kernel, target);
      json rows = json::array();
      for (Eigen::Index i = 0; i < target.size(); ++i)
        rows.push_back(mean_payoff(kernel, target.point(i), target));
      record("rest_point",
             {{"rest_residual", residual},
              {"tolerance", tol::kRest},
              {"row_payoffs", rows},
              {"mean_payoff", expected_payoff(kernel, target, target)}},
             residual <= tol::kRest);
    });
  }

  const bool wants_samples = cfg.requests(Analysis::Uninvadable) ||
                             cfg.requests(Analysis::Unbeatable) ||
                             cfg.requests(Analysis::NegDef);
  if (wants_samples) {
    std::vector<Measure> samples;
    guarded("samples", [&] { samples = sample_neighborhood(target, *cfg.neighborhood); });
    const std::span<const Measure> view(samples);
    if (!analyses.contains("samples")) {
      if (cfg.requests(Analysis::Uninvadable)) {
        guarded("uninvadable", [&] {
          require_rest_point(kernel, target);
          const auto r = test_strong_uninvadability(kernel, target, view);
          record("uninvadable", margin_json(r, "min margin > tolerance"), r.verdict);
        });
      }
      if (cfg.requests(Analysis::Unbeatable)) {
        guarded("unbeatable", [&] {
          require_rest_point(kernel, target);
          const auto r = test_strong_unbeatability(kernel, target, view);
          record("unbeatable", margin_json(r, "min margin >= -tolerance"), r.verdict);
        });
      }
      if (cfg.requests(Analysis::NegDef)) {
        guarded("negdef", [&] {
          const auto r = estimate_negdef_constant(kernel, target, view, cfg.witness);
          record("negdef", negdef_json(r), r.verdict != NegDefVerdict::NotNegativeDefinite);
        });
      }
    }
  }

  if (cfg.initial && cfg.integrator) {
    guarded("simulation", [&] {
      const auto traj = integrate(kernel, *cfg.initial, *cfg.integrator,
                                  std::optional<Measure>(target));
      const auto csv_path = options.out_dir / cfg.outputs.trajectory_csv;
      const auto legend = legend_path_for(csv_path);
      write_file(csv_path, trajectory_csv(traj));
      write_file(legend, atom_legend(traj));
      result.trajectory_path = csv_path;
      result.legend_path = legend;

      analyses["simulation"] = {
          {"status", "done"},
          {"records", traj.size()},
          {"final_time", traj.times.back()},
          {"final_distance", traj.distances.back()},
          {"final_v", traj.v_values.back()},
          {"max_mass_error",
           *std::max_element(traj.mass_errors.begin(), traj.mass_errors.end())},
          {"final_state", measure_json(traj.final_state())},
          {"trajectory_csv", cfg.outputs.trajectory_csv},
          {"legend", legend_path_for(cfg.outputs.trajectory_csv).string()}};

      if (cfg.requests(Analysis::Certificate)) {
        guarded("certificate", [&] {
          const auto r = verify_lyapunov_certificate(
              kernel, target, std::span<const Trajectory<double>>(&traj, 1));
          record("certificate", certificate_json(r), r.verdict());
        });
      }
    });
  }

  if (cfg.requests(Analysis::Basin)) {
    guarded("basin", [&] {
      const auto basin = basin_probe(kernel, target, *cfg.neighborhood, *cfg.integrator);
      const auto cert = verify_lyapunov_certificate(
          kernel, target, std::span<const Trajectory<double>>(basin.trajectories));
      json j = basin_json(basin);
      j["certificate"] = certificate_json(cert);
      record("basin", std::move(j), basin.verdict() && cert.verdict());
    });
  }

  report["analyses"] = std::move(analyses);
  result.exit_status = errored ? 2 : failed ? 1 : 0;
  report["status"] = result.exit_status == 0   ? "pass"
                     : result.exit_status == 1 ? "fail"
                                               : "error";
  report["exit_status"] = result.exit_status;

  result.report = report.dump(2) + "\n";
  write_file(result.report_path, result.report);
  return result;
}

}  // namespace polyrep
