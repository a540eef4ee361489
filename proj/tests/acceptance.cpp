// Acceptance suite: one PASS/FAIL line per criterion.
//
//   polyrep_acceptance               run every criterion
//   polyrep_acceptance --criterion N run criterion N only
//
// Exit status is 0 iff every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "polyrep/polyrep.hpp"
#include "polyrep/runner.hpp"
#include "polyrep/scenario.hpp"
#include "support.hpp"

namespace {

using namespace polyrep;
using namespace polyrep::testing;
namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;  // runtime limit; <= 0 means none
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

ScenarioConfig builtin(const char* name) { return parse_scenario(find_builtin(name)->text); }

IntegratorConfig<double> exp_cfg(double dt, double t_end) {
  IntegratorConfig<double> c;
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

Outcome example1_rest_point() {
  const auto cfg = builtin("example1");
  const auto k = cfg.build_kernel();
  const auto& p = cfg.target;
  bool rows_exact = true;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    rows_exact = rows_exact && mean_payoff(k, p.point(i), p) == 0.5;
  const double residual = rest_point_residual(k, p);
  return {rows_exact && residual <= 1e-12,
          std::string("rows exactly 1/2: ") + (rows_exact ? "yes" : "no") +
              ", residual " + fmt("%.3g", residual)};
}

Outcome example2_golden_values() {
  const auto k = kernel_2mzw();
  const auto p = pstar2();
  Gen g(2024);
  double worst_e = 0.0, worst_qq = 0.0;
  for (int i = 0; i < 100; ++i) {
    // Q = beta d_{-1} + gamma d_1 + (1 - beta - gamma) R, R on interior points.
    const double r_mass = g.uniform(0.01, 0.5);
    const double beta = g.uniform(0.0, 1.0 - r_mass);
    const double gamma = 1.0 - r_mass - beta;
    const int n = g.integer(1, 4);
    std::vector<double> xs, ws;
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      xs.push_back(g.uniform(-0.99, 0.99));
      ws.push_back(g.uniform(0.1, 1.0));
      total += ws.back();
    }
    double mu = 0.0;
    for (int j = 0; j < n; ++j) mu += ws[j] / total * xs[j];
    Points<double> pts(1, n + 2);
    Vector<double> w(n + 2);
    pts(0, 0) = -1.0;
    pts(0, 1) = 1.0;
    w(0) = beta;
    w(1) = gamma;
    for (int j = 0; j < n; ++j) {
      pts(0, j + 2) = xs[j];
      w(j + 2) = r_mass * ws[j] / total;
    }
    const auto q = make_probability(unit_box(), pts, w);
    for (double e : {expected_payoff(k, p, p), expected_payoff(k, p, q), expected_payoff(k, q, p)})
      worst_e = std::max(worst_e, std::abs(e - 2.0));
    const double m = gamma - beta + (1 - beta - gamma) * mu;
    worst_qq = std::max(worst_qq, std::abs(expected_payoff(k, q, q) - (2.0 - m * m)));
  }
  const auto witness = make_probability_1d(unit_box(), {-0.5, 0.5}, {0.5, 0.5});
  const double form = frechet_form(k, p, witness);
  return {worst_e <= 1e-12 && worst_qq <= 1e-12 && std::abs(form) <= 1e-12,
          "max |E - 2| " + fmt("%.3g", worst_e) + ", max E(Q,Q) error " + fmt("%.3g", worst_qq) +
              ", witness form " + fmt("%.3g", form)};
}

Outcome dynamic_convergence() {
  const auto traj = integrate(kernel_2mzw(), two_point(0.6, 0.4), exp_cfg(0.01, 10.0),
                              std::optional<Measure>(pstar2()));
  bool strictly_decreasing = true;
  for (std::size_t i = 1; i < traj.size(); ++i)
    strictly_decreasing = strictly_decreasing && traj.v_values[i] < traj.v_values[i - 1];
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (std::abs(t - 1.0) < 1e-9 || std::abs(t - 5.0) < 1e-9 || std::abs(t - 10.0) < 1e-9) {
      const auto& w = traj.weights[i];
      worst = std::max(worst, std::abs((w(1) - w(0)) - mean_2mzw(-0.2, t)));
    }
  }
  const double final_d = traj.distances.back();
  return {final_d < 1e-3 && strictly_decreasing && worst <= 1e-6,
          "final distance " + fmt("%.3g", final_d) + ", V strictly decreasing: " +
              (strictly_decreasing ? "yes" : "no") + ", max oracle gap " + fmt("%.3g", worst)};
}

Outcome basin() {
  const auto cfg = builtin("example2_basin");
  const auto k = cfg.build_kernel();
  const auto report = basin_probe(k, cfg.target, *cfg.neighborhood, *cfg.integrator);
  const auto cert = verify_lyapunov_certificate(
      k, cfg.target, std::span<const Trajectory<double>>(report.trajectories));
  return {report.n_runs == 50 && report.max_final < 1e-3 && cert.monotone_fraction == 1.0,
          std::to_string(report.n_runs) + " runs, max final distance " +
              fmt("%.3g", report.max_final) + " (min " + fmt("%.3g", report.min_final) +
              "), monotone fraction " + fmt("%.6g", cert.monotone_fraction)};
}

Outcome instability_contrast() {
  const auto cfg = builtin("coordination_zw");
  const auto k = cfg.build_kernel();
  const auto traj = integrate(k, *cfg.initial, exp_cfg(0.01, 15.0),
                              std::optional<Measure>(cfg.target));
  const auto margins = test_strong_unbeatability(k, cfg.target, *cfg.neighborhood);
  const double final_d = traj.distances.back();
  return {final_d > 0.5 && margins.min_margin < 0.0 && !margins.verdict,
          "final distance " + fmt("%.6g", final_d) + ", min margin " +
              fmt("%.3g", margins.min_margin)};
}

Outcome measure_properties() {
  Gen g(606);
  const auto s = unit_box();
  int sandwich = 0, pinsker = 0, kl = 0, metric = 0, lebesgue = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto pstar = g.measure_1d(s, 4);
    const auto q = g.superset_of(pstar, 3);
    const auto r = g.measure_1d(s, 4);

    if (distance_sandwich(pstar, q).holds()) ++sandwich;

    const auto gap = pinsker_gap(pstar, q);
    if (gap.lhs <= 2 * gap.rhs + 1e-12) ++pinsker;

    const double v = kl_divergence(pstar, q);
    const double d = variational_distance(pstar, q);
    const bool zero_iff_equal = (v == 0.0) == (d <= tol::kDrop);
    if (v >= 0.0 && zero_iff_equal && kl_divergence(pstar, pstar) == 0.0) ++kl;

    const double pq = d, qp = variational_distance(q, pstar);
    const double pr = variational_distance(pstar, r), qr = variational_distance(q, r);
    if (pq >= 0 && pq == qp && variational_distance(q, q) == 0.0 && pr <= pq + qr + 1e-15 &&
        (pq > tol::kDrop || pstar == q))
      ++metric;

    const auto [q1, q2] = lebesgue_decompose(q, pstar);
    const auto whole = canonicalize(q.with_weights(q.weights(), MeasureKind::Signed));
    if (canonicalize(q1 + q2) == whole) ++lebesgue;
  }
  const bool ok = sandwich == n && pinsker == n && kl == n && metric == n && lebesgue == n;
  std::ostringstream out;
  out << "passed of " << n << ": sandwich " << sandwich << ", pinsker " << pinsker << ", kl "
      << kl << ", metric " << metric << ", lebesgue " << lebesgue;
  return {ok, out.str()};
}

Outcome integrator_agreement() {
  double worst = 0.0;
  bool invariants = true;
  for (const char* name : {"example1", "example2"}) {
    const auto cfg = builtin(name);
    const auto k = cfg.build_kernel();
    IntegratorConfig<double> a = exp_cfg(1e-3, 1.0), b = exp_cfg(1e-3, 1.0);
    b.method = Method::RK4;
    const auto ta = integrate(k, *cfg.initial, a);
    const auto tb = integrate(k, *cfg.initial, b);
    worst = std::max(worst, variational_distance(ta.final_state(), tb.final_state()));
    for (const auto* t : {&ta, &tb}) {
      for (std::size_t i = 0; i < t->size(); ++i) {
        const auto& w = t->weights[i];
        invariants = invariants && w.size() == cfg.initial->size() && w.minCoeff() > 0.0 &&
                     std::abs(w.sum() - 1.0) <= 1e-9;
      }
    }
  }
  return {worst <= 1e-6 && invariants,
          "max distance at t=1 " + fmt("%.3g", worst) + ", support and mass preserved: " +
              (invariants ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "polyrep_acceptance_determinism";
  fs::remove_all(root);
  int identical = 0, total = 0;
  std::string mismatches;
  for (const auto& b : builtins()) {
    const auto cfg = parse_scenario(b.text);
    const auto x = run_scenario(cfg, {root / "a" / std::string(b.name), 17});
    const auto y = run_scenario(cfg, {root / "b" / std::string(b.name), 17});
    ++total;
    bool same = slurp(x.report_path) == slurp(y.report_path);
    if (x.trajectory_path)
      same = same && slurp(*x.trajectory_path) == slurp(*y.trajectory_path) &&
             slurp(*x.legend_path) == slurp(*y.legend_path);
    if (same)
      ++identical;
    else
      mismatches += " " + std::string(b.name);
  }
  fs::remove_all(root);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " builtins byte-identical" + mismatches};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "Example 1 rest point", 1e-3, example1_rest_point},
      {2, "Example 2 golden values", 0.1, example2_golden_values},
      {3, "Dynamic convergence for 2 - zw", 0.1, dynamic_convergence},
      {4, "Basin probe around the 2 - zw rest point", 5.0, basin},
      {5, "Instability contrast for u = zw", 1.0, instability_contrast},
      {6, "Measure property suite", 2.0, measure_properties},
      {7, "Integrator cross-validation", 0.0, integrator_agreement},
      {8, "Determinism of builtin runs", 0.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  bool all_pass = true;
  bool ran = false;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, {}};
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::string timing = fmt("%.4fs", secs);
    if (c.limit_s > 0) timing += " (limit " + fmt("%gs", c.limit_s) + ")";
    std::printf("[%s] C%d %s: %s; %s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), timing.c_str());
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
