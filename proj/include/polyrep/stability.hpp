#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "polyrep/dynamics.hpp"
#include "polyrep/errors.hpp"
#include "polyrep/kernel.hpp"
#include "polyrep/measure.hpp"
#include "polyrep/payoff.hpp"

namespace polyrep {

template <typename Scalar>
struct NeighborhoodSpec {
  Scalar epsilon{0.1};   // variational radius of the ball around P*
  int n_samples = 100;
  int mutant_grid = 8;   // grid points per axis carrying mutant mass
  std::uint64_t seed = 1;

  friend bool operator==(const NeighborhoodSpec&, const NeighborhoodSpec&) = default;
};

/// Portable uniform draws on top of mt19937_64, whose output sequence is fixed by
/// the standard (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on {0, ..., n-1}.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }
  /// Unit-rate exponential (a Gamma(1) draw for symmetric Dirichlet weights).
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
};

/// The threshold 2 min_j alpha_j below which every Q in the ball keeps supp(P*).
template <typename Scalar>
Scalar epsilon_threshold(const DiscreteMeasure<Scalar>& pstar) {
  return pstar.empty() ? Scalar(0) : Scalar(2) * pstar.weights().minCoeff();
}

template <typename Scalar>
void validate(const NeighborhoodSpec<Scalar>& spec,
              const DiscreteMeasure<Scalar>& pstar) {
  if (!pstar.is_probability() || pstar.empty())
    throw InvalidNeighborhood("P* must be a non-empty probability measure");
  if (spec.n_samples < 0) throw InvalidNeighborhood("n_samples must be >= 0");
  if (spec.mutant_grid < 1) throw InvalidNeighborhood("mutant_grid must be >= 1");
  const Scalar limit = epsilon_threshold(pstar);
  if (!(spec.epsilon > Scalar(0)) || !(spec.epsilon < limit))
    throw InvalidEpsilon("epsilon = " + std::to_string(double(spec.epsilon)) +
                         " must lie in (0, 2 min alpha = " +
                         std::to_string(double(limit)) + ")");
}

/// Cell midpoints of a per-axis grid over S, skipping points on supp(P*).
template <typename Scalar>
Points<Scalar> off_support_grid(const DiscreteMeasure<Scalar>& pstar, int per_axis) {
  const auto& space = pstar.space();
  const Eigen::Index d = space.dimension();
  Eigen::Index total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= per_axis;

  Points<Scalar> out(d, total);
  Eigen::Index used = 0;
  Vector<Scalar> x(d);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index cell = rem % per_axis;
      rem /= per_axis;
      const Scalar h = (space.upper()(i) - space.lower()(i)) / Scalar(per_axis);
      x(i) = space.lower()(i) + (Scalar(cell) + Scalar(0.5)) * h;
    }
    if (!pstar.find(x)) out.col(used++) = x;
  }
  out.conservativeResize(Eigen::NoChange, used);
  if (used == 0) throw InvalidNeighborhood("mutant grid lies entirely on supp(P*)");
  return out;
}

/// Both sides of the two-sided distance bound for Q = sum beta_j delta_{x_j} +
/// beta_{k+1} R around P* = sum alpha_j delta_{x_j}:
///   2 max_j |alpha_j - beta_j| <= ||Q - P*|| <=
///   2 max{ sum_j |alpha_j - beta_j|, 2 (1 - sum_j beta_j) }.
template <typename Scalar>
struct DistanceSandwich {
  Scalar lower;
  Scalar distance;
  Scalar upper;
  Scalar max_weight_gap;  // max_j |alpha_j - beta_j|
  Scalar off_support;     // 1 - sum_j beta_j

  bool holds(Scalar slack = Scalar(1e-12)) const {
    return lower <= distance + slack && distance <= upper + slack;
  }
};

template <typename Scalar>
DistanceSandwich<Scalar> distance_sandwich(const DiscreteMeasure<Scalar>& pstar,
                                           const DiscreteMeasure<Scalar>& q) {
  Scalar max_gap(0), sum_gap(0), on_support(0);
  using std::abs;
  using std::max;
  for (Eigen::Index j = 0; j < pstar.size(); ++j) {
    const Scalar beta = q.mass_at(pstar.point(j));
    const Scalar gap = abs(pstar.weight(j) - beta);
    max_gap = max(max_gap, gap);
    sum_gap += gap;
    on_support += beta;
  }
  const Scalar off = Scalar(1) - on_support;
  return {Scalar(2) * max_gap, variational_distance(pstar, q),
          Scalar(2) * max(sum_gap, Scalar(2) * off), max_gap, off};
}

/// Draws probability measures Q with ||Q - P*|| < epsilon and supp(Q) containing
/// supp(P*), each of the form sum_j beta_j delta_{x_j} + beta_{k+1} R with R on
/// the off-support grid. Weights on supp(P*) are alpha plus a uniform
/// perturbation of half-width epsilon/(2k), rescaled to leave mutant mass
/// beta_{k+1} ~ U[0, epsilon/4]; R puts symmetric-Dirichlet weights on a
/// uniformly chosen subset of grid points.
template <typename Scalar>
std::vector<DiscreteMeasure<Scalar>> sample_neighborhood(
    const DiscreteMeasure<Scalar>& pstar, const NeighborhoodSpec<Scalar>& spec) {
  validate(spec, pstar);
  std::vector<DiscreteMeasure<Scalar>> out;
  if (spec.n_samples == 0) return out;

  const Points<Scalar> grid = off_support_grid(pstar, spec.mutant_grid);
  const auto k = pstar.size();
  const auto g = static_cast<std::size_t>(grid.cols());
  const Scalar eps = spec.epsilon;
  Rng rng(spec.seed);
  std::vector<Eigen::Index> order(g);

  out.reserve(static_cast<std::size_t>(spec.n_samples));
  int failures = 0;
  while (out.size() < static_cast<std::size_t>(spec.n_samples)) {
    Vector<Scalar> base(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Scalar shift = Scalar(2 * rng.uniform() - 1) * eps / Scalar(2 * k);
      base(j) = pstar.weight(j) + shift;
    }
    const Scalar mutant_mass = Scalar(rng.uniform()) * eps / Scalar(4);
    const Vector<Scalar> beta = base / base.sum() * (Scalar(1) - mutant_mass);

    const std::size_t n_mut = 1 + rng.index(g);
    for (std::size_t i = 0; i < g; ++i) order[i] = static_cast<Eigen::Index>(i);
    for (std::size_t i = 0; i < n_mut; ++i) {
      std::swap(order[i], order[i + rng.index(g - i)]);
    }
    Vector<Scalar> dirichlet(static_cast<Eigen::Index>(n_mut));
    for (std::size_t i = 0; i < n_mut; ++i)
      dirichlet(static_cast<Eigen::Index>(i)) = Scalar(rng.exponential());
    dirichlet *= mutant_mass / dirichlet.sum();

    const Eigen::Index n = k + static_cast<Eigen::Index>(n_mut);
    Points<Scalar> pts(pstar.space().dimension(), n);
    Vector<Scalar> w(n);
    pts.leftCols(k) = pstar.points();
    w.head(k) = beta;
    for (std::size_t i = 0; i < n_mut; ++i) {
      pts.col(k + static_cast<Eigen::Index>(i)) = grid.col(order[i]);
      w(k + static_cast<Eigen::Index>(i)) = dirichlet(static_cast<Eigen::Index>(i));
    }
    auto q = make_probability(pstar.space(), std::move(pts), std::move(w));

    bool keeps_support = true;
    for (Eigen::Index j = 0; j < k; ++j)
      keeps_support = keeps_support && q.mass_at(pstar.point(j)) > Scalar(0);
    if (keeps_support && variational_distance(pstar, q) < eps) {
      out.push_back(std::move(q));
      failures = 0;
    } else if (++failures >= 1000) {
      throw SamplingExhausted("1000 consecutive rejections");
    }
  }
  return out;
}

/// E(P*, Q) - E(Q, Q): the quantity strong uninvadability (> 0) and strong
/// unbeatability (>= 0) constrain, and minus the Lyapunov derivative.
template <typename Scalar>
Scalar invasion_margin(const PayoffKernel<Scalar>& k,
                       const DiscreteMeasure<Scalar>& pstar,
                       const DiscreteMeasure<Scalar>& q) {
  return expected_payoff(k, pstar, q) - expected_payoff(k, q, q);
}

template <typename Scalar>
void require_rest_point(const PayoffKernel<Scalar>& k,
                        const DiscreteMeasure<Scalar>& pstar) {
  const Scalar r = rest_point_residual(k, pstar);
  if (!(r <= static_cast<Scalar>(tol::kRest)))
    throw NotARestPoint("rest-point residual " + std::to_string(double(r)) +
                        " exceeds " + std::to_string(tol::kRest));
}

template <typename Scalar>
struct MarginReport {
  Scalar min_margin = std::numeric_limits<Scalar>::infinity();
  std::optional<std::size_t> argmin;
  std::optional<DiscreteMeasure<Scalar>> argmin_sample;
  std::vector<Scalar> margins;
  Scalar tolerance{0};
  bool verdict = true;  // empirical: no counterexample among the samples
};

namespace detail {

template <typename Scalar>
MarginReport<Scalar> scan_margins(const PayoffKernel<Scalar>& k,
                                  const DiscreteMeasure<Scalar>& pstar,
                                  std::span<const DiscreteMeasure<Scalar>> samples) {
  require_rest_point(k, pstar);
  MarginReport<Scalar> r;
  r.margins.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Scalar m = invasion_margin(k, pstar, samples[i]);
    r.margins.push_back(m);
    if (!r.argmin || m < r.min_margin) {
      r.min_margin = m;
      r.argmin = i;
    }
  }
  if (r.argmin) r.argmin_sample = samples[*r.argmin];
  return r;
}

}  // namespace detail

/// Empirical strong uninvadability: min over samples of E(P*,Q) - E(Q,Q) must
/// exceed tol::kMargin.
template <typename Scalar>
MarginReport<Scalar> test_strong_uninvadability(
    const PayoffKernel<Scalar>& k, const DiscreteMeasure<Scalar>& pstar,
    std::span<const DiscreteMeasure<Scalar>> samples) {
  auto r = detail::scan_margins(k, pstar, samples);
  r.tolerance = static_cast<Scalar>(tol::kMargin);
  r.verdict = !r.argmin || r.min_margin > r.tolerance;
  return r;
}

template <typename Scalar>
MarginReport<Scalar> test_strong_uninvadability(const PayoffKernel<Scalar>& k,
                                                const DiscreteMeasure<Scalar>& pstar,
                                                const NeighborhoodSpec<Scalar>& spec) {
  const auto samples = sample_neighborhood(pstar, spec);
  return test_strong_uninvadability<Scalar>(k, pstar, samples);
}

/// Empirical strong unbeatability: every sampled margin >= -tol::kMargin.
template <typename Scalar>
MarginReport<Scalar> test_strong_unbeatability(
    const PayoffKernel<Scalar>& k, const DiscreteMeasure<Scalar>& pstar,
    std::span<const DiscreteMeasure<Scalar>> samples) {
  auto r = detail::scan_margins(k, pstar, samples);
  r.tolerance = static_cast<Scalar>(tol::kMargin);
  r.verdict = !r.argmin || r.min_margin >= -r.tolerance;
  return r;
}

template <typename Scalar>
MarginReport<Scalar> test_strong_unbeatability(const PayoffKernel<Scalar>& k,
                                               const DiscreteMeasure<Scalar>& pstar,
                                               const NeighborhoodSpec<Scalar>& spec) {
  const auto samples = sample_neighborhood(pstar, spec);
  return test_strong_unbeatability<Scalar>(k, pstar, samples);
}

enum class NegDefVerdict { NegativeDefinite, NotNegativeDefinite, NotApplicable };

inline const char* to_string(NegDefVerdict v) {
  switch (v) {
    case NegDefVerdict::NegativeDefinite: return "negative definite (empirical)";
    case NegDefVerdict::NotNegativeDefinite: return "not negative definite";
    case NegDefVerdict::NotApplicable: return "not applicable";
  }
  return "?";
}

template <typename Scalar>
struct NegDefReport {
  std::optional<Scalar> c_estimate;
  std::optional<DiscreteMeasure<Scalar>> worst_sample;
  std::optional<Scalar> witness_ratio;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  Scalar tolerance = static_cast<Scalar>(tol::kNegDef);
  NegDefVerdict verdict = NegDefVerdict::NotApplicable;
};

/// r(Q) = -frechet_form(P*, Q) / ||Q - P*||^2, or nothing when Q is within
/// tol::kNegDefSkip of P*.
template <typename Scalar>
std::optional<Scalar> negdef_ratio(const PayoffKernel<Scalar>& k,
                                   const DiscreteMeasure<Scalar>& pstar,
                                   const DiscreteMeasure<Scalar>& q) {
  const Scalar d = variational_distance(pstar, q);
  if (d < static_cast<Scalar>(tol::kNegDefSkip)) return std::nullopt;
  return Scalar(0) - frechet_form(k, pstar, q) / (d * d);
}

/// Estimates the largest c with form <= -c ||Q - P*||^2 as the minimum ratio
/// over the samples and the optional designated witness.
template <typename Scalar>
NegDefReport<Scalar> estimate_negdef_constant(
    const PayoffKernel<Scalar>& k, const DiscreteMeasure<Scalar>& pstar,
    std::span<const DiscreteMeasure<Scalar>> samples,
    const std::optional<DiscreteMeasure<Scalar>>& witness = std::nullopt) {
  require_rest_point(k, pstar);
  NegDefReport<Scalar> r;
  auto consider = [&](const DiscreteMeasure<Scalar>& q) -> std::optional<Scalar> {
    const auto ratio = negdef_ratio(k, pstar, q);
    if (!ratio) {
      ++r.skipped;
      return ratio;
    }
    ++r.evaluated;
    if (!r.c_estimate || *ratio < *r.c_estimate) {
      r.c_estimate = *ratio;
      r.worst_sample = q;
    }
    return ratio;
  };
  for (const auto& q : samples) consider(q);
  if (witness) r.witness_ratio = consider(*witness);

  if (r.c_estimate)
    r.verdict = *r.c_estimate > r.tolerance ? NegDefVerdict::NegativeDefinite
                                            : NegDefVerdict::NotNegativeDefinite;
  return r;
}

template <typename Scalar>
NegDefReport<Scalar> estimate_negdef_constant(
    const PayoffKernel<Scalar>& k, const DiscreteMeasure<Scalar>& pstar,
    const NeighborhoodSpec<Scalar>& spec,
    const std::optional<DiscreteMeasure<Scalar>>& witness = std::nullopt) {
  const auto samples = sample_neighborhood(pstar, spec);
  return estimate_negdef_constant<Scalar>(k, pstar, samples, witness);
}

/// Empirical check of the Lyapunov-function hypotheses along computed
/// trajectories, with comparison function omega(s) = s^2 / 2:
///   (i)   V >= 0 on every record and V = 0 where Q = P*;
///   (ii)  omega(||Q - P*||) <= V;
///   (iii) V non-increasing between consecutive records (strict decrease is
///         reported separately).
/// The limit-interchange hypothesis of the asymptotic theorem has no
/// finite-sample analogue and is not checked.
template <typename Scalar>
struct CertificateReport {
  bool v_nonneg = true;
  bool v_zero_at_target = true;
  bool pinsker_factor2 = true;
  Scalar monotone_fraction{1};
  Scalar strict_fraction{1};
  Scalar min_v = std::numeric_limits<Scalar>::infinity();
  /// max |(V(t_{i+1}) - V(t_i)) / dt_i + margin(Q(t_i))|; O(dt) when the
  /// derivative identity dV/dt = -(E(P*,Q) - E(Q,Q)) holds.
  Scalar max_vdot_defect{0};
  std::size_t n_trajectories = 0;
  std::size_t n_records = 0;
  std::size_t n_pairs = 0;

  bool verdict() const {
    return v_nonneg && v_zero_at_target && pinsker_factor2 &&
           monotone_fraction == Scalar(1);
  }
};

template <typename Scalar>
CertificateReport<Scalar> verify_lyapunov_certificate(
    const PayoffKernel<Scalar>& k, const DiscreteMeasure<Scalar>& pstar,
    std::span<const Trajectory<Scalar>> trajectories) {
  CertificateReport<Scalar> r;
  using std::abs;
  using std::max;
  using std::min;
  const auto s = [](double x) { return static_cast<Scalar>(x); };

  if (!(kl_divergence(pstar, pstar) <= s(tol::kVZero))) r.v_zero_at_target = false;

  std::size_t monotone = 0, strict = 0;
  for (const auto& traj : trajectories) {
    if (!traj.has_diagnostics() || traj.v_values.size() != traj.size() ||
        traj.distances.size() != traj.size())
      throw MissingDiagnostics("trajectory lacks V / distance channels");
    if (traj.size() == 0) continue;
    if (abs(kl_divergence(pstar, traj.state(0)) - traj.v_values[0]) >
        s(1e-12) * (Scalar(1) + abs(traj.v_values[0])))
      throw MissingDiagnostics("trajectory diagnostics were not computed against P*");

    ++r.n_trajectories;
    r.n_records += traj.size();
    Scalar margin_prev = invasion_margin(k, pstar, traj.state(0));
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const Scalar v = traj.v_values[i];
      const Scalar d = traj.distances[i];
      r.min_v = min(r.min_v, v);
      if (v < -s(tol::kVNonneg)) r.v_nonneg = false;
      if (d <= s(tol::kDrop) && v > s(tol::kVZero)) r.v_zero_at_target = false;
      if (d * d / Scalar(2) > v + s(tol::kOmega)) r.pinsker_factor2 = false;
      if (i + 1 < traj.size()) {
        const Scalar v_next = traj.v_values[i + 1];
        ++r.n_pairs;
        if (v_next <= v + s(tol::kMonotone)) ++monotone;
        if (v_next < v) ++strict;
        const Scalar slope = (v_next - v) / (traj.times[i + 1] - traj.times[i]);
        r.max_vdot_defect = max(r.max_vdot_defect, abs(slope + margin_prev));
        margin_prev = invasion_margin(k, pstar, traj.state(i + 1));
      }
    }
  }
  if (r.n_pairs > 0) {
    r.monotone_fraction = Scalar(monotone) / Scalar(r.n_pairs);
    r.strict_fraction = Scalar(strict) / Scalar(r.n_pairs);
  }
  return r;
}

template <typename Scalar>
struct BasinReport {
  std::size_t n_runs = 0;
  std::vector<Scalar> initial_distances;
  std::vector<Scalar> excursions;  // max_t ||Q(t) - P*|| per run
  std::vector<Scalar> final_distances;
  Scalar max_excursion{0};
  Scalar max_excursion_growth{0};  // max over runs of excursion - initial distance
  Scalar max_final{0};
  Scalar mean_final{0};
  Scalar min_final{0};
  Scalar tolerance = static_cast<Scalar>(tol::kBasinFinal);
  std::vector<Trajectory<Scalar>> trajectories;

  bool verdict() const { return n_runs == 0 || max_final < tolerance; }
};

/// Integrates from every sampled Q(0) in the epsilon-ball and summarizes
/// excursion and final distance to P*.
template <typename Scalar>
BasinReport<Scalar> basin_probe(const PayoffKernel<Scalar>& k,
                                const DiscreteMeasure<Scalar>& pstar,
                                const NeighborhoodSpec<Scalar>& spec,
                                const IntegratorConfig<Scalar>& cfg,
                                bool keep_trajectories = true) {
  validate(cfg, k.bound());
  const auto samples = sample_neighborhood(pstar, spec);
  BasinReport<Scalar> r;
  r.n_runs = samples.size();
  using std::max;
  using std::min;
  Scalar sum(0);
  r.min_final = std::numeric_limits<Scalar>::infinity();
  for (const auto& q0 : samples) {
    auto traj = integrate(k, q0, cfg, std::optional<DiscreteMeasure<Scalar>>(pstar));
    const Scalar excursion =
        *std::max_element(traj.distances.begin(), traj.distances.end());
    const Scalar final_d = traj.distances.back();
    r.initial_distances.push_back(traj.distances.front());
    r.excursions.push_back(excursion);
    r.final_distances.push_back(final_d);
    r.max_excursion = max(r.max_excursion, excursion);
    r.max_excursion_growth = max(r.max_excursion_growth, excursion - traj.distances.front());
    r.max_final = max(r.max_final, final_d);
    r.min_final = min(r.min_final, final_d);
    sum += final_d;
    if (keep_trajectories) r.trajectories.push_back(std::move(traj));
  }
  if (r.n_runs > 0) {
    r.mean_final = sum / Scalar(r.n_runs);
  } else {
    r.min_final = Scalar(0);
  }
  return r;
}

/// Aggregate of every analysis requested for one rest point.
template <typename Scalar>
struct StabilityReport {
  std::optional<Scalar> rest_residual;
  std::optional<MarginReport<Scalar>> uninvadable;
  std::optional<MarginReport<Scalar>> unbeatable;
  std::optional<NegDefReport<Scalar>> negdef;
  std::optional<CertificateReport<Scalar>> certificate;
  std::optional<BasinReport<Scalar>> basin;
  std::optional<CertificateReport<Scalar>> basin_certificate;
};

}  // namespace polyrep
