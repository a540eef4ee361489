#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "polyrep/errors.hpp"
#include "polyrep/kernel.hpp"
#include "polyrep/measure.hpp"
#include "polyrep/payoff.hpp"

namespace polyrep {

enum class Method { Exponential, RK4 };

inline const char* to_string(Method m) {
  return m == Method::Exponential ? "exponential" : "rk4";
}

template <typename Scalar>
struct IntegratorConfig {
  Method method = Method::Exponential;
  Scalar dt{0.01};
  Scalar t_end{1};
  int record_every = 1;
  /// RK4 only; the exponential step always renormalizes.
  bool renormalize = true;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Throws InvalidIntegratorConfig or StepSizeTooLarge (dt > 0.1 / bound).
template <typename Scalar>
void validate(const IntegratorConfig<Scalar>& cfg, Scalar kernel_bound) {
  using std::isfinite;
  if (!(cfg.dt > Scalar(0)) || !isfinite(cfg.dt))
    throw InvalidIntegratorConfig("dt must be positive");
  if (!(cfg.t_end >= cfg.dt) || !isfinite(cfg.t_end))
    throw InvalidIntegratorConfig("t_end must be at least dt");
  if (cfg.record_every < 1)
    throw InvalidIntegratorConfig("record_every must be a positive integer");
  if (kernel_bound > Scalar(0)) {
    const Scalar cap = static_cast<Scalar>(tol::kStepCap) / kernel_bound;
    if (cfg.dt > cap * (Scalar(1) + Scalar(1e-12)))
      throw StepSizeTooLarge("dt = " + std::to_string(double(cfg.dt)) +
                             " exceeds 0.1/bound = " + std::to_string(double(cap)));
  }
}

/// Recorded solution of the replicator ODE. The atom set never changes, so the
/// locations are stored once and each record holds a weight vector.
template <typename Scalar>
class Trajectory {
 public:
  Trajectory(StrategySpace<Scalar> space, Points<Scalar> points, bool diagnostics)
      : space_(std::move(space)), points_(std::move(points)),
        diagnostics_(diagnostics) {}

  std::size_t size() const { return times.size(); }
  bool has_diagnostics() const { return diagnostics_; }
  const Points<Scalar>& points() const { return points_; }
  const StrategySpace<Scalar>& space() const { return space_; }

  DiscreteMeasure<Scalar> state(std::size_t i) const {
    return DiscreteMeasure<Scalar>(space_, points_, weights.at(i),
                                   MeasureKind::Probability);
  }
  DiscreteMeasure<Scalar> final_state() const { return state(size() - 1); }

  std::vector<Scalar> times;
  std::vector<Vector<Scalar>> weights;
  std::vector<Scalar> v_values;     // V(Q(t)); empty without a target
  std::vector<Scalar> distances;    // ||Q(t) - P*||; empty without a target
  std::vector<Scalar> mass_errors;  // |sum w - 1| before renormalization

 private:
  StrategySpace<Scalar> space_;
  Points<Scalar> points_;
  bool diagnostics_;
};

namespace detail {

/// sigma_i = (U w)_i - w . U w, for weights w summing to one.
template <typename Scalar>
Vector<Scalar> replicator_success(const Matrix<Scalar>& u, const Vector<Scalar>& w) {
  const Vector<Scalar> rows = u * w;
  return (rows.array() - w.dot(rows)).matrix();
}

template <typename Scalar>
Vector<Scalar> normalized(Vector<Scalar> w) {
  const Scalar s = w.sum();
  if (s != Scalar(1)) w /= s;
  return w;
}

/// One step of the multiplicative form w(t+h) = w(t) exp(int_t^{t+h} sigma),
/// with the exponent integrated by classical RK4 stages in log-weight space.
/// Returns the pre-normalization mass error.
template <typename Scalar>
Scalar exponential_step(const Matrix<Scalar>& u, Vector<Scalar>& w, Scalar h) {
  using Arr = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const Arr base = w.array();
  const Vector<Scalar> k1 = replicator_success(u, w);
  const Vector<Scalar> w2 = normalized<Scalar>((base * (Scalar(0.5) * h * k1.array()).exp()).matrix());
  const Vector<Scalar> k2 = replicator_success(u, w2);
  const Vector<Scalar> w3 = normalized<Scalar>((base * (Scalar(0.5) * h * k2.array()).exp()).matrix());
  const Vector<Scalar> k3 = replicator_success(u, w3);
  const Vector<Scalar> w4 = normalized<Scalar>((base * (h * k3.array()).exp()).matrix());
  const Vector<Scalar> k4 = replicator_success(u, w4);
  const Arr exponent = (h / Scalar(6)) *
                       (k1.array() + Scalar(2) * k2.array() + Scalar(2) * k3.array() + k4.array());
  w = (base * exponent.exp()).matrix();
  using std::abs;
  const Scalar err = abs(w.sum() - Scalar(1));
  w = normalized(std::move(w));
  return err;
}

template <typename Scalar>
Scalar rk4_step(const Matrix<Scalar>& u, Vector<Scalar>& w, Scalar h, bool renormalize) {
  auto field = [&](const Vector<Scalar>& x) -> Vector<Scalar> {
    return x.cwiseProduct(replicator_success(u, x));
  };
  const Vector<Scalar> k1 = field(w);
  const Vector<Scalar> k2 = field(w + Scalar(0.5) * h * k1);
  const Vector<Scalar> k3 = field(w + Scalar(0.5) * h * k2);
  const Vector<Scalar> k4 = field(w + h * k3);
  w += (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  if (w.size() > 0 && !(w.minCoeff() > Scalar(0)))
    throw IntegrationFailure("RK4 step drove a weight non-positive; reduce dt");
  using std::abs;
  const Scalar err = abs(w.sum() - Scalar(1));
  if (renormalize) w = normalized(std::move(w));
  return err;
}

}  // namespace detail

/// Per-atom derivatives d_i = q_i sigma(z_i, q).
template <typename Scalar>
Vector<Scalar> replicator_rhs(const PayoffKernel<Scalar>& k,
                              const DiscreteMeasure<Scalar>& q) {
  return q.weights().cwiseProduct(success_profile(k, q));
}

/// max_i |sum_j p_j u(x_i, x_j) - E(p, p)| over the atoms of p.
template <typename Scalar>
Scalar rest_point_residual(const PayoffKernel<Scalar>& k,
                           const DiscreteMeasure<Scalar>& p) {
  detail::require_probability(p, "rest_point_residual");
  if (p.empty()) return Scalar(0);
  return success_profile(k, p).cwiseAbs().maxCoeff();
}

/// Integrates the replicator ODE on the atoms of q0 from t = 0 to cfg.t_end.
/// With a target P*, each record also carries V(Q(t)) and ||Q(t) - P*||.
template <typename Scalar>
Trajectory<Scalar> integrate(const PayoffKernel<Scalar>& k,
                             const DiscreteMeasure<Scalar>& q0,
                             const IntegratorConfig<Scalar>& cfg,
                             const std::optional<DiscreteMeasure<Scalar>>& target =
                                 std::nullopt) {
  validate(cfg, k.bound());
  require_same_space(k.space(), q0.space(), "integrate");
  detail::require_probability(q0, "integrate");
  if (target) {
    require_same_space(q0.space(), target->space(), "integrate");
    detail::require_probability(*target, "integrate target");
    for (Eigen::Index j = 0; j < target->size(); ++j) {
      if (!(q0.mass_at(target->point(j)) > Scalar(0)))
        throw AbsoluteContinuityViolated(
            "supp(target) is not contained in supp(Q(0))");
    }
  }

  const Matrix<Scalar> u = payoff_matrix(k, q0.points(), q0.points());
  Trajectory<Scalar> traj(q0.space(), q0.points(), target.has_value());

  auto record = [&](Scalar t, const Vector<Scalar>& w, Scalar mass_err) {
    traj.times.push_back(t);
    traj.weights.push_back(w);
    traj.mass_errors.push_back(mass_err);
    if (target) {
      const auto q = traj.state(traj.size() - 1);
      traj.v_values.push_back(kl_divergence(*target, q));
      traj.distances.push_back(variational_distance(*target, q));
    }
  };

  using std::abs;
  using std::ceil;
  Vector<Scalar> w = q0.weights();
  record(Scalar(0), w, abs(w.sum() - Scalar(1)));

  const auto steps =
      static_cast<long long>(ceil(cfg.t_end / cfg.dt - Scalar(1e-9)));
  Scalar t_prev(0);
  for (long long i = 1; i <= steps; ++i) {
    const Scalar t = i == steps ? cfg.t_end : Scalar(i) * cfg.dt;
    const Scalar h = t - t_prev;
    const Scalar err = cfg.method == Method::Exponential
                           ? detail::exponential_step(u, w, h)
                           : detail::rk4_step(u, w, h, cfg.renormalize);
    if (!w.allFinite()) throw IntegrationFailure("non-finite weight");
    if (i % cfg.record_every == 0 || i == steps) record(t, w, err);
    t_prev = t;
  }
  return traj;
}

}  // namespace polyrep
