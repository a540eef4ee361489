#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "polyrep/errors.hpp"
#include "polyrep/strategy_space.hpp"
#include "polyrep/types.hpp"

namespace polyrep {

enum class MeasureKind { Signed, Probability };

/// Finitely-supported measure: atom locations (columns of `points`) with real
/// weights. Probability measures carry the `Probability` kind, which is only
/// granted after validation (non-negative weights, unit mass within tol::kMass).
template <typename Scalar>
class DiscreteMeasure {
 public:
  DiscreteMeasure(StrategySpace<Scalar> space, Points<Scalar> points,
                  Vector<Scalar> weights,
                  MeasureKind kind = MeasureKind::Signed)
      : space_(std::move(space)),
        points_(std::move(points)),
        weights_(std::move(weights)),
        kind_(kind) {
    if (points_.size() == 0) points_.resize(space_.dimension(), 0);
    if (points_.rows() != space_.dimension())
      throw InvalidMeasure("atom dimension does not match the space");
    if (points_.cols() != weights_.size())
      throw InvalidMeasure("one weight per atom required");
    for (Eigen::Index i = 0; i < points_.cols(); ++i) {
      if (!space_.contains(points_.col(i)))
        throw OutOfSpace("atom " + std::to_string(i) + " lies outside S");
    }
    if (!weights_.allFinite()) throw InvalidMeasure("non-finite weight");
    if (kind_ == MeasureKind::Probability) validate_probability();
  }

  static DiscreteMeasure zero(const StrategySpace<Scalar>& space) {
    return DiscreteMeasure(space, Points<Scalar>(space.dimension(), 0),
                           Vector<Scalar>(0));
  }

  template <typename Derived>
  static DiscreteMeasure dirac(const StrategySpace<Scalar>& space,
                               const Eigen::MatrixBase<Derived>& at) {
    Points<Scalar> pts = at;
    Vector<Scalar> w = Vector<Scalar>::Ones(1);
    return DiscreteMeasure(space, std::move(pts), std::move(w),
                           MeasureKind::Probability);
  }

  const StrategySpace<Scalar>& space() const { return space_; }
  const Points<Scalar>& points() const { return points_; }
  const Vector<Scalar>& weights() const { return weights_; }
  MeasureKind kind() const { return kind_; }
  bool is_probability() const { return kind_ == MeasureKind::Probability; }

  Eigen::Index size() const { return weights_.size(); }
  bool empty() const { return weights_.size() == 0; }
  auto point(Eigen::Index i) const { return points_.col(i); }
  Scalar weight(Eigen::Index i) const { return weights_(i); }
  Scalar mass() const { return weights_.sum(); }

  /// Index of the atom coinciding with `x` (max-norm within tol::kMerge).
  template <typename Derived>
  std::optional<Eigen::Index> find(const Eigen::MatrixBase<Derived>& x) const {
    const auto merge = static_cast<Scalar>(tol::kMerge);
    for (Eigen::Index i = 0; i < points_.cols(); ++i) {
      if ((points_.col(i) - x).cwiseAbs().maxCoeff() <= merge) return i;
    }
    return std::nullopt;
  }

  template <typename Derived>
  Scalar mass_at(const Eigen::MatrixBase<Derived>& x) const {
    auto idx = find(x);
    return idx ? weights_(*idx) : Scalar(0);
  }

  /// Same atoms, new weights; kind re-validated.
  DiscreteMeasure with_weights(Vector<Scalar> w, MeasureKind kind) const {
    return DiscreteMeasure(space_, points_, std::move(w), kind);
  }

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.kind_ == b.kind_ && a.space_ == b.space_ &&
           a.points_.cols() == b.points_.cols() && a.points_ == b.points_ &&
           a.weights_ == b.weights_;
  }

 private:
  void validate_probability() const {
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
      if (weights_(i) < Scalar(0))
        throw NotAProbability("negative weight at atom " + std::to_string(i));
    }
    using std::abs;
    if (abs(weights_.sum() - Scalar(1)) > static_cast<Scalar>(tol::kMass))
      throw NotAProbability("total mass deviates from 1 beyond tolerance");
  }

  StrategySpace<Scalar> space_;
  Points<Scalar> points_;
  Vector<Scalar> weights_;
  MeasureKind kind_;
};

namespace detail {

template <typename Scalar>
bool lexicographic_less(const Points<Scalar>& pts, Eigen::Index a,
                        Eigen::Index b) {
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    if (pts(r, a) < pts(r, b)) return true;
    if (pts(r, b) < pts(r, a)) return false;
  }
  return false;
}

template <typename Scalar, typename Derived>
std::optional<Eigen::Index> find_column(const Points<Scalar>& pts,
                                        Eigen::Index used,
                                        const Eigen::MatrixBase<Derived>& x) {
  const auto merge = static_cast<Scalar>(tol::kMerge);
  for (Eigen::Index i = 0; i < used; ++i) {
    if ((pts.col(i) - x).cwiseAbs().maxCoeff() <= merge) return i;
  }
  return std::nullopt;
}

}  // namespace detail

/// Merge coincident atoms (summing weights), drop |weight| < tol::kDrop and sort
/// atoms lexicographically. The first atom of each merged cluster keeps its
/// coordinates, so every surviving pair is farther apart than tol::kMerge and a
/// second pass changes nothing.
template <typename Scalar>
DiscreteMeasure<Scalar> canonicalize(const DiscreteMeasure<Scalar>& m) {
  const Eigen::Index n = m.size();
  Points<Scalar> pts(m.space().dimension(), n);
  Vector<Scalar> w(n);
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (auto hit = detail::find_column(pts, used, m.point(i))) {
      w(*hit) += m.weight(i);
    } else {
      pts.col(used) = m.point(i);
      w(used) = m.weight(i);
      ++used;
    }
  }

  std::vector<Eigen::Index> keep;
  using std::abs;
  for (Eigen::Index i = 0; i < used; ++i) {
    if (abs(w(i)) >= static_cast<Scalar>(tol::kDrop)) keep.push_back(i);
  }
  std::stable_sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
    return detail::lexicographic_less<Scalar>(pts, a, b);
  });

  const auto k = static_cast<Eigen::Index>(keep.size());
  Points<Scalar> out_pts(pts.rows(), k);
  Vector<Scalar> out_w(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    out_pts.col(j) = pts.col(keep[j]);
    out_w(j) = w(keep[j]);
  }
  return DiscreteMeasure<Scalar>(m.space(), std::move(out_pts), std::move(out_w),
                                 m.kind());
}

/// Canonical signed measure from raw atoms.
template <typename Scalar>
DiscreteMeasure<Scalar> make_measure(const StrategySpace<Scalar>& space,
                                     Points<Scalar> points,
                                     Vector<Scalar> weights) {
  return canonicalize(
      DiscreteMeasure<Scalar>(space, std::move(points), std::move(weights)));
}

/// Canonical probability measure from raw atoms; throws NotAProbability.
template <typename Scalar>
DiscreteMeasure<Scalar> make_probability(const StrategySpace<Scalar>& space,
                                         Points<Scalar> points,
                                         Vector<Scalar> weights) {
  auto m = make_measure(space, std::move(points), std::move(weights));
  return m.with_weights(m.weights(), MeasureKind::Probability);
}

/// Convenience for one-dimensional spaces.
template <typename Scalar>
DiscreteMeasure<Scalar> make_probability_1d(const StrategySpace<Scalar>& space,
                                            std::initializer_list<Scalar> coords,
                                            std::initializer_list<Scalar> weights) {
  if (space.dimension() != 1)
    throw InvalidMeasure("make_probability_1d needs a one-dimensional space");
  Points<Scalar> pts(1, static_cast<Eigen::Index>(coords.size()));
  Vector<Scalar> w(static_cast<Eigen::Index>(weights.size()));
  Eigen::Index i = 0;
  for (Scalar c : coords) pts(0, i++) = c;
  i = 0;
  for (Scalar x : weights) w(i++) = x;
  return make_probability(space, std::move(pts), std::move(w));
}

/// Divide by total mass; result is tagged Probability.
template <typename Scalar>
DiscreteMeasure<Scalar> renormalize(const DiscreteMeasure<Scalar>& m) {
  const Scalar mass = m.mass();
  if (!(mass > Scalar(0))) throw NotAProbability("cannot renormalize zero mass");
  return m.with_weights(m.weights() / mass, MeasureKind::Probability);
}

/// Two measures expressed on the union of their supports.
template <typename Scalar>
struct Aligned {
  Points<Scalar> points;
  Vector<Scalar> first;
  Vector<Scalar> second;
};

template <typename Scalar>
Aligned<Scalar> align(const DiscreteMeasure<Scalar>& p,
                      const DiscreteMeasure<Scalar>& q) {
  require_same_space(p.space(), q.space(), "align");
  const Eigen::Index cap = p.size() + q.size();
  Aligned<Scalar> a{Points<Scalar>(p.space().dimension(), cap),
                    Vector<Scalar>::Zero(cap), Vector<Scalar>::Zero(cap)};
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    a.points.col(used) = p.point(i);
    a.first(used) = p.weight(i);
    ++used;
  }
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if (auto hit = detail::find_column(a.points, p.size(), q.point(j))) {
      a.second(*hit) += q.weight(j);
    } else {
      a.points.col(used) = q.point(j);
      a.second(used) = q.weight(j);
      ++used;
    }
  }
  a.points.conservativeResize(Eigen::NoChange, used);
  a.first.conservativeResize(used);
  a.second.conservativeResize(used);
  return a;
}

/// Atom-wise sum (signed; no dropping).
template <typename Scalar>
DiscreteMeasure<Scalar> operator+(const DiscreteMeasure<Scalar>& p,
                                  const DiscreteMeasure<Scalar>& q) {
  auto a = align(p, q);
  return DiscreteMeasure<Scalar>(p.space(), std::move(a.points),
                                 a.first + a.second);
}

template <typename Scalar>
DiscreteMeasure<Scalar> operator-(const DiscreteMeasure<Scalar>& p,
                                  const DiscreteMeasure<Scalar>& q) {
  auto a = align(p, q);
  return DiscreteMeasure<Scalar>(p.space(), std::move(a.points),
                                 a.first - a.second);
}

template <typename Scalar>
DiscreteMeasure<Scalar> operator*(Scalar s, const DiscreteMeasure<Scalar>& p) {
  return p.with_weights(s * p.weights(), MeasureKind::Signed);
}

/// ||p - q|| = 2 sup_B |p(B) - q(B)|, which for atoms is the L1 distance of
/// the weights over the union support.
template <typename Scalar>
Scalar variational_distance(const DiscreteMeasure<Scalar>& p,
                            const DiscreteMeasure<Scalar>& q) {
  require_same_space(p.space(), q.space(), "variational_distance");
  auto a = align(p, q);
  // Summing the sorted gaps makes the result independent of argument order.
  Vector<Scalar> gaps = (a.first - a.second).cwiseAbs();
  std::sort(gaps.begin(), gaps.end());
  return std::accumulate(gaps.begin(), gaps.end(), Scalar(0));
}

template <typename Scalar>
struct LebesgueDecomposition {
  DiscreteMeasure<Scalar> absolutely_continuous;  // q1, lives on supp(p)
  DiscreteMeasure<Scalar> singular;               // q2, disjoint from supp(p)
};

/// Split q into the part on supp(p) and the rest. Atoms are partitioned, not
/// recomputed, so q1 + q2 reproduces q's weights bit for bit.
template <typename Scalar>
LebesgueDecomposition<Scalar> lebesgue_decompose(
    const DiscreteMeasure<Scalar>& q, const DiscreteMeasure<Scalar>& p) {
  require_same_space(p.space(), q.space(), "lebesgue_decompose");
  std::vector<Eigen::Index> on, off;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    (p.find(q.point(i)) ? on : off).push_back(i);
  }
  auto take = [&](const std::vector<Eigen::Index>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Points<Scalar> pts(q.space().dimension(), k);
    Vector<Scalar> w(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      pts.col(j) = q.point(idx[j]);
      w(j) = q.weight(idx[j]);
    }
    return DiscreteMeasure<Scalar>(q.space(), std::move(pts), std::move(w));
  };
  return {take(on), take(off)};
}

/// V(Q) = sum_j alpha_j ln(alpha_j / Q({x_j})) over the atoms of P*.
/// Requires P* << Q: every atom of P* must carry Q-weight above
/// tol::kPositivityFloor.
template <typename Scalar>
Scalar kl_divergence(const DiscreteMeasure<Scalar>& pstar,
                     const DiscreteMeasure<Scalar>& q) {
  require_same_space(pstar.space(), q.space(), "kl_divergence");
  if (!pstar.is_probability() || !q.is_probability())
    throw NotAProbability("kl_divergence needs probability measures");
  using std::log1p;
  Scalar v(0);
  for (Eigen::Index j = 0; j < pstar.size(); ++j) {
    const Scalar alpha = pstar.weight(j);
    const auto idx = q.find(pstar.point(j));
    const Scalar qj = idx ? q.weight(*idx) : Scalar(0);
    if (!(qj > static_cast<Scalar>(tol::kPositivityFloor)))
      throw AbsoluteContinuityViolated("P* atom " + std::to_string(j) +
                                       " has no Q-mass");
    // ln(alpha/q) = -log1p((q - alpha)/alpha), accurate as q -> alpha.
    v -= alpha * log1p((qj - alpha) / alpha);
  }
  return v;
}

template <typename Scalar>
struct PinskerGap {
  Scalar lhs;  // ||Q - P*||^2
  Scalar rhs;  // V(Q)

  /// Classical Pinsker with the atom-wise L1 norm: ||.||^2 <= 2 V.
  bool classical_holds() const { return lhs <= Scalar(2) * rhs + Scalar(1e-12); }
  /// The un-factored form ||.||^2 <= V; reported, not guaranteed.
  bool unfactored_holds() const { return lhs <= rhs; }
};

template <typename Scalar>
PinskerGap<Scalar> pinsker_gap(const DiscreteMeasure<Scalar>& pstar,
                               const DiscreteMeasure<Scalar>& q) {
  const Scalar v = kl_divergence(pstar, q);
  const Scalar d = variational_distance(pstar, q);
  return {d * d, v};
}

}  // namespace polyrep
