#pragma once

#include <string>

#include "polyrep/errors.hpp"
#include "polyrep/types.hpp"

namespace polyrep {

/// Compact box S = prod_i [lower_i, upper_i] in R^d.
template <typename Scalar>
class StrategySpace {
 public:
  StrategySpace(Vector<Scalar> lower, Vector<Scalar> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() == 0 || lower_.size() != upper_.size())
      throw InvalidSpace("lower and upper must share a positive dimension");
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (!(lower_(i) < upper_(i)))
        throw InvalidSpace("lower < upper violated in coordinate " +
                           std::to_string(i));
    }
  }

  /// One-dimensional interval [lo, hi].
  static StrategySpace interval(Scalar lo, Scalar hi) {
    Vector<Scalar> l(1), u(1);
    l << lo;
    u << hi;
    return StrategySpace(std::move(l), std::move(u));
  }

  Eigen::Index dimension() const { return lower_.size(); }
  const Vector<Scalar>& lower() const { return lower_; }
  const Vector<Scalar>& upper() const { return upper_; }

  /// Inclusive, with a merge-tolerance allowance at the faces.
  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != dimension()) return false;
    const auto slack = static_cast<Scalar>(tol::kMerge);
    for (Eigen::Index i = 0; i < dimension(); ++i) {
      if (x(i) < lower_(i) - slack || x(i) > upper_(i) + slack) return false;
    }
    return true;
  }

  /// Largest |coordinate| reachable in each dimension.
  Vector<Scalar> radius() const {
    return lower_.cwiseAbs().cwiseMax(upper_.cwiseAbs());
  }

  friend bool operator==(const StrategySpace& a, const StrategySpace& b) {
    return a.lower_.size() == b.lower_.size() && a.lower_ == b.lower_ &&
           a.upper_ == b.upper_;
  }

 private:
  Vector<Scalar> lower_;
  Vector<Scalar> upper_;
};

template <typename Scalar>
void require_same_space(const StrategySpace<Scalar>& a,
                        const StrategySpace<Scalar>& b, const char* where) {
  if (!(a == b)) throw MismatchedSpaces(where);
}

}  // namespace polyrep
