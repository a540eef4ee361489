#pragma once

#include <Eigen/Dense>

namespace polyrep {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Atom locations, one column per atom (rows = strategy-space dimension).
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace tol {

/// Two atoms coincide when their max-norm coordinate distance is within this.
inline constexpr double kMerge = 1e-9;
/// Atoms with |weight| below this are dropped by canonicalization.
inline constexpr double kDrop = 1e-12;
/// Allowed deviation of total mass from 1 for probability measures.
inline constexpr double kMass = 1e-9;
/// Smallest q-weight accepted on supp(P*) when evaluating the KL divergence.
inline constexpr double kPositivityFloor = 1e-300;

inline constexpr double kRest = 1e-10;
inline constexpr double kMargin = 1e-10;
inline constexpr double kNegDef = 1e-8;
/// Samples closer than this to P* are skipped when estimating the c constant.
inline constexpr double kNegDefSkip = 1e-9;

/// Integrator step cap: dt <= kStepCap / kernel bound.
inline constexpr double kStepCap = 0.1;

/// Certificate slacks.
inline constexpr double kVNonneg = 1e-12;
inline constexpr double kVZero = 1e-12;
inline constexpr double kOmega = 1e-9;
inline constexpr double kMonotone = 1e-9;

/// Basin verdict: every probe must end this close to P*.
inline constexpr double kBasinFinal = 1e-3;

}  // namespace tol

}  // namespace polyrep
