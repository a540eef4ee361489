#pragma once

// Shared generators and independent oracles for the test suites. Oracles here
// never call the library's payoff or distance code; they recompute from raw
// atoms with plain loops so that agreement means something.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "polyrep/polyrep.hpp"

namespace polyrep::testing {

using Space = StrategySpace<double>;
using Measure = DiscreteMeasure<double>;
using Kernel = PayoffKernel<double>;

inline Vector<double> pt(double x) { return Vector<double>::Constant(1, x); }

inline Space unit_box() { return Space::interval(-1.0, 1.0); }

inline Measure two_point(double at_minus, double at_plus) {
  return make_probability_1d(unit_box(), {-1.0, 1.0}, {at_minus, at_plus});
}

inline Measure pstar2() { return two_point(0.5, 0.5); }

/// Deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Random probability on 1..max_atoms distinct 1-D points of [lo, hi].
  Measure measure_1d(const Space& s, int max_atoms) {
    const int n = integer(1, max_atoms);
    Points<double> pts(1, n);
    Vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      pts(0, i) = uniform(s.lower()(0), s.upper()(0));
      w(i) = uniform(0.05, 1.0);
    }
    return make_probability(s, pts, Vector<double>(w / w.sum()));
  }

  /// Random probability whose support contains every atom of `base`, plus
  /// up to `extra` further atoms.
  Measure superset_of(const Measure& base, int extra) {
    const int n_extra = integer(0, extra);
    const auto k = base.size();
    Points<double> pts(base.space().dimension(), k + n_extra);
    Vector<double> w(k + n_extra);
    pts.leftCols(k) = base.points();
    for (Eigen::Index j = 0; j < k; ++j) w(j) = uniform(0.05, 1.0);
    for (int i = 0; i < n_extra; ++i) {
      pts(0, k + i) = uniform(base.space().lower()(0), base.space().upper()(0));
      w(k + i) = uniform(0.0, 1.0);
    }
    return make_probability(base.space(), pts, Vector<double>(w / w.sum()));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct Atom {
  double x;
  double w;
};

inline std::vector<Atom> atoms(const Measure& m) {
  std::vector<Atom> out;
  for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back({m.point(i)(0), m.weight(i)});
  return out;
}

/// Direct double sum over raw 1-D atoms.
template <typename U>
double double_sum(U u, const std::vector<Atom>& p, const std::vector<Atom>& q) {
  double s = 0.0;
  for (const auto& a : p)
    for (const auto& b : q) s += a.w * b.w * u(a.x, b.x);
  return s;
}

/// Atom-wise L1 distance by coordinate-keyed accumulation.
inline double l1_oracle(const Measure& p, const Measure& q) {
  std::map<double, double> diff;
  for (const auto& a : atoms(p)) diff[a.x] += a.w;
  for (const auto& b : atoms(q)) diff[b.x] -= b.w;
  double s = 0.0;
  for (const auto& [x, d] : diff) s += std::abs(d);
  return s;
}

inline double mean_1d(const Measure& m) {
  double s = 0.0;
  for (const auto& a : atoms(m)) s += a.w * a.x;
  return s;
}

inline double u_2mzw(double z, double w) { return 2.0 - z * w; }
inline double u_harvest(double z, double w) { return z < w ? w : z - w; }

/// Exact solution of m' = m(m^2 - 1), the mean of a two-atom {-1, 1} state
/// under u = 2 - zw.
inline double mean_2mzw(double m0, double t) {
  const double c = (1.0 - m0 * m0) / (m0 * m0);
  return std::copysign(1.0, m0) / std::sqrt(1.0 + c * std::exp(2.0 * t));
}

/// Exact solution of m' = m(1 - m^2), the same reduction under u = zw.
inline double mean_zw(double m0, double t) {
  const double c = (1.0 - m0 * m0) / (m0 * m0);
  return std::copysign(1.0, m0) / std::sqrt(1.0 + c * std::exp(-2.0 * t));
}

inline Kernel kernel_2mzw() { return Kernel::linear_2mzw(unit_box()); }
inline Kernel kernel_affine(double a, double b, double c, double d) {
  return Kernel::affine_quadratic(unit_box(), a, b, c, d);
}
inline Kernel kernel_harvest() {
  return Kernel::harvest_piecewise(Space::interval(0.0, 1.0));
}

}  // namespace polyrep::testing
