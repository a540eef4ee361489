#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "polyrep/errors.hpp"
#include "polyrep/strategy_space.hpp"
#include "polyrep/types.hpp"

namespace polyrep {

enum class KernelVariant { Linear2mzw, HarvestPiecewise, GridTable, AffineQuadratic };

inline const char* to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::Linear2mzw: return "Linear2mzw";
    case KernelVariant::HarvestPiecewise: return "HarvestPiecewise";
    case KernelVariant::GridTable: return "GridTable";
    case KernelVariant::AffineQuadratic: return "AffineQuadratic";
  }
  return "?";
}

namespace kernels {

/// u(z,w) = 2 - <z,w>.
struct Linear2mzw {};

/// u(z,w) = w if z < w, z - w if z >= w. One-dimensional.
struct HarvestPiecewise {};

/// u(z,w) = a + b z + c w + d z w. One-dimensional.
template <typename Scalar>
struct AffineQuadratic {
  Scalar a{0}, b{0}, c{0}, d{0};
};

/// Payoffs tabulated on a finite grid; off-grid queries are errors.
template <typename Scalar>
struct GridTable {
  Points<Scalar> grid;  // dim x n
  Matrix<Scalar> table; // n x n, table(i, j) = u(grid_i, grid_j)
};

}  // namespace kernels

/// Bounded payoff u : S x S -> R with a declared sup-norm bound.
template <typename Scalar>
class PayoffKernel {
 public:
  using Params = std::variant<kernels::Linear2mzw, kernels::HarvestPiecewise,
                              kernels::GridTable<Scalar>,
                              kernels::AffineQuadratic<Scalar>>;

  PayoffKernel(StrategySpace<Scalar> space, Params params,
               std::optional<Scalar> bound = std::nullopt)
      : space_(std::move(space)), params_(std::move(params)) {
    check_shape();
    const Scalar exact = exact_sup();
    if (bound) {
      using std::isfinite;
      if (!isfinite(*bound) || *bound < exact * (Scalar(1) - Scalar(1e-12)))
        throw InvalidKernel("declared bound " + std::to_string(double(*bound)) +
                            " is below the sup-norm " +
                            std::to_string(double(exact)));
      bound_ = *bound;
    } else {
      bound_ = exact;
    }
  }

  static PayoffKernel linear_2mzw(const StrategySpace<Scalar>& s,
                                  std::optional<Scalar> bound = std::nullopt) {
    return PayoffKernel(s, kernels::Linear2mzw{}, bound);
  }
  static PayoffKernel harvest_piecewise(const StrategySpace<Scalar>& s,
                                        std::optional<Scalar> bound = std::nullopt) {
    return PayoffKernel(s, kernels::HarvestPiecewise{}, bound);
  }
  static PayoffKernel affine_quadratic(const StrategySpace<Scalar>& s, Scalar a,
                                       Scalar b, Scalar c, Scalar d,
                                       std::optional<Scalar> bound = std::nullopt) {
    return PayoffKernel(s, kernels::AffineQuadratic<Scalar>{a, b, c, d}, bound);
  }
  static PayoffKernel grid_table(const StrategySpace<Scalar>& s,
                                 Points<Scalar> grid, Matrix<Scalar> table,
                                 std::optional<Scalar> bound = std::nullopt) {
    return PayoffKernel(
        s, kernels::GridTable<Scalar>{std::move(grid), std::move(table)}, bound);
  }

  KernelVariant variant() const {
    return static_cast<KernelVariant>(params_.index());
  }
  const Params& params() const { return params_; }
  const StrategySpace<Scalar>& space() const { return space_; }
  Scalar bound() const { return bound_; }

  /// u(z, w). Throws OutOfSpace, OffGrid (GridTable) or BoundExceeded.
  template <typename DerivedZ, typename DerivedW>
  Scalar operator()(const Eigen::MatrixBase<DerivedZ>& z,
                    const Eigen::MatrixBase<DerivedW>& w) const {
    if (!space_.contains(z) || !space_.contains(w))
      throw OutOfSpace("payoff argument outside the strategy space");
    const Scalar u = std::visit(
        [&](const auto& p) -> Scalar { return evaluate(p, z, w); }, params_);
    using std::abs;
    if (abs(u) > bound_ * (Scalar(1) + Scalar(1e-12)) + Scalar(1e-12))
      throw BoundExceeded("|u| = " + std::to_string(double(abs(u))) +
                          " exceeds declared bound " +
                          std::to_string(double(bound_)));
    return u;
  }

 private:
  template <typename DZ, typename DW>
  static Scalar evaluate(const kernels::Linear2mzw&,
                         const Eigen::MatrixBase<DZ>& z,
                         const Eigen::MatrixBase<DW>& w) {
    return Scalar(2) - z.dot(w);
  }

  template <typename DZ, typename DW>
  static Scalar evaluate(const kernels::HarvestPiecewise&,
                         const Eigen::MatrixBase<DZ>& z,
                         const Eigen::MatrixBase<DW>& w) {
    // Taken literally at the discontinuity: z == w uses the z - w branch.
    return z(0) < w(0) ? Scalar(w(0)) : Scalar(z(0) - w(0));
  }

  template <typename DZ, typename DW>
  static Scalar evaluate(const kernels::AffineQuadratic<Scalar>& p,
                         const Eigen::MatrixBase<DZ>& z,
                         const Eigen::MatrixBase<DW>& w) {
    return p.a + p.b * z(0) + p.c * w(0) + p.d * z(0) * w(0);
  }

  template <typename DZ, typename DW>
  static Scalar evaluate(const kernels::GridTable<Scalar>& p,
                         const Eigen::MatrixBase<DZ>& z,
                         const Eigen::MatrixBase<DW>& w) {
    return p.table(grid_index(p, z), grid_index(p, w));
  }

  template <typename D>
  static Eigen::Index grid_index(const kernels::GridTable<Scalar>& p,
                                 const Eigen::MatrixBase<D>& x) {
    const auto merge = static_cast<Scalar>(tol::kMerge);
    for (Eigen::Index i = 0; i < p.grid.cols(); ++i) {
      if ((p.grid.col(i) - x).cwiseAbs().maxCoeff() <= merge) return i;
    }
    throw OffGrid("point is not a grid node of the payoff table");
  }

  void check_shape() const {
    const bool one_d = space_.dimension() == 1;
    switch (variant()) {
      case KernelVariant::HarvestPiecewise:
      case KernelVariant::AffineQuadratic:
        if (!one_d) throw InvalidKernel("variant requires a one-dimensional space");
        break;
      case KernelVariant::GridTable: {
        const auto& g = std::get<kernels::GridTable<Scalar>>(params_);
        if (g.grid.cols() == 0 || g.grid.rows() != space_.dimension())
          throw InvalidKernel("grid must hold at least one point of dimension d");
        if (g.table.rows() != g.grid.cols() || g.table.cols() != g.grid.cols())
          throw InvalidKernel("table must be n x n for n grid points");
        if (!g.table.allFinite()) throw InvalidKernel("non-finite table entry");
        for (Eigen::Index i = 0; i < g.grid.cols(); ++i) {
          if (!space_.contains(g.grid.col(i)))
            throw InvalidKernel("grid point outside the strategy space");
        }
        break;
      }
      case KernelVariant::Linear2mzw:
        break;
    }
  }

  /// Exact sup |u| over S x S (corner enumeration for the bilinear variants).
  Scalar exact_sup() const {
    using std::abs;
    using std::max;
    using std::min;
    const auto& lo = space_.lower();
    const auto& hi = space_.upper();
    switch (variant()) {
      case KernelVariant::Linear2mzw: {
        Scalar top(2), bottom(2);
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
          const Scalar c[4] = {lo(i) * lo(i), lo(i) * hi(i), hi(i) * lo(i),
                               hi(i) * hi(i)};
          top -= *std::min_element(c, c + 4);
          bottom -= *std::max_element(c, c + 4);
        }
        return max(abs(top), abs(bottom));
      }
      case KernelVariant::HarvestPiecewise:
        return max(max(abs(lo(0)), abs(hi(0))), hi(0) - lo(0));
      case KernelVariant::AffineQuadratic: {
        const auto& p = std::get<kernels::AffineQuadratic<Scalar>>(params_);
        Scalar s(0);
        for (Scalar z : {lo(0), hi(0)})
          for (Scalar w : {lo(0), hi(0)})
            s = max(s, abs(p.a + p.b * z + p.c * w + p.d * z * w));
        return s;
      }
      case KernelVariant::GridTable:
        return std::get<kernels::GridTable<Scalar>>(params_).table.cwiseAbs().maxCoeff();
    }
    return Scalar(0);
  }

  StrategySpace<Scalar> space_;
  Params params_;
  Scalar bound_{0};
};

/// U(i, j) = u(rows_i, cols_j).
template <typename Scalar>
Matrix<Scalar> payoff_matrix(const PayoffKernel<Scalar>& k,
                             const Points<Scalar>& rows,
                             const Points<Scalar>& cols) {
  Matrix<Scalar> u(rows.cols(), cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j)
    for (Eigen::Index i = 0; i < rows.cols(); ++i)
      u(i, j) = k(rows.col(i), cols.col(j));
  return u;
}

}  // namespace polyrep
