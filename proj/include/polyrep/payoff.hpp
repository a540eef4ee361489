#pragma once

#include "polyrep/kernel.hpp"
#include "polyrep/measure.hpp"

namespace polyrep {

namespace detail {

template <typename Scalar>
void require_probability(const DiscreteMeasure<Scalar>& m, const char* where) {
  if (!m.is_probability())
    throw NotAProbability(std::string(where) + " needs a probability measure");
}

}  // namespace detail

/// F_Q(z) = E(delta_z, Q) = sum_j q_j u(z, w_j).
template <typename Scalar, typename Derived>
Scalar mean_payoff(const PayoffKernel<Scalar>& k,
                   const Eigen::MatrixBase<Derived>& z,
                   const DiscreteMeasure<Scalar>& q) {
  require_same_space(k.space(), q.space(), "mean_payoff");
  Scalar s(0);
  for (Eigen::Index j = 0; j < q.size(); ++j) s += q.weight(j) * k(z, q.point(j));
  return s;
}

/// E(P, Q) = sum_i sum_j p_i q_j u(z_i, w_j). Bilinear; also accepts signed
/// measures, which is how the Frechet form below expands.
template <typename Scalar>
Scalar bilinear_payoff(const PayoffKernel<Scalar>& k,
                       const DiscreteMeasure<Scalar>& p,
                       const DiscreteMeasure<Scalar>& q) {
  require_same_space(k.space(), p.space(), "expected_payoff");
  require_same_space(k.space(), q.space(), "expected_payoff");
  return p.weights().dot(payoff_matrix(k, p.points(), q.points()) * q.weights());
}

template <typename Scalar>
Scalar expected_payoff(const PayoffKernel<Scalar>& k,
                       const DiscreteMeasure<Scalar>& p,
                       const DiscreteMeasure<Scalar>& q) {
  detail::require_probability(p, "expected_payoff");
  detail::require_probability(q, "expected_payoff");
  return bilinear_payoff(k, p, q);
}

/// sigma(z, Q) = E(delta_z, Q) - E(Q, Q).
template <typename Scalar, typename Derived>
Scalar success(const PayoffKernel<Scalar>& k, const Eigen::MatrixBase<Derived>& z,
               const DiscreteMeasure<Scalar>& q) {
  detail::require_probability(q, "success");
  return mean_payoff(k, z, q) - expected_payoff(k, q, q);
}

/// Success of every atom of q against q itself.
template <typename Scalar>
Vector<Scalar> success_profile(const PayoffKernel<Scalar>& k,
                               const DiscreteMeasure<Scalar>& q) {
  detail::require_probability(q, "success_profile");
  const Vector<Scalar> rows = payoff_matrix(k, q.points(), q.points()) * q.weights();
  return (rows.array() - q.weights().dot(rows)).matrix();
}

/// Integral of DF_P(Q - P) d(Q - P) = E(Q,Q) - E(P,Q) - E(Q,P) + E(P,P).
template <typename Scalar>
Scalar frechet_form(const PayoffKernel<Scalar>& k, const DiscreteMeasure<Scalar>& p,
                    const DiscreteMeasure<Scalar>& q) {
  detail::require_probability(p, "frechet_form");
  detail::require_probability(q, "frechet_form");
  // Expand on the union support so all four terms share one payoff matrix.
  const auto a = align(p, q);
  const Matrix<Scalar> u = payoff_matrix(k, a.points, a.points);
  const Vector<Scalar>& wp = a.first;
  const Vector<Scalar>& wq = a.second;
  return wq.dot(u * wq) - wp.dot(u * wq) - wq.dot(u * wp) + wp.dot(u * wp);
}

}  // namespace polyrep
