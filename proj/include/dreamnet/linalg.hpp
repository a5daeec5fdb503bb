#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace dreamnet {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
bool is_exactly_symmetric(const Eigen::MatrixBase<Derived>& a) {
  return a.rows() == a.cols() && a == a.transpose();
}

template <typename Derived>
Matrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  Matrix<S> out = (a + a.transpose()) * S(0.5);
  return out;
}

/// Eigenvalues of a symmetric matrix, ascending.
template <typename Derived>
Vector<typename Derived::Scalar> symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<S>> es(a.eval(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
  return es.eigenvalues();
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  return symmetric_eigenvalues(a)(0);
}

/// Operator 2-norm of a symmetric matrix: max |eigenvalue|.
template <typename Derived>
typename Derived::Scalar symmetric_operator_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  auto ev = symmetric_eigenvalues(a);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// Operator 2-norm of a general matrix: largest singular value.
template <typename Derived>
typename Derived::Scalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix<S>> svd(a.eval());
  return svd.singularValues()(0);
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration on the
/// Rayleigh quotient. Returns NaN if rel_tol is not met within max_iter.
template <typename Derived>
typename Derived::Scalar power_iteration_norm(const Eigen::MatrixBase<Derived>& a,
                                              typename Derived::Scalar rel_tol = 1e-12,
                                              int max_iter = 20000) {
  using S = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  Vector<S> v = Vector<S>::Ones(n) / std::sqrt(S(n));
  // A deterministic but non-symmetric start avoids landing orthogonal to the top vector.
  for (Eigen::Index i = 0; i < n; ++i) v(i) += S(1e-3) * std::sin(S(i + 1));
  v.normalize();
  S lambda = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector<S> w = a * v;
    const S next = v.dot(w);
    const S nw = w.norm();
    if (nw == S(0)) return 0;
    v = w / nw;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
    lambda = next;
  }
  return std::numeric_limits<S>::quiet_NaN();
}

}  // namespace dreamnet
