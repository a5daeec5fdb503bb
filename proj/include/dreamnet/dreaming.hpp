#pragma once

#include "dreamnet/kernel.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace dreamnet {

struct DreamSchedule {
  double epsilon = 0.5;
  int max_cycles = 200;
  double tol = 1e-3;

  void validate() const;
};

struct DreamRecord {
  int k = 0;
  double rate = 0;             // eps / (1 + eps k), the rate applied to step k -> k+1
  double distance = 0;         // ||J(k) - J^p||
  double min_eig = 0;          // smallest eigenvalue of G(k)
  double commutator_norm = 0;  // ||G(k)C - CG(k)||
  double residual = 0;         // ||G(k)C - I||, the stopping quantity
  int det_sign = 1;
};

struct DreamTrace {
  std::vector<DreamRecord> records;
  bool converged = false;
  bool diverged = false;
  std::optional<int> divergence_cycle;
  Matrix<double> g;  // last iterate

  int cycles() const { return records.empty() ? 0 : records.back().k; }
  double final_residual() const { return records.empty() ? 0 : records.back().residual; }
};

inline double dream_rate(int k, double eps) { return eps / (1.0 + eps * double(k)); }

/// (1+t) J0 (I + t J0)^{-1}.
template <typename Scalar>
CouplingMatrix<Scalar> continuous_flow(const CouplingMatrix<Scalar>& j0, double t) {
  if (!(t >= 0)) throw std::invalid_argument("continuous_flow: t must be non-negative");
  const auto n = j0.j.rows();
  Matrix<Scalar> a = Matrix<Scalar>::Identity(n, n) + Scalar(t) * j0.j;
  Eigen::LLT<Matrix<Scalar>> llt(a);
  if (llt.info() != Eigen::Success) throw std::domain_error("continuous_flow: I + tJ(0) is numerically singular");
  Matrix<Scalar> j = llt.solve(j0.j) * Scalar(1 + t);
  return {symmetrized(j), CouplingKind::dream, t, false};
}

/// J(k+1) = J + eps/(1+eps k) (J - J^2).
template <typename Derived>
Matrix<typename Derived::Scalar> dream_step(const Eigen::MatrixBase<Derived>& j, int k, double eps) {
  using S = typename Derived::Scalar;
  if (k < 0 || !(eps > 0)) throw std::invalid_argument("dream_step: need k >= 0 and eps > 0");
  const S r = S(dream_rate(k, eps));
  Matrix<S> next = j + r * (j - j * j);
  return symmetrized(next);
}

template <typename Scalar>
CouplingMatrix<Scalar> dream_step(const CouplingMatrix<Scalar>& j, int k, double eps) {
  return {dream_step(j.j, k, eps), CouplingKind::dream, j.t, false};
}

/// G(k+1) = (1 + r) G - r G C G with r = eps/(1+eps k).
template <typename DerivedG, typename DerivedC>
Matrix<typename DerivedG::Scalar> g_step(const Eigen::MatrixBase<DerivedG>& g, const Eigen::MatrixBase<DerivedC>& c,
                                          int k, double eps) {
  using S = typename DerivedG::Scalar;
  if (k < 0 || !(eps > 0)) throw std::invalid_argument("g_step: need k >= 0 and eps > 0");
  const S r = S(dream_rate(k, eps));
  Matrix<S> next = (S(1) + r) * g - r * (g * c * g);
  return symmetrized(next);
}

/// 1/(||C|| - 1); nullopt ("unbounded") when ||C|| = 1 within 1e-12.
template <typename Scalar>
std::optional<Scalar> critical_epsilon(const CorrelationMatrix<Scalar>& c) {
  const Scalar excess = c.norm() - Scalar(1);
  if (excess <= Scalar(1e-12)) return std::nullopt;
  return Scalar(1) / excess;
}

/// (N ||J(0)||)^{-1}.
template <typename Scalar>
Scalar semenov_epsilon(const CouplingMatrix<Scalar>& j0, int n) {
  if (n < 1) throw std::invalid_argument("semenov_epsilon: n must be positive");
  return Scalar(1) / (Scalar(n) * spectral_norm(j0.j));
}

/// Iterates g_step from G(0) = I until ||G C - I|| <= tol, divergence, or max_cycles.
/// Needs an invertible C; P > N is rejected.
template <typename Scalar = double>
DreamTrace run_dreaming_g(const CorrelationMatrix<Scalar>& corr, const DreamSchedule& sched) {
  sched.validate();
  const Matrix<Scalar>& c = corr.matrix();
  const auto p = c.rows();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> ces(c);
  if (!(ces.eigenvalues()(0) > Scalar(1e-10)))
    throw std::domain_error("run_dreaming: correlation matrix is singular (smallest eigenvalue " +
                            std::to_string(double(ces.eigenvalues()(0))) + ")");
  const Matrix<Scalar> sqrt_c = ces.operatorSqrt();
  const Matrix<Scalar> eye = Matrix<Scalar>::Identity(p, p);

  DreamTrace trace;
  Matrix<Scalar> g = eye;
  const Scalar g0_norm = 1;
  for (int k = 0;; ++k) {
    DreamRecord rec;
    rec.k = k;
    rec.rate = dream_rate(k, sched.epsilon);
    const bool finite = g.allFinite();
    if (finite) {
      const Vector<Scalar> ev = symmetric_eigenvalues(g);
      rec.min_eig = double(ev(0));
      rec.det_sign = 1;
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) < 0) rec.det_sign = -rec.det_sign;
      const Matrix<Scalar> gc = g * c;
      rec.commutator_norm = double(operator_norm(gc - c * g));
      rec.residual = double(operator_norm(gc - eye));
      rec.distance = double(symmetric_operator_norm(sqrt_c * g * sqrt_c - eye));
    } else {
      rec.min_eig = rec.commutator_norm = rec.residual = rec.distance = std::numeric_limits<double>::infinity();
    }
    trace.records.push_back(rec);
    if (finite && rec.residual <= sched.tol) {
      trace.converged = true;
      break;
    }
    if (!finite || symmetric_operator_norm(g) > Scalar(1e3) * g0_norm) {
      trace.diverged = true;
      trace.divergence_cycle = k;
      break;
    }
    if (k >= sched.max_cycles) break;
    g = g_step(g, c, k, sched.epsilon);
  }
  trace.g = g.template cast<double>();
  return trace;
}

template <typename Scalar = double>
DreamTrace run_dreaming(const PatternSet& ps, const DreamSchedule& sched) {
  return run_dreaming_g(correlation_matrix<Scalar>(ps), sched);
}

/// N x N picture of the same iteration, for validation: J(0), J(1), ..., J(cycles).
template <typename Scalar = double>
std::vector<Matrix<Scalar>> run_dreaming_j(const PatternSet& ps, double eps, int cycles) {
  std::vector<Matrix<Scalar>> out;
  out.push_back(hebbian<Scalar>(ps).j);
  for (int k = 0; k < cycles; ++k) out.push_back(dream_step(out.back(), k, eps));
  return out;
}

/// CSV columns: k, rate, distance, min_eig, commutator_norm.
void write_trace_csv(const DreamTrace& trace, std::ostream& os);

}  // namespace dreamnet
