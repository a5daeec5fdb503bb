#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>

namespace dreamnet {

/// Damped Newton with a central-difference Jacobian. `f` maps a point to its
/// residual or nullopt outside the domain. Returns the root when the max-norm
/// residual drops below tol.
template <typename F>
std::optional<Eigen::VectorXd> newton_solve(F&& f, Eigen::VectorXd x, double tol, int max_iter = 60) {
  std::optional<Eigen::VectorXd> fx = f(x);
  if (!fx || !fx->allFinite()) return std::nullopt;
  const auto n = x.size();
  for (int it = 0; it < max_iter; ++it) {
    const double norm = fx->template lpNorm<Eigen::Infinity>();
    if (norm < tol) return x;
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      auto fp = f(xp);
      auto fm = f(xm);
      if (fp && fm) {
        jac.col(k) = (*fp - *fm) / (2 * h);
      } else if (fp) {
        jac.col(k) = (*fp - *fx) / h;
      } else if (fm) {
        jac.col(k) = (*fx - *fm) / h;
      } else {
        return std::nullopt;
      }
    }
    const Eigen::VectorXd dx = jac.fullPivLu().solve(-*fx);
    if (!dx.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool moved = false;
    while (lambda > 1e-6) {
      Eigen::VectorXd xn = x + lambda * dx;
      auto fn = f(xn);
      if (fn && fn->allFinite() && fn->template lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * lambda) * norm) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return fx->template lpNorm<Eigen::Infinity>() < tol ? std::optional<Eigen::VectorXd>(x) : std::nullopt;
  }
  if (fx->template lpNorm<Eigen::Infinity>() < tol) return x;
  return std::nullopt;
}

}  // namespace dreamnet
