#include "dreamnet/meanfield.hpp"
#include "dreamnet/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dreamnet {

void SolverConfig::validate() const {
  if (!(damping > 0 && damping <= 1)) throw std::invalid_argument("SolverConfig: damping must lie in (0, 1]");
  if (!(tol > 0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be positive");
  if (quad_order < 20) throw std::invalid_argument("SolverConfig: quad_order must be at least 20");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::not_converged: return "not_converged";
    case SolveStatus::domain_exit: return "domain_exit";
    case SolveStatus::no_retrieval: return "no_retrieval";
  }
  return "unknown";
}

// ---------------------------------------------------------------- finite T

std::optional<OrderParams> finite_t_update(const OrderParams& z, double alpha, double beta, double t,
                                           const AffineGaussian& quad) {
  const double D = z.delta;
  if (!(D > 0) || !(z.p >= 0) || !std::isfinite(z.m)) return std::nullopt;
  const double a = beta * z.m / D;
  const double b = beta * std::sqrt(alpha * z.p) / D;
  const auto mom = quad.moments(a, b);
  const double tp = 1 + t;
  OrderParams out;
  out.m = tp / (D + t) * mom.tanh;
  const double c = beta * mom.sech2 / (D * D) - t / (tp * D);
  const double w = 1 - tp * c;
  if (!(w > 0)) return std::nullopt;
  out.delta = 1 + alpha * t / w;
  out.Q = (1 - t * D / (beta * tp) + alpha * z.p * t * t / (tp * tp) - z.m * z.m * t * (t + 2 * D) / (tp * tp) -
           2 * alpha * beta * z.p * t / (tp * D) * mom.sech2) /
          (D * D);
  out.q = out.Q - c / beta;
  out.p = std::max(out.q, 0.0) * tp * tp / (w * w);
  return out;
}

namespace {

double update_size(const OrderParams& from, const OrderParams& to) {
  return std::max({std::abs(to.m - from.m), std::abs(to.delta - from.delta),
                   std::abs(to.p - from.p) / std::max(1.0, std::abs(from.p))});
}

OrderParams blend(const OrderParams& z, const OrderParams& f, double lam) {
  OrderParams y = f;
  y.m = z.m + lam * (f.m - z.m);
  y.p = z.p + lam * (f.p - z.p);
  y.delta = z.delta + lam * (f.delta - z.delta);
  return y;
}

struct Iterate {
  OrderParams z;
  SolveStatus status = SolveStatus::not_converged;
  int iterations = 0;
};

Iterate damped_finite_t(double alpha, double beta, double t, const AffineGaussian& quad, const OrderParams& z0,
                        double damping, double tol, int max_iter) {
  Iterate res{z0, SolveStatus::domain_exit, 0};
  auto f = finite_t_update(z0, alpha, beta, t, quad);
  if (!f) return res;
  OrderParams z = z0;
  for (int it = 0; it < max_iter; ++it) {
    double lam = damping;
    OrderParams y;
    std::optional<OrderParams> fy;
    for (;;) {
      y = blend(z, *f, lam);
      fy = finite_t_update(y, alpha, beta, t, quad);
      if (fy) break;
      lam *= 0.5;
      if (lam < 1e-8) return {z, SolveStatus::domain_exit, it};
    }
    const double step = update_size(z, y);
    z = y;
    f = fy;
    if (step < tol) return {z, SolveStatus::converged, it + 1};
  }
  return {z, SolveStatus::not_converged, max_iter};
}

std::optional<OrderParams> newton_finite_t(double alpha, double beta, double t, const AffineGaussian& quad,
                                           const OrderParams& z0, double tol) {
  auto residual = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
    OrderParams z = z0;
    z.m = x(0);
    z.p = x(1);
    z.delta = x(2);
    auto f = finite_t_update(z, alpha, beta, t, quad);
    if (!f) return std::nullopt;
    Eigen::VectorXd r(3);
    r << f->m - z.m, (f->p - z.p) / std::max(1.0, std::abs(z.p)), f->delta - z.delta;
    return r;
  };
  Eigen::VectorXd x(3);
  x << z0.m, z0.p, z0.delta;
  auto root = newton_solve(residual, x, tol);
  if (!root) return std::nullopt;
  OrderParams z = z0;
  z.m = (*root)(0);
  z.p = (*root)(1);
  z.delta = (*root)(2);
  return z;
}

FiniteTSolution finish(const OrderParams& z, double alpha, double beta, double t, const AffineGaussian& quad,
                       SolveStatus status, int iterations, bool newton) {
  FiniteTSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.newton = newton;
  sol.params = z;
  if (auto f = finite_t_update(z, alpha, beta, t, quad)) {
    sol.params.q = f->q;
    sol.params.Q = f->Q;
    sol.residual = update_size(z, *f);
  } else {
    sol.residual = std::numeric_limits<double>::infinity();
    if (sol.status == SolveStatus::converged) sol.status = SolveStatus::domain_exit;
  }
  if (sol.params.m < 0) sol.params.m = -sol.params.m;
  return sol;
}

void check_inputs(double alpha, double beta, double t) {
  if (!(alpha >= 0)) throw std::invalid_argument("alpha must be non-negative");
  if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
  if (!(t >= 0)) throw std::invalid_argument("t must be non-negative");
}

}  // namespace

double finite_t_residual(const OrderParams& z, double alpha, double beta, double t, const AffineGaussian& quad) {
  auto f = finite_t_update(z, alpha, beta, t, quad);
  if (!f) return std::numeric_limits<double>::infinity();
  return update_size(z, *f);
}

OrderParams retrieval_seed(double beta, double t) {
  double m = 1.0;
  if (beta > 1) {
    double lo = 1e-12, hi = 1.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (std::tanh(beta * mid) > mid ? lo : hi) = mid;
    }
    m = 0.5 * (lo + hi);
  }
  const double tp = 1 + t;
  const double w = std::max(tp * (1 - beta * (1 - m * m)), 0.1 * tp);
  OrderParams z;
  z.m = m;
  z.q = m * m / (tp * tp);
  z.Q = 1 - t / (beta * tp) - m * m * t * (t + 2) / (tp * tp);
  z.p = z.q * tp * tp / (w * w);
  z.delta = 1.0;
  return z;
}

double rs_free_energy(const OrderParams& op, double alpha, double beta, double t, int quad_order) {
  check_inputs(alpha, beta, t);
  const double tp = 1 + t;
  const double w = 1 - beta * tp * (op.Q - op.q);
  if (!(w > 0))
    throw std::domain_error("rs_free_energy: 1 - beta(1+t)(Q-q) = " + std::to_string(w) + " is not positive");
  if (!(op.delta > 0)) throw std::domain_error("rs_free_energy: delta = " + std::to_string(op.delta) + " is not positive");
  if (!(op.p >= 0)) throw std::domain_error("rs_free_energy: p = " + std::to_string(op.p) + " is negative");
  const double D = op.delta;
  const AffineGaussian quad(quad_order);
  const double lc = quad.log_cosh(beta * op.m / D, beta * std::sqrt(alpha * op.p) / D);
  double f = op.m * op.m / (2 * tp) * (1 + t / D) + alpha * beta * op.p * (op.Q - op.q) / 2 +
             alpha / (2 * beta) * (std::log(w) - op.q * beta * tp / w) + std::log(D) / (2 * beta) +
             alpha * op.p * t / (2 * tp * D) - lc / beta - std::numbers::ln2 / beta;
  if (t > 0) {
    f += tp * (D - 1) * op.Q / (2 * t) + tp * (1 - D) / (2 * t * D);
  } else {
    f += alpha * (op.Q - 1) / (2 * w);
  }
  return f;
}

FiniteTSolution solve_finite_t(double alpha, double beta, double t, const SolverConfig& cfg) {
  cfg.validate();
  check_inputs(alpha, beta, t);
  if (cfg.seed_branch == Branch::spin_glass) return solve_spin_glass(alpha, beta, t, cfg);
  return solve_finite_t(alpha, beta, t, cfg, retrieval_seed(beta, t));
}

FiniteTSolution solve_finite_t(double alpha, double beta, double t, const SolverConfig& cfg,
                               const OrderParams& warm_start) {
  cfg.validate();
  check_inputs(alpha, beta, t);
  const AffineGaussian quad(cfg.quad_order);
  Iterate it = damped_finite_t(alpha, beta, t, quad, warm_start, cfg.damping, cfg.tol, cfg.max_iter);
  if (it.status == SolveStatus::domain_exit) {
    Iterate retry = damped_finite_t(alpha, beta, t, quad, warm_start, 0.5 * cfg.damping, cfg.tol, cfg.max_iter);
    retry.iterations += it.iterations;
    it = retry;
  }
  if (it.status == SolveStatus::converged) {
    if (auto z = newton_finite_t(alpha, beta, t, quad, it.z, 1e-3 * cfg.tol)) {
      if (update_size(it.z, *z) < 1e-6) return finish(*z, alpha, beta, t, quad, SolveStatus::converged, it.iterations, true);
    }
    return finish(it.z, alpha, beta, t, quad, SolveStatus::converged, it.iterations, false);
  }
  if (it.status == SolveStatus::not_converged) {
    if (auto z = newton_finite_t(alpha, beta, t, quad, it.z, cfg.tol))
      return finish(*z, alpha, beta, t, quad, SolveStatus::converged, it.iterations, true);
  }
  return finish(it.z, alpha, beta, t, quad, it.status, it.iterations, false);
}

FiniteTSolution solve_spin_glass(double alpha, double beta, double t, const SolverConfig& cfg,
                                 const std::optional<OrderParams>& warm_start) {
  cfg.validate();
  check_inputs(alpha, beta, t);
  const AffineGaussian quad(cfg.quad_order);
  OrderParams base;
  base.m = 0;

  if (alpha > 0) {
    auto residual = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      OrderParams z = base;
      z.p = std::exp(x(0));
      z.delta = x(1);
      auto f = finite_t_update(z, alpha, beta, t, quad);
      if (!f || !(f->p > 0)) return std::nullopt;
      Eigen::VectorXd r(2);
      r << std::log(f->p) - x(0), f->delta - z.delta;
      return r;
    };
    std::vector<std::pair<double, double>> seeds;
    if (warm_start && warm_start->p > 0) seeds.emplace_back(warm_start->p, warm_start->delta);
    for (double s : {3.0 / alpha, 30.0 / alpha, 1.0 / alpha, 1.0}) seeds.emplace_back(s, 1.0);
    for (const auto& [p0, d0] : seeds) {
      Eigen::VectorXd x(2);
      x << std::log(p0), d0;
      auto root = newton_solve(residual, x, cfg.tol);
      if (!root) continue;
      OrderParams z = base;
      z.p = std::exp((*root)(0));
      z.delta = (*root)(1);
      FiniteTSolution sol = finish(z, alpha, beta, t, quad, SolveStatus::converged, 0, true);
      if (sol.ok() && sol.params.q > 1e-10) return sol;
    }
  }

  // Paramagnet: p = 0, delta from its own equation.
  auto residual = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
    OrderParams z = base;
    z.p = 0;
    z.delta = x(0);
    auto f = finite_t_update(z, alpha, beta, t, quad);
    if (!f) return std::nullopt;
    Eigen::VectorXd r(1);
    r << f->delta - z.delta;
    return r;
  };
  Eigen::VectorXd x(1);
  x << 1.0 + alpha * t;
  auto root = newton_solve(residual, x, cfg.tol);
  if (!root) {
    x << 1.0;
    root = newton_solve(residual, x, cfg.tol);
  }
  OrderParams z = base;
  z.p = 0;
  z.delta = root ? (*root)(0) : 1.0;
  FiniteTSolution sol = finish(z, alpha, beta, t, quad, root ? SolveStatus::converged : SolveStatus::domain_exit, 0, true);
  sol.paramagnet = true;
  if (sol.ok() && sol.params.q > 1e-10) sol.status = SolveStatus::not_converged;
  return sol;
}

// ---------------------------------------------------------------- zero T

std::optional<ZeroTParams> zero_t_update(const ZeroTParams& z, double alpha, double t) {
  if (!(alpha > 0) || !(z.delta > 0) || !std::isfinite(z.mu)) return std::nullopt;
  const double tp = 1 + t;
  const double u = 1 - tp * z.c;
  if (!(u > 0)) return std::nullopt;
  const double g = std::sqrt(2.0 / (std::numbers::pi * alpha)) * std::exp(-z.mu * z.mu / alpha);
  const double qa = tp * tp;
  const double qb = -2 * alpha * t * tp * g;
  const double qc = alpha * t * t - 2 * z.mu * z.mu * t * (t + 2 * z.delta) - z.delta * z.delta * u * u;
  const double disc = qb * qb - 4 * qa * qc;
  if (!(disc >= 0)) return std::nullopt;
  ZeroTParams out;
  out.pi = (-qb + std::sqrt(disc)) / (2 * qa);
  if (!(out.pi > 0)) return std::nullopt;
  out.c = out.pi * g / z.delta - t / (z.delta * tp);
  const double un = 1 - tp * out.c;
  if (!(un > 0)) return std::nullopt;
  out.delta = 1 + alpha * t / un;
  out.mu = out.pi / std::numbers::sqrt2 * tp / (out.delta + t) * std::erf(z.mu / std::sqrt(alpha));
  return out;
}

namespace {

double zero_t_step(const ZeroTParams& a, const ZeroTParams& b) {
  return std::max({std::abs(a.mu - b.mu), std::abs(a.delta - b.delta), std::abs(a.c - b.c),
                   std::abs(a.pi - b.pi) / std::max(1.0, std::abs(a.pi))});
}

ZeroTParams blend(const ZeroTParams& z, const ZeroTParams& f, double lam) {
  return {z.mu + lam * (f.mu - z.mu), z.pi + lam * (f.pi - z.pi), z.delta + lam * (f.delta - z.delta),
          z.c + lam * (f.c - z.c)};
}

constexpr double kCollapse = 1e-2;  // mu / sqrt(alpha) below this counts as the mu = 0 branch

bool collapsed(const ZeroTParams& z, double alpha) { return z.mu / std::sqrt(alpha) < kCollapse; }

std::optional<ZeroTParams> newton_zero_t(double alpha, double t, const ZeroTParams& z0, double tol) {
  auto residual = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
    const ZeroTParams z{x(0), x(1), x(2), x(3)};
    auto f = zero_t_update(z, alpha, t);
    if (!f) return std::nullopt;
    Eigen::VectorXd r(4);
    r << f->mu - z.mu, (f->pi - z.pi) / std::max(1.0, std::abs(z.pi)), f->delta - z.delta, f->c - z.c;
    return r;
  };
  Eigen::VectorXd x(4);
  x << z0.mu, z0.pi, z0.delta, z0.c;
  auto root = newton_solve(residual, x, tol);
  if (!root) return std::nullopt;
  return ZeroTParams{(*root)(0), (*root)(1), (*root)(2), (*root)(3)};
}

}  // namespace

double zero_t_residual(const ZeroTParams& z, double alpha, double t) {
  auto f = zero_t_update(z, alpha, t);
  if (!f) return std::numeric_limits<double>::infinity();
  return zero_t_step(z, *f);
}

ZeroTParams zero_t_seed(double t) {
  return {(1 + t) / std::numbers::sqrt2, 1 + t, 1.0, -t / (1 + t)};
}

ZeroTSolution solve_zero_t_at(double alpha, double t, const SolverConfig& cfg, const ZeroTParams& warm_start) {
  cfg.validate();
  if (!(alpha > 0)) throw std::invalid_argument("solve_zero_t: alpha must be positive");
  if (!(t >= 0)) throw std::invalid_argument("solve_zero_t: t must be non-negative");
  ZeroTSolution sol;
  sol.alpha_reached = alpha;
  ZeroTParams z = warm_start;
  auto f = zero_t_update(z, alpha, t);
  if (!f) {
    sol.params = z;
    sol.status = SolveStatus::domain_exit;
    return sol;
  }
  SolveStatus status = SolveStatus::not_converged;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    double lam = cfg.damping;
    ZeroTParams y;
    std::optional<ZeroTParams> fy;
    for (;;) {
      y = blend(z, *f, lam);
      fy = zero_t_update(y, alpha, t);
      if (fy) break;
      lam *= 0.5;
      if (lam < 1e-8) break;
    }
    if (!fy) {
      status = SolveStatus::domain_exit;
      break;
    }
    const double step = zero_t_step(z, y);
    z = y;
    f = fy;
    if (collapsed(z, alpha)) {
      status = SolveStatus::no_retrieval;
      break;
    }
    if (step < cfg.tol) {
      status = SolveStatus::converged;
      ++it;
      break;
    }
  }
  sol.iterations = it;
  if (status == SolveStatus::converged) {
    if (auto zn = newton_zero_t(alpha, t, z, 1e-3 * cfg.tol); zn && zero_t_step(z, *zn) < 1e-6) z = *zn;
  } else if (status == SolveStatus::not_converged) {
    if (auto zn = newton_zero_t(alpha, t, z, cfg.tol)) {
      z = *zn;
      status = collapsed(z, alpha) ? SolveStatus::no_retrieval : SolveStatus::converged;
    }
  }
  sol.params = z;
  sol.status = status;
  sol.residual = zero_t_residual(z, alpha, t);
  return sol;
}

namespace {

constexpr double kSmallAlpha = 1e-3;

// Continuation steps may not jump to a different branch.
bool same_branch(const ZeroTParams& a, const ZeroTParams& b, double t) {
  return std::abs(a.mu - b.mu) + std::abs(a.pi - b.pi) < 0.2 * (1 + t);
}

}  // namespace

ZeroTSolution solve_zero_t(double alpha, double t, const SolverConfig& cfg) {
  const double a0 = std::min(alpha, kSmallAlpha);
  ZeroTSolution cur = solve_zero_t_at(a0, t, cfg, zero_t_seed(t));
  if (!cur.ok()) return cur;
  double reached = a0;
  double step = 0.02;
  int iterations = cur.iterations;
  while (reached < alpha) {
    const double next = std::min(alpha, reached + step);
    ZeroTSolution s = solve_zero_t_at(next, t, cfg, cur.params);
    iterations += s.iterations;
    if (s.ok() && same_branch(s.params, cur.params, t)) {
      cur = s;
      reached = next;
      continue;
    }
    step *= 0.5;
    if (step < 1e-6) {
      // Solutions up to `reached` and none a hair beyond: the branch ends at a fold there,
      // whether the last attempt collapsed or stalled. A failing seed returns earlier.
      cur.status = SolveStatus::no_retrieval;
      break;
    }
  }
  cur.alpha_reached = reached;
  cur.iterations = iterations;
  return cur;
}

CapacityResult critical_capacity(double t, const SolverConfig& cfg, double resolution) {
  if (!(t >= 0)) throw std::invalid_argument("critical_capacity: t must be non-negative");
  if (!(resolution > 0)) throw std::invalid_argument("critical_capacity: resolution must be positive");
  CapacityResult res;
  res.t = t;
  ZeroTSolution lo_sol = solve_zero_t_at(kSmallAlpha, t, cfg, zero_t_seed(t));
  ++res.solves;
  if (!lo_sol.ok()) {
    res.boundary = lo_sol.status;
    return res;
  }
  double lo = kSmallAlpha;
  double hi = -1;
  const double step = 0.02;
  const double ceiling = 3.0;
  while (lo < ceiling) {
    const double next = lo + step;
    ZeroTSolution s = solve_zero_t_at(next, t, cfg, lo_sol.params);
    ++res.solves;
    if (s.ok() && same_branch(s.params, lo_sol.params, t)) {
      lo = next;
      lo_sol = s;
    } else {
      hi = next;
      res.boundary = s.ok() ? SolveStatus::no_retrieval : s.status;
      break;
    }
  }
  if (hi < 0) {
    res.boundary = SolveStatus::not_converged;
    res.alpha_c = lo;
    res.last = lo_sol.params;
    return res;
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    ZeroTSolution s = solve_zero_t_at(mid, t, cfg, lo_sol.params);
    ++res.solves;
    if (s.ok() && same_branch(s.params, lo_sol.params, t)) {
      lo = mid;
      lo_sol = s;
    } else {
      hi = mid;
      res.boundary = s.ok() ? SolveStatus::no_retrieval : s.status;
    }
  }
  res.alpha_c = 0.5 * (lo + hi);
  res.ok = true;
  res.last = lo_sol.params;
  return res;
}

double capacity_sigmoid_fit(std::span<const CapacityPoint> points) {
  if (points.size() < 8) throw std::invalid_argument("capacity_sigmoid_fit: need at least 8 points");
  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double amin = tmin, amax = -tmin;
  for (const auto& pt : points) {
    if (!std::isfinite(pt.t) || !std::isfinite(pt.alpha_c) || pt.t < 0)
      throw std::invalid_argument("capacity_sigmoid_fit: non-finite or negative entry");
    tmin = std::min(tmin, pt.t);
    tmax = std::max(tmax, pt.t);
    amin = std::min(amin, pt.alpha_c);
    amax = std::max(amax, pt.alpha_c);
  }
  if (tmin > 1 || tmax < 1e3) throw std::invalid_argument("capacity_sigmoid_fit: points must span t in [1, 1000]");
  if (!(amax - amin > 1e-12)) throw std::domain_error("capacity_sigmoid_fit: degenerate normalization (max == min)");

  auto sse = [&](double a) {
    double s = 0;
    for (const auto& pt : points) {
      const double y = (pt.alpha_c - amin) / (amax - amin);
      const double r = y - pt.t / (pt.t + a);
      s += r * r;
    }
    return s;
  };
  // Coarse log grid, then golden section in log a around the best cell.
  const int grid = 4000;
  const double lmin = std::log(1e-6), lmax = std::log(1e6);
  int best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double f = sse(std::exp(lmin + (lmax - lmin) * k / grid));
    if (f < fbest) {
      fbest = f;
      best = k;
    }
  }
  double lo = lmin + (lmax - lmin) * std::max(best - 1, 0) / grid;
  double hi = lmin + (lmax - lmin) * std::min(best + 1, grid) / grid;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = sse(std::exp(x1)), f2 = sse(std::exp(x2));
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = sse(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = sse(std::exp(x2));
    }
  }
  return std::exp(0.5 * (lo + hi));
}

std::pair<double, double> reduced_models_tc(double t) {
  if (!(t >= 0)) throw std::invalid_argument("reduced_models_tc: t must be non-negative");
  return {1 + t, 1 / (1 + t)};
}

}  // namespace dreamnet
