#pragma once

#include "dreamnet/quadrature.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dreamnet {

/// Replica-symmetric order parameters. Q is the diagonal overlap; the conjugate
/// diagonal parameter only enters through delta.
struct OrderParams {
  double m = 0;
  double q = 0;
  double Q = 0;
  double p = 0;
  double delta = 1;
};

struct ZeroTParams {
  double mu = 0;
  double pi = 1;
  double delta = 1;
  double c = 0;
};

enum class Branch { retrieval, spin_glass };

struct SolverConfig {
  double damping = 0.5;
  double tol = 1e-10;
  int max_iter = 20000;
  int quad_order = 120;
  Branch seed_branch = Branch::retrieval;

  void validate() const;
};

enum class SolveStatus { converged, not_converged, domain_exit, no_retrieval };
std::string to_string(SolveStatus s);

struct FiniteTSolution {
  OrderParams params;
  SolveStatus status = SolveStatus::not_converged;
  int iterations = 0;
  double residual = 0;
  bool newton = false;      // finished by Newton polish
  bool paramagnet = false;  // spin-glass branch fell back to q = 0

  bool ok() const { return status == SolveStatus::converged; }
};

struct ZeroTSolution {
  ZeroTParams params;
  SolveStatus status = SolveStatus::not_converged;
  int iterations = 0;
  double residual = 0;
  double alpha_reached = 0;  // last alpha on the continuation path with a retrieval solution

  bool ok() const { return status == SolveStatus::converged; }
};

/// One sweep of the finite-T self-consistency map at (m, p, delta).
/// Returns nullopt when 1 - (1+t)c <= 0 or delta <= 0.
std::optional<OrderParams> finite_t_update(const OrderParams& z, double alpha, double beta, double t,
                                           const AffineGaussian& quad);

/// Residual of the finite-T map: max over m, p (relative above 1) and delta.
double finite_t_residual(const OrderParams& z, double alpha, double beta, double t, const AffineGaussian& quad);

/// Replica-symmetric free energy, additive constants dropped. Throws std::domain_error
/// if 1 - beta(1+t)(Q-q) <= 0 or delta <= 0.
double rs_free_energy(const OrderParams& op, double alpha, double beta, double t, int quad_order = 120);

/// alpha = 0 solution of m = tanh(beta m) dressed for sleep extent t.
OrderParams retrieval_seed(double beta, double t);

/// Damped fixed-point iteration from the seed of cfg.seed_branch, Newton polish at the end.
FiniteTSolution solve_finite_t(double alpha, double beta, double t, const SolverConfig& cfg);
FiniteTSolution solve_finite_t(double alpha, double beta, double t, const SolverConfig& cfg,
                               const OrderParams& warm_start);

/// One sweep of the zero-T map. nullopt outside the domain.
std::optional<ZeroTParams> zero_t_update(const ZeroTParams& z, double alpha, double t);
double zero_t_residual(const ZeroTParams& z, double alpha, double t);

/// Small-alpha seed: delta = 1, c = -t/(1+t), mu = (1+t)/sqrt(2), pi = 1+t.
ZeroTParams zero_t_seed(double t);

/// Solve at alpha from a nearby warm start; no continuation.
ZeroTSolution solve_zero_t_at(double alpha, double t, const SolverConfig& cfg, const ZeroTParams& warm_start);

/// Continuation in alpha from the small-alpha seed. Status no_retrieval when the branch ends
/// below alpha (alpha_reached marks where), not_converged when the seed itself fails.
ZeroTSolution solve_zero_t(double alpha, double t, const SolverConfig& cfg);

struct CapacityResult {
  double t = 0;
  double alpha_c = 0;
  bool ok = false;
  SolveStatus boundary = SolveStatus::no_retrieval;  // why the first alpha above alpha_c failed
  int solves = 0;
  ZeroTParams last;  // solution at the largest alpha with retrieval
};

CapacityResult critical_capacity(double t, const SolverConfig& cfg, double resolution = 1e-3);

struct CapacityPoint {
  double t = 0;
  double alpha_c = 0;
};

/// Normalizes alpha_c to [0, 1] over the input and fits y = t/(t + a) by least squares.
double capacity_sigmoid_fit(std::span<const CapacityPoint> points);

struct TemperatureScan {
  double t_min = 0.02;
  double t_max = 1.5;
  double step = 0.02;
  double refine = 1e-3;
  double jump_threshold = 0.05;
};

struct BoundaryPoint {
  double alpha = 0;
  std::optional<double> temperature;
  std::string note;
};

std::vector<BoundaryPoint> tc_line(double t, std::span<const double> alphas, const SolverConfig& cfg,
                                   const TemperatureScan& scan = {});
std::vector<BoundaryPoint> tr_line(double t, std::span<const double> alphas, const SolverConfig& cfg,
                                   const TemperatureScan& scan = {});

/// Spin-glass branch (m = 0): Newton on (log p, delta), paramagnet fallback.
FiniteTSolution solve_spin_glass(double alpha, double beta, double t, const SolverConfig& cfg,
                                 const std::optional<OrderParams>& warm_start = std::nullopt);

enum class Phase { paramagnetic, spin_glass, mixed_retrieval, pure_retrieval };
std::string to_string(Phase p);

struct PhasePoint {
  double alpha = 0;
  double temperature = 0;
  double t = 0;
  Phase phase = Phase::paramagnetic;
  std::optional<double> f_retrieval;
  std::optional<double> f_spin_glass;
};

PhasePoint classify_phase(double alpha, double temperature, double t, const SolverConfig& cfg);

/// Critical temperatures at zero load of the reinforcement-only and removal-only models.
std::pair<double, double> reduced_models_tc(double t);

}  // namespace dreamnet
