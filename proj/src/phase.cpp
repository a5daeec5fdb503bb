#include "dreamnet/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dreamnet {

std::string to_string(Phase p) {
  switch (p) {
    case Phase::paramagnetic: return "paramagnetic";
    case Phase::spin_glass: return "spin_glass";
    case Phase::mixed_retrieval: return "mixed_retrieval";
    case Phase::pure_retrieval: return "pure_retrieval";
  }
  return "unknown";
}

namespace {

bool alive(const FiniteTSolution& s, double threshold) { return s.ok() && s.params.m >= threshold; }

void check_grid(std::span<const double> alphas, const TemperatureScan& scan) {
  if (!std::is_sorted(alphas.begin(), alphas.end())) throw std::invalid_argument("alpha grid must be sorted");
  if (!(scan.t_min > 0 && scan.t_max > scan.t_min && scan.step > 0 && scan.refine > 0))
    throw std::invalid_argument("invalid temperature scan");
}

struct LowEnd {
  bool found = false;
  OrderParams params;
};

// Retrieval solution at the lowest scan temperature, continued along the alpha grid.
LowEnd low_temperature_retrieval(double alpha, double t, const SolverConfig& cfg, const TemperatureScan& scan,
                                 const std::optional<OrderParams>& chain) {
  const double beta = 1 / scan.t_min;
  FiniteTSolution s;
  if (chain) s = solve_finite_t(alpha, beta, t, cfg, *chain);
  if (!alive(s, scan.jump_threshold)) s = solve_finite_t(alpha, beta, t, cfg, retrieval_seed(beta, t));
  if (!alive(s, scan.jump_threshold)) return {};
  return {true, s.params};
}

struct Climb {
  std::optional<double> tc;
  std::string note;
};

Climb climb(double alpha, double t, const SolverConfig& cfg, const TemperatureScan& scan, OrderParams prev) {
  double ta = scan.t_min;
  for (int k = 1;; ++k) {
    const double temp = scan.t_min + k * scan.step;
    if (temp > scan.t_max + 1e-12) break;
    FiniteTSolution s = solve_finite_t(alpha, 1 / temp, t, cfg, prev);
    if (alive(s, scan.jump_threshold)) {
      prev = s.params;
      ta = temp;
      continue;
    }
    double lo = ta, hi = temp;
    while (hi - lo > scan.refine) {
      const double mid = 0.5 * (lo + hi);
      FiniteTSolution sm = solve_finite_t(alpha, 1 / mid, t, cfg, prev);
      if (alive(sm, scan.jump_threshold)) {
        lo = mid;
        prev = sm.params;
      } else {
        hi = mid;
      }
    }
    return {0.5 * (lo + hi), ""};
  }
  return {std::nullopt, "no_transition_below_t_max"};
}

}  // namespace

std::vector<BoundaryPoint> tc_line(double t, std::span<const double> alphas, const SolverConfig& cfg,
                                   const TemperatureScan& scan) {
  check_grid(alphas, scan);
  std::vector<BoundaryPoint> out;
  std::optional<OrderParams> chain;
  for (double alpha : alphas) {
    BoundaryPoint bp;
    bp.alpha = alpha;
    LowEnd low = low_temperature_retrieval(alpha, t, cfg, scan, chain);
    if (!low.found) {
      bp.note = "no_retrieval_at_t_min";
      out.push_back(bp);
      continue;
    }
    chain = low.params;
    Climb c = climb(alpha, t, cfg, scan, low.params);
    bp.temperature = c.tc;
    bp.note = c.note;
    out.push_back(bp);
  }
  return out;
}

std::vector<BoundaryPoint> tr_line(double t, std::span<const double> alphas, const SolverConfig& cfg,
                                   const TemperatureScan& scan) {
  check_grid(alphas, scan);
  std::vector<BoundaryPoint> out;
  std::optional<OrderParams> chain;
  for (double alpha : alphas) {
    BoundaryPoint bp;
    bp.alpha = alpha;
    LowEnd low = low_temperature_retrieval(alpha, t, cfg, scan, chain);
    if (!low.found) {
      bp.note = "no_retrieval_at_t_min";
      out.push_back(bp);
      continue;
    }
    chain = low.params;
    const Climb c = climb(alpha, t, cfg, scan, low.params);
    const double tc = c.tc.value_or(scan.t_max);

    OrderParams ret = low.params;
    std::optional<OrderParams> sg;
    // Free-energy gap F_retrieval - F_spin_glass at temp, advancing the warm starts on success.
    auto gap = [&](double temp, OrderParams& ret_warm, std::optional<OrderParams>& sg_warm) -> std::optional<double> {
      const double beta = 1 / temp;
      FiniteTSolution r = solve_finite_t(alpha, beta, t, cfg, ret_warm);
      if (!alive(r, scan.jump_threshold)) return std::nullopt;
      FiniteTSolution s = solve_spin_glass(alpha, beta, t, cfg, sg_warm);
      if (!s.ok()) return std::nullopt;
      ret_warm = r.params;
      sg_warm = s.params;
      return rs_free_energy(r.params, alpha, beta, t, cfg.quad_order) -
             rs_free_energy(s.params, alpha, beta, t, cfg.quad_order);
    };

    std::optional<double> g0 = gap(scan.t_min, ret, sg);
    if (!g0) {
      bp.note = "branch_failure_at_t_min";
      out.push_back(bp);
      continue;
    }
    if (*g0 > 0) {
      bp.note = "retrieval_not_global_at_t_min";
      out.push_back(bp);
      continue;
    }
    double ta = scan.t_min;
    bool crossed = false;
    for (int k = 1;; ++k) {
      const double temp = scan.t_min + k * scan.step;
      if (temp >= tc) break;
      OrderParams ret_next = ret;
      std::optional<OrderParams> sg_next = sg;
      std::optional<double> g = gap(temp, ret_next, sg_next);
      if (!g) break;
      if (*g <= 0) {
        ret = ret_next;
        sg = sg_next;
        ta = temp;
        continue;
      }
      double lo = ta, hi = temp;
      while (hi - lo > scan.refine) {
        const double mid = 0.5 * (lo + hi);
        OrderParams rm = ret;
        std::optional<OrderParams> sm = sg;
        std::optional<double> gm = gap(mid, rm, sm);
        if (gm && *gm <= 0) {
          lo = mid;
          ret = rm;
          sg = sm;
        } else {
          hi = mid;
        }
      }
      bp.temperature = 0.5 * (lo + hi);
      crossed = true;
      break;
    }
    if (!crossed) {
      bp.temperature = c.tc;
      bp.note = c.tc ? "coincides_with_tc" : "no_crossing_in_window";
    }
    out.push_back(bp);
  }
  return out;
}

PhasePoint classify_phase(double alpha, double temperature, double t, const SolverConfig& cfg) {
  if (!(temperature > 0)) throw std::invalid_argument("classify_phase: temperature must be positive");
  const double beta = 1 / temperature;
  PhasePoint pt;
  pt.alpha = alpha;
  pt.temperature = temperature;
  pt.t = t;
  SolverConfig rc = cfg;
  rc.seed_branch = Branch::retrieval;
  const FiniteTSolution r = solve_finite_t(alpha, beta, t, rc);
  const FiniteTSolution s = solve_spin_glass(alpha, beta, t, cfg);
  if (s.ok()) pt.f_spin_glass = rs_free_energy(s.params, alpha, beta, t, cfg.quad_order);
  const bool retrieval = alive(r, TemperatureScan{}.jump_threshold);
  if (retrieval) pt.f_retrieval = rs_free_energy(r.params, alpha, beta, t, cfg.quad_order);
  if (retrieval) {
    pt.phase = (!pt.f_spin_glass || *pt.f_retrieval <= *pt.f_spin_glass) ? Phase::pure_retrieval
                                                                          : Phase::mixed_retrieval;
  } else if (s.ok() && !s.paramagnet && s.params.q > 1e-8) {
    pt.phase = Phase::spin_glass;
  } else {
    pt.phase = Phase::paramagnetic;
  }
  return pt;
}

}  // namespace dreamnet
