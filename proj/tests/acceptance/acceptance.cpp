// Acceptance gate: one PASS/FAIL line per criterion. Tolerances are fixed here.
//   acceptance                 run everything
//   acceptance --criterion N   run one criterion
#include "dreamnet/dreamnet.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

using namespace dreamnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 5) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------- capacity

Outcome c1_hopfield_capacity() {
  const auto r = critical_capacity(0, SolverConfig{}, 1e-4);
  const bool pass = r.ok && std::abs(r.alpha_c - 0.138) <= 0.005;
  return {pass, "alpha_c(t=0) = " + fmt(r.alpha_c) + ", want 0.138 +- 0.005"};
}

Outcome c2_large_t_capacity() {
  const auto r = critical_capacity(1000, SolverConfig{}, 1e-4);
  const bool pass = r.ok && std::abs(r.alpha_c - 1.07) <= 0.02;
  return {pass, "alpha_c(t=1000) = " + fmt(r.alpha_c) + ", want 1.07 +- 0.02"};
}

Outcome c3_intermediate_capacity() {
  const auto r1 = critical_capacity(1, SolverConfig{}, 1e-4);
  const auto r5 = critical_capacity(5, SolverConfig{}, 1e-4);
  const bool ok1 = r1.ok && r1.alpha_c >= 0.35 && r1.alpha_c <= 0.45;
  const bool ok5 = r5.ok && r5.alpha_c >= 0.75 && r5.alpha_c <= 0.85;
  return {ok1 && ok5, "alpha_c(1) = " + fmt(r1.alpha_c) + " in [0.35, 0.45]: " + (ok1 ? "yes" : "no") +
                          "; alpha_c(5) = " + fmt(r5.alpha_c) + " in [0.75, 0.85]: " + (ok5 ? "yes" : "no")};
}

Outcome c4_sigmoid_fit() {
  std::vector<CapacityPoint> pts;
  for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 5.0, 10.0, 29.0, 100.0, 1000.0}) {
    const auto r = critical_capacity(t, SolverConfig{}, 1e-4);
    if (!r.ok) return {false, "critical_capacity failed at t = " + fmt(t)};
    pts.push_back({t, r.alpha_c});
  }
  const double a = capacity_sigmoid_fit(pts);
  return {a >= 2.7 && a <= 3.0, "fitted a = " + fmt(a) + ", want [2.7, 3.0]"};
}

// ---------------------------------------------------------------- finite T

Outcome c5_temperature_anchor() {
  const std::vector<double> alphas{1e-6};
  std::string detail;
  bool pass = true;
  for (double t : {0.0, 0.1, 1.0, 1000.0}) {
    const auto line = tc_line(t, alphas, SolverConfig{});
    const auto& pt = line.front();
    const bool ok = pt.temperature && std::abs(*pt.temperature - 1.0) <= 0.01;
    pass = pass && ok;
    detail += "T_c(t=" + fmt(t) + ") = " + (pt.temperature ? fmt(*pt.temperature) : "none") + "; ";
  }
  return {pass, detail + "want 1.00 +- 0.01"};
}

Outcome c6_ags_equivalence() {
  Rng rng(2024, {6});
  double worst = 0;
  int failures = 0;
  for (int k = 0; k < 20; ++k) {
    // Deep inside the retrieval region: T_c(alpha = 0.1) is about 0.315.
    const double alpha = 0.005 + 0.095 * rng.uniform();
    const double temp = 0.05 + 0.23 * rng.uniform();
    const auto ref = oracle::solve_ags(alpha, 1 / temp);
    const auto sol = solve_finite_t(alpha, 1 / temp, 0, SolverConfig{});
    if (!ref.ok || !sol.ok()) {
      ++failures;
      continue;
    }
    worst = std::max({worst, std::abs(sol.params.m - ref.m), std::abs(sol.params.q - ref.q),
                      std::abs(sol.params.p - ref.r)});
  }
  return {failures == 0 && worst <= 1e-6,
          "20 points, max componentwise |diff| = " + fmt(worst, 3) + ", solver failures " + std::to_string(failures) +
              ", want <= 1e-6"};
}

// ---------------------------------------------------------------- dreaming

Outcome c7_dream_convergence() {
  const int seeds = 50;
  double mean_res = 0;
  int invariant_breaks = 0, converged = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto ps = generate_patterns(64, 8, derive_seed(7, {std::uint64_t(s)}));
    const auto trace = run_dreaming(ps, {0.5, 200, 1e-3});
    mean_res += trace.final_residual() / seeds;
    converged += trace.converged;
    for (const auto& r : trace.records)
      if (!(r.commutator_norm <= 1e-8) || !(r.min_eig > 0)) ++invariant_breaks;
  }
  const bool pass = mean_res < 1e-3 && invariant_breaks == 0;
  return {pass, "mean ||GC - I|| after <= 200 cycles = " + fmt(mean_res, 3) + " (want < 1e-3), converged " +
                    std::to_string(converged) + "/" + std::to_string(seeds) + ", invariant violations " +
                    std::to_string(invariant_breaks)};
}

Outcome c8_critical_strength() {
  Rng rng(88, {8});
  int below_ok = 0, above_ok = 0, instances = 0;
  for (int k = 0; k < 20; ++k) {
    const int p = 2 + int(rng.next() % 15);
    const int n = 4 * p + int(rng.next() % 48);
    const auto ps = generate_patterns(n, p, derive_seed(88, {std::uint64_t(k)}));
    const auto c = correlation_matrix<double>(ps);
    const auto ec = critical_epsilon(c);
    if (!ec) continue;
    ++instances;
    below_ok += run_dreaming_g(c, {0.9 * *ec, 20000, 1e-3}).converged;
    above_ok += !run_dreaming_g(c, {2.0 * *ec, 20000, 1e-3}).converged;
  }
  const bool pass = instances >= 20 && below_ok == instances && above_ok == instances;
  return {pass, std::to_string(instances) + " instances (P <= 16); 0.9 eps_c converged " + std::to_string(below_ok) +
                    ", 2 eps_c failed " + std::to_string(above_ok)};
}

Outcome c9_kernel_identity() {
  double worst = 0;
  for (int s = 0; s < 3; ++s)
    for (int n : {16, 64}) {
      const auto ps = generate_patterns(n, n / 8 + 2 * s, derive_seed(9, {std::uint64_t(s), std::uint64_t(n)}));
      const Eigen::MatrixXd j0 = hebbian<double>(ps).j;
      for (double t : {0.1, 1.0, 10.0, 100.0}) {
        const Eigen::MatrixXd ref =
            (1 + t) * j0 * (Eigen::MatrixXd::Identity(n, n) + t * j0).fullPivLu().inverse();
        worst = std::max(worst, operator_norm(Eigen::MatrixXd(dream_coupling<double>(ps, t).j - ref)));
      }
    }
  return {worst <= 1e-8, "max ||J(t) - (1+t)J0(I+tJ0)^-1|| = " + fmt(worst, 3) + ", want <= 1e-8"};
}

// ---------------------------------------------------------------- Monte Carlo

// Mean-field m(T) along increasing T with warm starts; zero once the branch dies.
std::vector<double> mean_field_curve(double alpha, double t, const std::vector<double>& temps) {
  std::vector<double> out;
  std::optional<OrderParams> warm;
  bool dead = false;
  for (double temp : temps) {
    if (dead) {
      out.push_back(0);
      continue;
    }
    const auto sol = warm ? solve_finite_t(alpha, 1 / temp, t, SolverConfig{}, *warm)
                          : solve_finite_t(alpha, 1 / temp, t, SolverConfig{});
    if (!sol.ok() || sol.params.m < 0.05) {
      dead = true;
      out.push_back(0);
      continue;
    }
    warm = sol.params;
    out.push_back(sol.params.m);
  }
  return out;
}

Outcome c10_monte_carlo_vs_mean_field() {
  const double alpha = 0.08;
  const int n = 1000, p = 80;
  std::vector<double> temps;
  for (int k = 1; k <= 24; ++k) temps.push_back(0.05 * k);
  McConfig cfg;
  cfg.realizations = 10;
  cfg.seed = 10;
  std::string detail;
  bool pass = true;
  for (double t : {0.0, 1.0, 1000.0}) {
    const std::vector<double> alphas{alpha};
    const auto tc = tc_line(t, alphas, SolverConfig{}).front().temperature;
    if (!tc) return {false, "no T_c at t = " + fmt(t)};
    const auto mf = mean_field_curve(alpha, t, temps);
    const auto mc = retrieval_curve({n, p, t}, temps, cfg);
    double worst = 0;
    for (std::size_t k = 0; k < temps.size(); ++k) {
      if (std::abs(temps[k] - *tc) < 0.1) continue;
      worst = std::max(worst, std::abs(mc[k].value - mf[k]));
    }
    pass = pass && worst <= 0.1;
    detail += "t=" + fmt(t) + ": T_c=" + fmt(*tc, 4) + " max|m_MC - m_MF|=" + fmt(worst, 3) + "; ";
  }
  return {pass, detail + "want <= 0.1"};
}

Outcome c11_field_regularization() {
  McConfig cfg;
  cfg.zero_temperature = true;
  cfg.realizations = 10;
  cfg.seed = 11;
  std::vector<double> lx, ly;
  std::string sig;
  for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    const auto st = field_statistics({1000, 50, t}, cfg, 20, 80);
    lx.push_back(std::log(t));
    ly.push_back(std::log(st.sigma));
    sig += fmt(st.sigma, 3) + " ";
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double b = sxy / sxx;
  const double a = std::exp(my - b * mx);
  const bool pass = std::abs(b + 1.0) <= 0.15 && std::abs(a - 0.22) <= 0.06;
  return {pass, "sigma(t) = [" + sig + "], fit " + fmt(a, 3) + " t^" + fmt(b, 3) +
                    ", want exponent -1.0 +- 0.15 and prefactor 0.22 +- 0.06"};
}

Outcome c12_basin_widening() {
  McConfig cfg;
  cfg.zero_temperature = true;
  cfg.realizations = 10;
  cfg.seed = 12;
  std::vector<double> probs;
  for (int k = 0; k <= 10; ++k) probs.push_back(0.05 * k);
  std::map<double, std::vector<ExperimentRecord>> by_t;
  bool monotone = true;
  std::string detail;
  for (double t : {0.0, 0.1, 1.0, 1000.0}) {
    by_t[t] = basin_experiment({1000, 50, t}, probs, cfg, 20);
    const auto& r = by_t[t];
    for (std::size_t k = 1; k < r.size(); ++k)
      if (r[k].value > r[k - 1].value) {
        monotone = false;
        detail += "t=" + fmt(t) + " rises at p_flip=" + fmt(probs[k]) + "; ";
      }
  }
  bool widened = true;
  for (std::size_t k = 1; k + 1 < probs.size(); ++k) {
    const auto& lo = by_t[0.0][k];
    const auto& hi = by_t[1000.0][k];
    const double se = std::hypot(lo.std_error, hi.std_error);
    if (hi.value < lo.value - 2 * se) {
      widened = false;
      detail += "t=1000 below t=0 at p_flip=" + fmt(probs[k]) + "; ";
    }
  }
  std::string curves;
  for (double t : {0.0, 1000.0}) {
    curves += "t=" + fmt(t) + ":";
    for (const auto& r : by_t[t]) curves += " " + fmt(r.value, 3);
    curves += "; ";
  }
  return {monotone && widened, curves + (detail.empty() ? "monotone and widened" : detail)};
}

Outcome c13_exact_enumeration() {
  double worst = 0;
  for (double t : {0.0, 1.0, 10.0}) {
    const auto ps = generate_patterns(8, 2, derive_seed(13, {std::uint64_t(t)}));
    const auto j = dream_coupling<double>(ps, t);
    const double beta = 1.2;
    const auto exact = oracle::boltzmann(j.j, beta);
    auto net = PatternNetwork::dream(ps, t);
    Rng rng(13, {std::uint64_t(t), 1});
    net.set_state(NetworkState::from_pattern(ps, 0));
    for (int k = 0; k < 1000; ++k) net.glauber_sweep(beta, rng);
    const int samples = 400000;
    std::vector<double> hist(256, 0);
    for (int k = 0; k < samples; ++k) {
      net.glauber_sweep(beta, rng);
      unsigned code = 0;
      for (int i = 0; i < 8; ++i)
        if (net.spin(i) > 0) code |= 1u << i;
      hist[code] += 1.0 / samples;
    }
    double tv = 0;
    for (int c = 0; c < 256; ++c) tv += 0.5 * std::abs(hist[c] - exact[c]);
    worst = std::max(worst, tv);
  }
  return {worst <= 0.02, "max total variation over t in {0, 1, 10} = " + fmt(worst, 3) + ", want <= 0.02"};
}

Outcome c14_critical_strength_comparison() {
  const int p = 10, realizations = 50;
  std::vector<double> crit, sem;
  std::string detail;
  for (int n : {100, 200, 500, 1000, 2000}) {
    double c = 0, s = 0;
    for (int r = 0; r < realizations; ++r) {
      const auto ps = generate_patterns(n, p, derive_seed(14, {std::uint64_t(n), std::uint64_t(r)}));
      c += critical_epsilon(correlation_matrix<double>(ps)).value_or(std::numeric_limits<double>::infinity());
      s += semenov_epsilon(hebbian<double>(ps), n);
    }
    crit.push_back(c / realizations);
    sem.push_back(s / realizations);
    detail += "N=" + std::to_string(n) + ": eps_c=" + fmt(crit.back(), 4) + " eps_S=" + fmt(sem.back(), 3) + "; ";
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < sem.size(); ++k) decreasing = decreasing && sem[k] < sem[k - 1];
  const auto [lo, hi] = std::minmax_element(crit.begin(), crit.end());
  const double spread = (*hi - *lo) / *lo;
  return {decreasing && spread < 0.2, detail + "semenov decreasing: " + (decreasing ? "yes" : "no") +
                                          ", eps_c spread " + fmt(100 * spread, 3) + "% (want < 20%)"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<Outcome()>>> table{
      {1, {"zero-T capacity, Hopfield limit", c1_hopfield_capacity}},
      {2, {"zero-T capacity, large-t limit", c2_large_t_capacity}},
      {3, {"intermediate capacities", c3_intermediate_capacity}},
      {4, {"capacity sigmoid fit", c4_sigmoid_fit}},
      {5, {"temperature anchor T_c(alpha->0)", c5_temperature_anchor}},
      {6, {"AGS oracle equivalence at t = 0", c6_ags_equivalence}},
      {7, {"discrete dreaming convergence", c7_dream_convergence}},
      {8, {"critical unlearning strength", c8_critical_strength}},
      {9, {"dream kernel identity", c9_kernel_identity}},
      {10, {"Monte Carlo vs mean field", c10_monte_carlo_vs_mean_field}},
      {11, {"internal field regularization", c11_field_regularization}},
      {12, {"basin widening", c12_basin_widening}},
      {13, {"Glauber vs exact enumeration", c13_exact_enumeration}},
      {14, {"critical strength comparison", c14_critical_strength_comparison}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-14)")->check(CLI::Range(1, 14));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& [id, entry] : criteria()) {
    if (only && id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s | %s [%.1fs]\n", id, out.pass ? "PASS" : "FAIL", entry.first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
