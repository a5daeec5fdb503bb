#include <doctest.h>

#include "oracles.hpp"

#include <cmath>

using namespace dreamnet;

namespace {

SolverConfig default_cfg() { return SolverConfig{}; }

double scalar_magnetization(double beta) {
  double lo = 1e-6, hi = 1;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (std::tanh(beta * mid) > mid ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("t = 0 finite-T solutions match the independent AGS solver") {
  const std::vector<std::pair<double, double>> points{{0.1, 5}, {0.05, 3}, {0.02, 1.5}, {0.08, 20}, {0.12, 8}};
  for (auto [alpha, beta] : points) {
    INFO("alpha=" << alpha << " beta=" << beta);
    const auto ref = oracle::solve_ags(alpha, beta);
    REQUIRE(ref.ok);
    const auto sol = solve_finite_t(alpha, beta, 0, default_cfg());
    REQUIRE(sol.ok());
    CHECK(sol.params.m == doctest::Approx(ref.m).epsilon(1e-6).scale(1));
    CHECK(sol.params.q == doctest::Approx(ref.q).epsilon(1e-6).scale(1));
    CHECK(sol.params.p == doctest::Approx(ref.r).epsilon(1e-6).scale(1));
    CHECK(sol.params.Q == doctest::Approx(1).epsilon(1e-12));
    CHECK(sol.params.delta == doctest::Approx(1).epsilon(1e-12));
    CHECK(sol.params.q <= sol.params.Q);
    // Free energy agrees with AGS up to its constant alpha/2.
    const double f = rs_free_energy(sol.params, alpha, beta, 0);
    CHECK(f + alpha / 2 == doctest::Approx(oracle::ags_free_energy(ref.m, ref.q, ref.r, alpha, beta)).epsilon(1e-8));
  }
}

TEST_CASE("zero-load solution is the scalar magnetization") {
  for (double t : {0.0, 1.0, 20.0}) {
    const auto sol = solve_finite_t(0, 2, t, default_cfg());
    REQUIRE(sol.ok());
    CHECK(sol.params.m == doctest::Approx(scalar_magnetization(2)).epsilon(1e-9));
    CHECK(sol.params.m == doctest::Approx(0.9575).epsilon(1e-4));
    CHECK(sol.params.delta == doctest::Approx(1));
  }
  // Above the critical temperature only m = 0 survives.
  const auto hot = solve_finite_t(0, 0.8, 1, default_cfg());
  CHECK(std::abs(hot.params.m) < 1e-4);
}

TEST_CASE("zero-load free energy has the closed form") {
  const double beta = 2;
  const double m = scalar_magnetization(beta);
  OrderParams op;
  op.m = m;
  op.Q = 1;
  op.q = m * m;
  op.p = 0;
  op.delta = 1;
  const double closed = m * m / 2 - std::log(std::cosh(beta * m)) / beta - std::log(2.0) / beta;
  CHECK(rs_free_energy(op, 0, beta, 0) == doctest::Approx(closed).epsilon(1e-12));
  OrderParams flipped = op;
  flipped.m = -m;
  CHECK(rs_free_energy(flipped, 0, beta, 0) == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("free energy is stationary at solutions") {
  for (double t : {0.0, 0.5, 3.0}) {
    const double alpha = 0.05, beta = 4;
    const auto sol = solve_finite_t(alpha, beta, t, default_cfg());
    REQUIRE(sol.ok());
    const OrderParams z = sol.params;
    // At t = 0 delta is identically 1, not a free parameter.
    for (int k = 0; k < (t == 0 ? 4 : 5); ++k) {
      OrderParams up = z, dn = z;
      double* u[] = {&up.m, &up.q, &up.Q, &up.p, &up.delta};
      double* d[] = {&dn.m, &dn.q, &dn.Q, &dn.p, &dn.delta};
      const double h = 1e-6;
      *u[k] += h;
      *d[k] -= h;
      const double grad = (rs_free_energy(up, alpha, beta, t) - rs_free_energy(dn, alpha, beta, t)) / (2 * h);
      INFO("t=" << t << " component=" << k);
      CHECK(std::abs(grad) <= 1e-4);
    }
  }
}

TEST_CASE("solutions are insensitive to doubling the quadrature order") {
  for (double t : {0.0, 1.0, 100.0}) {
    SolverConfig a = default_cfg(), b = default_cfg();
    b.quad_order = 240;
    const auto sa = solve_finite_t(0.06, 3, t, a);
    const auto sb = solve_finite_t(0.06, 3, t, b);
    REQUIRE(sa.ok());
    REQUIRE(sb.ok());
    CHECK(std::abs(sa.params.m - sb.params.m) <= 1e-8);
    CHECK(std::abs(sa.params.p - sb.params.p) <= 1e-8);
    CHECK(std::abs(sa.params.delta - sb.params.delta) <= 1e-8);
  }
}

TEST_CASE("sign gauge returns m >= 0 and the free energy is even in m") {
  OrderParams seed = retrieval_seed(4, 1);
  seed.m = -seed.m;
  const auto sol = solve_finite_t(0.04, 4, 1, default_cfg(), seed);
  REQUIRE(sol.ok());
  CHECK(sol.params.m > 0);
  OrderParams neg = sol.params;
  neg.m = -neg.m;
  CHECK(rs_free_energy(neg, 0.04, 4, 1) == doctest::Approx(rs_free_energy(sol.params, 0.04, 4, 1)).epsilon(1e-13));
}

TEST_CASE("retrieval solutions keep delta >= 1") {
  for (double t : {0.0, 0.3, 2.0, 50.0}) {
    const auto sol = solve_finite_t(0.05, 5, t, default_cfg());
    REQUIRE(sol.ok());
    CHECK(sol.params.delta >= 1 - 1e-12);
    CHECK(std::isfinite(sol.params.q));
  }
}

TEST_CASE("free energy reports the offending factor outside its domain") {
  OrderParams op;
  op.m = 0.5;
  op.q = 0;
  op.Q = 1;
  op.p = 1;
  op.delta = 1;
  try {
    rs_free_energy(op, 0.1, 3, 0);
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("1 - beta(1+t)(Q-q)") != std::string::npos);
  }
  op.q = 0.9;
  op.delta = -1;
  CHECK_THROWS_AS(rs_free_energy(op, 0.1, 3, 0), std::domain_error);
}

TEST_CASE("spin-glass branch has m = 0 and the paramagnet appears at high temperature") {
  const auto sg = solve_spin_glass(0.1, 5, 0, default_cfg());
  REQUIRE(sg.ok());
  CHECK(sg.params.m == 0);
  CHECK(sg.params.q > 0.1);
  CHECK_FALSE(sg.paramagnet);
  SolverConfig cfg = default_cfg();
  cfg.seed_branch = Branch::spin_glass;
  const auto para = solve_finite_t(0.1, 0.5, 0, cfg);
  REQUIRE(para.ok());
  CHECK(para.params.q == doctest::Approx(0).scale(1));
}

TEST_CASE("zero-T seed and small-load limit") {
  const double t = 2;
  const auto seed = zero_t_seed(t);
  CHECK(seed.delta == 1);
  CHECK(seed.c == doctest::Approx(-t / (1 + t)));
  CHECK(seed.mu == doctest::Approx((1 + t) / std::sqrt(2.0)));
  CHECK(seed.pi == doctest::Approx(1 + t));
  const auto sol = solve_zero_t(1e-3, t, default_cfg());
  REQUIRE(sol.ok());
  CHECK(sol.params.delta == doctest::Approx(1).epsilon(0.01));
  CHECK(sol.params.c == doctest::Approx(-t / (1 + t)).epsilon(0.02));
  CHECK(sol.params.pi > 0);
  CHECK(sol.params.mu > 0);
}

TEST_CASE("zero-T branch brackets the known capacities") {
  const auto cfg = default_cfg();
  CHECK(solve_zero_t(0.10, 0, cfg).ok());
  CHECK(solve_zero_t(0.15, 0, cfg).status == SolveStatus::no_retrieval);
  CHECK(solve_zero_t(1.05, 1000, cfg).ok());
  CHECK(solve_zero_t(1.10, 1000, cfg).status == SolveStatus::no_retrieval);
}

TEST_CASE("t = 0 critical capacity matches the zero-T AGS oracle") {
  const auto res = critical_capacity(0, default_cfg(), 1e-4);
  REQUIRE(res.ok);
  CHECK(res.alpha_c == doctest::Approx(oracle::ags_zero_t_capacity()).epsilon(2e-3));
}

TEST_CASE("critical capacity is non-decreasing in t") {
  double prev = 0;
  for (double t : {0.0, 0.1, 1.0, 5.0, 10.0, 100.0, 1000.0}) {
    const auto res = critical_capacity(t, default_cfg());
    REQUIRE(res.ok);
    CHECK(res.alpha_c >= prev);
    prev = res.alpha_c;
  }
}

TEST_CASE("sigmoid fit recovers synthetic data and rejects degenerate input") {
  std::vector<CapacityPoint> pts;
  // A far endpoint makes the max-normalization nearly the identity on y = t/(t+3).
  for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 5.0, 10.0, 29.0, 100.0, 1000.0, 1e10})
    pts.push_back({t, 0.2 + 0.8 * t / (t + 3)});
  CHECK(capacity_sigmoid_fit(pts) == doctest::Approx(3).epsilon(1e-6));
  std::vector<CapacityPoint> two{{1, 0.4}, {1000, 1.07}};
  CHECK_THROWS(capacity_sigmoid_fit(two));
  std::vector<CapacityPoint> flat;
  for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 5.0, 10.0, 1000.0}) flat.push_back({t, 0.5});
  CHECK_THROWS_AS(capacity_sigmoid_fit(flat), std::domain_error);
}

TEST_CASE("reduced models bracket the Hopfield critical temperature") {
  CHECK(reduced_models_tc(0) == std::pair<double, double>{1, 1});
  CHECK(reduced_models_tc(1) == std::pair<double, double>{2, 0.5});
  for (double t : {0.3, 7.0, 500.0}) {
    const auto [a, b] = reduced_models_tc(t);
    CHECK(a * b == doctest::Approx(1));
  }
}

TEST_CASE("critical temperature line starts at 1 and T_R stays below T_c") {
  const std::vector<double> alphas{1e-6, 0.02, 0.05};
  for (double t : {0.0, 1.0}) {
    const auto tc = tc_line(t, alphas, default_cfg());
    const auto tr = tr_line(t, alphas, default_cfg());
    REQUIRE(tc[0].temperature);
    CHECK(*tc[0].temperature == doctest::Approx(1).epsilon(0.01));
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      REQUIRE(tc[k].temperature);
      if (k > 0) CHECK(*tc[k].temperature < *tc[k - 1].temperature);
      if (tr[k].temperature) CHECK(*tr[k].temperature <= *tc[k].temperature + 2e-3);
    }
  }
}

TEST_CASE("phase classification at a few points") {
  CHECK(classify_phase(0.05, 1.5, 0, default_cfg()).phase == Phase::paramagnetic);
  const auto low = classify_phase(0.02, 0.2, 0, default_cfg());
  CHECK(low.phase == Phase::pure_retrieval);
  REQUIRE(low.f_retrieval);
  REQUIRE(low.f_spin_glass);
  CHECK(*low.f_retrieval <= *low.f_spin_glass);
  CHECK(classify_phase(0.2, 0.1, 0, default_cfg()).phase == Phase::spin_glass);
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.quad_order = 10;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.damping = 0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.tol = 0;
  CHECK_THROWS(cfg.validate());
  CHECK_THROWS(solve_finite_t(-0.1, 1, 0, SolverConfig{}));
}
