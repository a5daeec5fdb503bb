#include "dreamnet/glauber.hpp"
#include "dreamnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace dreamnet {

void McConfig::validate() const {
  if (!zero_temperature && !(beta >= 0 && std::isfinite(beta)))
    throw std::invalid_argument("McConfig: beta must be finite and non-negative");
  if (burn_in_sweeps < 1 || measure_sweeps < 1 || realizations < 1 || window_sweeps < 1 || max_relax_sweeps < 1)
    throw std::invalid_argument("McConfig: counts must be at least 1");
  if (update_mode == UpdateMode::parallel && !zero_temperature)
    throw std::invalid_argument("McConfig: parallel updates are only allowed at zero temperature");
}

std::string to_string(ParallelOutcome o) {
  switch (o) {
    case ParallelOutcome::fixed_point: return "fixed_point";
    case ParallelOutcome::two_cycle: return "two_cycle";
    case ParallelOutcome::step_cap: return "step_cap";
  }
  return "unknown";
}

// ---------------------------------------------------------------- dense reference dynamics

double dynamic_field(const CouplingMatrix<double>& j, const NetworkState& s, int i) {
  if (j.n() != s.size()) throw std::invalid_argument("dynamic_field: dimension mismatch");
  double h = 0;
  for (int k = 0; k < s.size(); ++k)
    if (k != i) h += j.j(i, k) * s[k];
  return h;
}

void glauber_sweep(const CouplingMatrix<double>& j, NetworkState& s, double beta, Rng& rng) {
  for (int i = 0; i < s.size(); ++i) {
    const double h = dynamic_field(j, s, i);
    const double p_up = 1.0 / (1.0 + std::exp(-2.0 * beta * h));
    s.set(i, rng.uniform() < p_up ? 1 : -1);
  }
}

bool zero_t_update(const CouplingMatrix<double>& j, NetworkState& s, int i) {
  const double h = dynamic_field(j, s, i);
  if (h * s[i] < 0) {
    s.flip(i);
    return true;
  }
  return false;
}

int relax_zero_t(const CouplingMatrix<double>& j, NetworkState& s, int max_sweeps) {
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    int flips = 0;
    for (int i = 0; i < s.size(); ++i) flips += zero_t_update(j, s, i);
    if (flips == 0) return sweep;
  }
  return -1;
}

NetworkState zero_t_parallel_step(const CouplingMatrix<double>& j, const NetworkState& s) {
  NetworkState next = s;
  for (int i = 0; i < s.size(); ++i) {
    const double h = dynamic_field(j, s, i);
    if (h > 0) next.set(i, 1);
    if (h < 0) next.set(i, -1);
  }
  return next;
}

ParallelRelaxation relax_zero_t_parallel(const CouplingMatrix<double>& j, NetworkState s, int max_steps) {
  std::optional<NetworkState> before;
  for (int step = 1; step <= max_steps; ++step) {
    NetworkState next = zero_t_parallel_step(j, s);
    if (next == s) return {s, ParallelOutcome::fixed_point, step};
    if (before && next == *before) return {next, ParallelOutcome::two_cycle, step};
    before = s;
    s = next;
  }
  return {s, ParallelOutcome::step_cap, max_steps};
}

// ---------------------------------------------------------------- factorized engine

PatternNetwork::PatternNetwork(const PatternSet& ps, const Matrix<double>& kernel) : n_(ps.n()), p_(ps.p()) {
  if (kernel.rows() != p_ || kernel.cols() != p_) throw std::invalid_argument("PatternNetwork: kernel size mismatch");
  const Matrix<double> k = symmetrized(kernel);
  xit_ = ps.as<double>().transpose();
  b_ = xit_ * k;
  diag_ = (b_.cwiseProduct(xit_)).rowwise().sum() / double(n_);
  s_ = Eigen::VectorXd::Zero(p_);
  sigma_.assign(n_, 1);
  s_ = xit_.colwise().sum().transpose();
}

PatternNetwork PatternNetwork::dream(const PatternSet& ps, double t) {
  return PatternNetwork(ps, dream_kernel<double>(correlation_matrix<double>(ps), t));
}

void PatternNetwork::set_state(const NetworkState& s) {
  if (s.size() != n_) throw std::invalid_argument("PatternNetwork::set_state: dimension mismatch");
  Eigen::VectorXd v(n_);
  for (int i = 0; i < n_; ++i) {
    sigma_[i] = s[i];
    v(i) = s[i];
  }
  s_ = xit_.transpose() * v;
}

NetworkState PatternNetwork::state() const {
  NetworkState::Spins v(n_);
  for (int i = 0; i < n_; ++i) v(i) = sigma_[i];
  return NetworkState(std::move(v));
}

void PatternNetwork::flip(int i) {
  sigma_[i] = std::int8_t(-sigma_[i]);
  s_ += (2.0 * sigma_[i]) * xit_.row(i).transpose();
}

void PatternNetwork::glauber_sweep(double beta, Rng& rng) {
  for (int i = 0; i < n_; ++i) {
    const double h = field(i);
    const double p_up = 1.0 / (1.0 + std::exp(-2.0 * beta * h));
    const std::int8_t target = rng.uniform() < p_up ? 1 : -1;
    if (target != sigma_[i]) flip(i);
  }
}

int PatternNetwork::zero_t_sweep() {
  int flips = 0;
  for (int i = 0; i < n_; ++i) {
    if (field(i) * sigma_[i] < 0) {
      flip(i);
      ++flips;
    }
  }
  return flips;
}

int PatternNetwork::relax_zero_t(int max_sweeps) {
  for (int sweep = 1; sweep <= max_sweeps; ++sweep)
    if (zero_t_sweep() == 0) return sweep;
  return -1;
}

ParallelRelaxation PatternNetwork::relax_parallel(int max_steps) {
  std::optional<NetworkState> before;
  NetworkState cur = state();
  for (int step = 1; step <= max_steps; ++step) {
    std::vector<int> to_flip;
    for (int i = 0; i < n_; ++i)
      if (field(i) * sigma_[i] < 0) to_flip.push_back(i);
    if (to_flip.empty()) return {cur, ParallelOutcome::fixed_point, step};
    for (int i : to_flip) flip(i);
    NetworkState next = state();
    if (before && next == *before) return {next, ParallelOutcome::two_cycle, step};
    before = cur;
    cur = next;
  }
  return {cur, ParallelOutcome::step_cap, max_steps};
}

// ---------------------------------------------------------------- experiments

std::pair<double, double> mean_and_stderr(std::span<const double> values) {
  const double n = double(values.size());
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

namespace {

// Relaxes at zero T in the configured mode. False if no fixed point was reached.
bool relax(PatternNetwork& net, const McConfig& cfg) {
  if (cfg.update_mode == UpdateMode::parallel) {
    const auto r = net.relax_parallel(cfg.max_relax_sweeps);
    if (r.outcome != ParallelOutcome::fixed_point) return false;
    net.set_state(r.state);
    return true;
  }
  return net.relax_zero_t(cfg.max_relax_sweeps) > 0;
}

PatternSet realization_patterns(const NetworkSetup& s, std::uint64_t master, int r) {
  return generate_patterns(s.n, s.p, derive_seed(master, {std::uint64_t(r)}));
}

void check_setup(const NetworkSetup& s) {
  if (s.n < 1 || s.p < 1) throw std::invalid_argument("NetworkSetup: n and p must be positive");
  if (!(s.t >= 0)) throw std::invalid_argument("NetworkSetup: t must be non-negative");
}

struct ThermalResult {
  double m1 = 0;
  bool equilibrated = true;
};

double window_mean(PatternNetwork& net, double beta, Rng& rng, int sweeps) {
  double acc = 0;
  for (int k = 0; k < sweeps; ++k) {
    net.glauber_sweep(beta, rng);
    acc += net.overlap(0);
  }
  return acc / sweeps;
}

ThermalResult thermal_m1(PatternNetwork& net, double beta, Rng& rng, const McConfig& cfg) {
  ThermalResult res;
  int burned = 0;
  int target = cfg.burn_in_sweeps;
  for (;;) {
    for (; burned < target; ++burned) net.glauber_sweep(beta, rng);
    const double a = window_mean(net, beta, rng, cfg.window_sweeps);
    const double b = window_mean(net, beta, rng, cfg.window_sweeps);
    burned += 2 * cfg.window_sweeps;
    if (std::abs(a - b) < cfg.window_tol) break;
    if (2 * target > cfg.max_burn_in_sweeps) {
      res.equilibrated = false;
      break;
    }
    target *= 2;
  }
  res.m1 = window_mean(net, beta, rng, cfg.measure_sweeps);
  return res;
}

}  // namespace

std::vector<ExperimentRecord> retrieval_curve(const NetworkSetup& setup, std::span<const double> temperatures,
                                              const McConfig& cfg) {
  check_setup(setup);
  McConfig c = cfg;
  c.zero_temperature = false;
  c.validate();
  const int m = cfg.realizations;
  const int nt = int(temperatures.size());
  std::vector<double> values(std::size_t(m) * nt);
  std::vector<char> equilibrated(values.size(), 1);
  parallel_for(m, cfg.jobs, [&](int r) {
    const PatternSet ps = realization_patterns(setup, cfg.seed, r);
    PatternNetwork net = PatternNetwork::dream(ps, setup.t);
    for (int k = 0; k < nt; ++k) {
      const double temp = temperatures[k];
      if (!(temp >= 0)) throw std::invalid_argument("retrieval_curve: temperatures must be non-negative");
      net.set_state(NetworkState::from_pattern(ps, 0));
      double m1;
      if (temp == 0) {
        McConfig zt = cfg;
        zt.zero_temperature = true;
        equilibrated[std::size_t(r) * nt + k] = relax(net, zt);
        m1 = net.overlap(0);
      } else {
        Rng rng(cfg.seed, {std::uint64_t(r), std::uint64_t(k), 0x7e3aULL});
        const ThermalResult tr = thermal_m1(net, 1.0 / temp, rng, cfg);
        m1 = tr.m1;
        equilibrated[std::size_t(r) * nt + k] = tr.equilibrated;
      }
      values[std::size_t(r) * nt + k] = m1;
    }
  });
  std::vector<ExperimentRecord> out;
  for (int k = 0; k < nt; ++k) {
    std::vector<double> col(m);
    int unequilibrated = 0;
    for (int r = 0; r < m; ++r) {
      col[r] = values[std::size_t(r) * nt + k];
      unequilibrated += !equilibrated[std::size_t(r) * nt + k];
    }
    const auto [mean, se] = mean_and_stderr(col);
    ExperimentRecord rec;
    rec.n = setup.n;
    rec.p = setup.p;
    rec.alpha = double(setup.p) / double(setup.n);
    rec.temperature = temperatures[k];
    rec.t = setup.t;
    rec.seed = cfg.seed;
    rec.observable = "m1";
    rec.value = mean;
    rec.std_error = se;
    if (m == 1) rec.note = "single_realization";
    if (unequilibrated) rec.note += (rec.note.empty() ? "" : ";") + std::string("unequilibrated=") + std::to_string(unequilibrated);
    out.push_back(rec);
  }
  return out;
}

FieldStats field_statistics(const NetworkSetup& setup, const McConfig& cfg, int evolutions, int bins,
                            double retrieval_threshold) {
  check_setup(setup);
  McConfig c = cfg;
  c.zero_temperature = true;
  c.validate();
  if (evolutions < 1 || bins < 1) throw std::invalid_argument("field_statistics: evolutions and bins must be positive");
  const int m = cfg.realizations;
  std::vector<std::vector<double>> fields(std::size_t(m) * evolutions);
  std::vector<char> accepted(fields.size(), 0);
  parallel_for(m, cfg.jobs, [&](int r) {
    const PatternSet ps = realization_patterns(setup, cfg.seed, r);
    PatternNetwork net = PatternNetwork::dream(ps, setup.t);
    for (int e = 0; e < evolutions; ++e) {
      Rng rng(cfg.seed, {std::uint64_t(r), std::uint64_t(e), 0xf1e1dULL});
      NetworkState::Spins v(setup.n);
      for (int i = 0; i < setup.n; ++i) v(i) = rng.coin() ? 1 : -1;
      net.set_state(NetworkState(std::move(v)));
      if (!relax(net, c)) continue;
      const Eigen::VectorXd ov = net.overlaps();
      Eigen::Index mu;
      const double best = ov.cwiseAbs().maxCoeff(&mu);
      if (best < retrieval_threshold) continue;
      const double gauge = ov(mu) > 0 ? 1.0 : -1.0;
      auto& h = fields[std::size_t(r) * evolutions + e];
      h.resize(setup.n);
      for (int i = 0; i < setup.n; ++i) h[i] = net.full_field(i) * ps(int(mu), i) * gauge;
      accepted[std::size_t(r) * evolutions + e] = 1;
    }
  });
  FieldStats st;
  st.t = setup.t;
  std::vector<double> all;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (accepted[k]) {
      ++st.accepted;
      all.insert(all.end(), fields[k].begin(), fields[k].end());
    } else {
      ++st.discarded;
    }
  }
  if (all.empty()) {
    st.mean = st.sigma = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  double mean = 0;
  for (double h : all) mean += h;
  mean /= double(all.size());
  double ss = 0;
  for (double h : all) ss += (h - mean) * (h - mean);
  st.mean = mean;
  st.sigma = std::sqrt(ss / double(all.size()));
  const auto [lo_it, hi_it] = std::minmax_element(all.begin(), all.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  for (double h : all) counts[std::min(bins - 1, int((h - lo) / width))] += 1;
  for (int b = 0; b < bins; ++b) {
    st.bin_centers.push_back(lo + (b + 0.5) * width);
    st.density.push_back(counts[b] / (double(all.size()) * width));
  }
  return st;
}

std::vector<ExperimentRecord> basin_experiment(const NetworkSetup& setup, std::span<const double> flip_probs,
                                               const McConfig& cfg, int evolutions) {
  check_setup(setup);
  McConfig c = cfg;
  c.zero_temperature = true;
  c.validate();
  if (evolutions < 1) throw std::invalid_argument("basin_experiment: evolutions must be positive");
  for (double pf : flip_probs)
    if (!(pf >= 0 && pf <= 1)) throw std::invalid_argument("basin_experiment: flip probabilities must lie in [0, 1]");
  const int m = cfg.realizations;
  const int np = int(flip_probs.size());
  std::vector<double> freq(std::size_t(m) * np, 0.0);
  parallel_for(m, cfg.jobs, [&](int r) {
    const PatternSet ps = realization_patterns(setup, cfg.seed, r);
    PatternNetwork net = PatternNetwork::dream(ps, setup.t);
    const NetworkState target = NetworkState::from_pattern(ps, 0);
    std::vector<double> u(setup.n);
    for (int e = 0; e < evolutions; ++e) {
      Rng rng(cfg.seed, {std::uint64_t(r), std::uint64_t(e), 0xba5147ULL});
      for (double& x : u) x = rng.uniform();
      for (int k = 0; k < np; ++k) {
        NetworkState s = target;
        for (int i = 0; i < setup.n; ++i)
          if (u[i] < flip_probs[k]) s.flip(i);
        net.set_state(s);
        bool ok = relax(net, c);
        if (ok) {
          const Eigen::VectorXd ov = net.overlaps();
          const double m1 = ov(0);
          ok = m1 > 0 && m1 >= ov.cwiseAbs().maxCoeff();
        }
        freq[std::size_t(r) * np + k] += ok ? 1.0 / evolutions : 0.0;
      }
    }
  });
  std::vector<ExperimentRecord> out;
  for (int k = 0; k < np; ++k) {
    std::vector<double> col(m);
    for (int r = 0; r < m; ++r) col[r] = freq[std::size_t(r) * np + k];
    const auto [mean, se] = mean_and_stderr(col);
    ExperimentRecord rec;
    rec.n = setup.n;
    rec.p = setup.p;
    rec.alpha = double(setup.p) / double(setup.n);
    rec.temperature = 0;
    rec.t = setup.t;
    rec.p_flip = flip_probs[k];
    rec.seed = cfg.seed;
    rec.observable = "retrieval_frequency";
    rec.value = mean;
    rec.std_error = se;
    if (m == 1) rec.note = "single_realization";
    out.push_back(rec);
  }
  return out;
}

void write_retrieval_csv(std::span<const ExperimentRecord> records, std::ostream& os) {
  os << "T,t,alpha,m1,stderr\n" << std::setprecision(10);
  for (const auto& r : records)
    os << r.temperature << ',' << r.t << ',' << r.alpha << ',' << r.value << ',' << r.std_error << '\n';
}

void write_basin_csv(std::span<const ExperimentRecord> records, std::ostream& os) {
  os << "p_flip,t,freq,stderr\n" << std::setprecision(10);
  for (const auto& r : records) os << r.p_flip << ',' << r.t << ',' << r.value << ',' << r.std_error << '\n';
}

void write_field_histogram_csv(std::span<const FieldStats> stats, std::ostream& os) {
  os << "bin_center,density,t\n" << std::setprecision(10);
  for (const auto& s : stats)
    for (std::size_t b = 0; b < s.bin_centers.size(); ++b)
      os << s.bin_centers[b] << ',' << s.density[b] << ',' << s.t << '\n';
}

void write_field_summary_csv(std::span<const FieldStats> stats, std::ostream& os) {
  os << "t,mean,sigma,accepted,discarded\n" << std::setprecision(10);
  for (const auto& s : stats)
    os << s.t << ',' << s.mean << ',' << s.sigma << ',' << s.accepted << ',' << s.discarded << '\n';
}

}  // namespace dreamnet
