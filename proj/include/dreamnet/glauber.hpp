#pragma once

#include "dreamnet/kernel.hpp"
#include "dreamnet/rng.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dreamnet {

enum class UpdateMode { sequential, parallel };

struct McConfig {
  double beta = 1.0;
  bool zero_temperature = false;
  int burn_in_sweeps = 1000;
  int measure_sweeps = 1000;
  int realizations = 10;
  std::uint64_t seed = 0;
  UpdateMode update_mode = UpdateMode::sequential;
  // Equilibration: two consecutive windows must agree on mean m1 within window_tol;
  // otherwise the burn-in doubles, up to max_burn_in_sweeps.
  int window_sweeps = 500;
  double window_tol = 0.01;
  int max_burn_in_sweeps = 8000;
  int max_relax_sweeps = 1000;
  int jobs = 1;

  void validate() const;
};

struct ExperimentRecord {
  int n = 0;
  int p = 0;
  double alpha = 0;        // exactly p / n
  double temperature = 0;  // 0 for zero-T experiments
  double t = 0;
  double p_flip = 0;       // basin experiments only
  std::uint64_t seed = 0;
  std::string observable;
  double value = 0;
  double std_error = 0;
  std::string note;
};

// ---------------------------------------------------------------- dense reference dynamics

/// h_i with the self-coupling removed.
double dynamic_field(const CouplingMatrix<double>& j, const NetworkState& s, int i);

/// N sequential heat-bath updates: sigma_i = +1 with probability (1 + tanh(beta h_i)) / 2.
void glauber_sweep(const CouplingMatrix<double>& j, NetworkState& s, double beta, Rng& rng);

/// sigma_i <- sign(h_i), ties keep the spin. Returns true if the spin flipped.
bool zero_t_update(const CouplingMatrix<double>& j, NetworkState& s, int i);

/// Sequential zero-T sweeps until no spin flips. Returns sweeps used, or -1 at the cap.
int relax_zero_t(const CouplingMatrix<double>& j, NetworkState& s, int max_sweeps = 1000);

/// Simultaneous sigma_i <- sign(h_i) for all i, ties keep the spin.
NetworkState zero_t_parallel_step(const CouplingMatrix<double>& j, const NetworkState& s);

enum class ParallelOutcome { fixed_point, two_cycle, step_cap };
std::string to_string(ParallelOutcome o);

struct ParallelRelaxation {
  NetworkState state;
  ParallelOutcome outcome;
  int steps;
};

ParallelRelaxation relax_zero_t_parallel(const CouplingMatrix<double>& j, NetworkState s, int max_steps = 1000);

// ---------------------------------------------------------------- factorized engine

/// Network with J = xi^T K xi / N, kept as B = xi^T K (N x P) and integer overlaps
/// S = xi sigma, so each field costs O(P) and flips update S exactly.
class PatternNetwork {
 public:
  PatternNetwork(const PatternSet& ps, const Matrix<double>& kernel);
  static PatternNetwork dream(const PatternSet& ps, double t);

  int n() const { return n_; }
  int p() const { return p_; }

  void set_state(const NetworkState& s);
  NetworkState state() const;
  std::int8_t spin(int i) const { return sigma_[i]; }

  /// Field without the self-coupling (drives the dynamics).
  double field(int i) const { return b_.row(i).dot(s_) / n_ - diag_(i) * sigma_[i]; }
  /// Field with the self-coupling, as in local_fields.
  double full_field(int i) const { return b_.row(i).dot(s_) / n_; }
  double self_coupling(int i) const { return diag_(i); }

  void flip(int i);
  double overlap(int mu) const { return s_(mu) / n_; }
  Eigen::VectorXd overlaps() const { return s_ / double(n_); }

  void glauber_sweep(double beta, Rng& rng);
  /// One sequential zero-T sweep; returns the number of flips.
  int zero_t_sweep();
  /// Returns sweeps used, or -1 at the cap.
  int relax_zero_t(int max_sweeps);
  ParallelRelaxation relax_parallel(int max_steps);

 private:
  int n_;
  int p_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> b_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xit_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd s_;
  std::vector<std::int8_t> sigma_;
};

// ---------------------------------------------------------------- experiments

struct NetworkSetup {
  int n = 1000;
  int p = 50;
  double t = 0;
};

/// Thermal average of m1 from sigma = xi^1, one record per temperature (0 means zero-T),
/// averaged over cfg.realizations pattern sets.
std::vector<ExperimentRecord> retrieval_curve(const NetworkSetup& setup, std::span<const double> temperatures,
                                              const McConfig& cfg);

struct FieldStats {
  double t = 0;
  double mean = 0;
  double sigma = 0;
  std::vector<double> bin_centers;
  std::vector<double> density;
  int accepted = 0;
  int discarded = 0;
};

/// Zero-T relaxation from random states; fields h_i xi_i^mu sign(m_mu) at fixed points that
/// retrieve some pattern mu (|m_mu| >= retrieval_threshold), Gaussian fit by moments.
FieldStats field_statistics(const NetworkSetup& setup, const McConfig& cfg, int evolutions = 20, int bins = 80,
                            double retrieval_threshold = 0.9);

/// Start from xi^1 with each spin flipped with probability p_flip, relax at zero T, success iff
/// m1 is the largest overlap in magnitude and positive. Flip decisions share one uniform per
/// spin across p_flip values.
std::vector<ExperimentRecord> basin_experiment(const NetworkSetup& setup, std::span<const double> flip_probs,
                                               const McConfig& cfg, int evolutions = 20);

/// Mean and standard error of per-realization values; +inf error for a single value.
std::pair<double, double> mean_and_stderr(std::span<const double> values);

void write_retrieval_csv(std::span<const ExperimentRecord> records, std::ostream& os);
void write_basin_csv(std::span<const ExperimentRecord> records, std::ostream& os);
void write_field_histogram_csv(std::span<const FieldStats> stats, std::ostream& os);
void write_field_summary_csv(std::span<const FieldStats> stats, std::ostream& os);

}  // namespace dreamnet
