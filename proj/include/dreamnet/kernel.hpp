#pragma once

#include "dreamnet/patterns.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace dreamnet {

enum class CouplingKind { hebbian, dream, dotsenko, projector };

std::string to_string(CouplingKind kind);

template <typename Scalar = double>
struct CouplingMatrix {
  Matrix<Scalar> j;
  CouplingKind kind = CouplingKind::hebbian;
  std::optional<double> t;
  // Built from the t -> infinity projector limit plus a first-order 1/t term.
  bool asymptotic = false;

  int n() const { return int(j.rows()); }
};

class NetworkState {
 public:
  using Spins = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;

  explicit NetworkState(Spins sigma);
  static NetworkState from_pattern(const PatternSet& ps, int mu);

  int size() const { return int(sigma_.size()); }
  std::int8_t operator[](int i) const { return sigma_(i); }
  void flip(int i) { sigma_(i) = std::int8_t(-sigma_(i)); }
  void set(int i, std::int8_t v);
  const Spins& spins() const { return sigma_; }
  NetworkState operator-() const { return NetworkState(Spins(-sigma_)); }
  bool operator==(const NetworkState& o) const { return sigma_ == o.sigma_; }

  template <typename Scalar = double>
  Vector<Scalar> as() const {
    return sigma_.template cast<Scalar>();
  }

 private:
  Spins sigma_;
};

/// Sleep extent above which dream_coupling switches to the projector limit.
inline constexpr double kAsymptoticSleep = 1e8;

/// J = xi^T K xi / N for a P x P kernel K, symmetrized after assembly.
template <typename Scalar, typename Derived>
Matrix<Scalar> kernel_coupling(const PatternSet& ps, const Eigen::MatrixBase<Derived>& k) {
  if (k.rows() != ps.p() || k.cols() != ps.p()) throw std::invalid_argument("kernel_coupling: kernel size mismatch");
  const Matrix<Scalar> x = ps.as<Scalar>();
  Matrix<Scalar> j = x.transpose() * k.template cast<Scalar>() * x / Scalar(ps.n());
  return symmetrized(j);
}

/// (I + tC)^{-1} scaled by `scale`, solved through an LLT factorization.
template <typename Scalar>
Matrix<Scalar> resolvent_kernel(const Matrix<Scalar>& c, Scalar t, Scalar scale) {
  const auto p = c.rows();
  Matrix<Scalar> a = Matrix<Scalar>::Identity(p, p) + t * c;
  Eigen::LLT<Matrix<Scalar>> llt(a);
  if (llt.info() != Eigen::Success) throw std::domain_error("resolvent_kernel: I + tC is not positive definite");
  Matrix<Scalar> k = llt.solve(Matrix<Scalar>::Identity(p, p) * scale);
  return symmetrized(k);
}

/// C^{-1}; throws std::domain_error naming the smallest eigenvalue if C is singular.
template <typename Scalar>
Matrix<Scalar> inverse_correlation(const Matrix<Scalar>& c) {
  const Scalar lmin = min_eigenvalue(c);
  if (!(lmin > Scalar(1e-10)))
    throw std::domain_error("correlation matrix is singular (smallest eigenvalue " + std::to_string(double(lmin)) + ")");
  Matrix<Scalar> inv;
  if (c.rows() <= 64) {
    inv = c.inverse();
  } else {
    inv = c.llt().solve(Matrix<Scalar>::Identity(c.rows(), c.cols()));
  }
  return symmetrized(inv);
}

/// Dream kernel (1+t)(I+tC)^{-1}; switches to C^{-1} + (C^{-1} - C^{-2})/t past kAsymptoticSleep.
template <typename Scalar>
Matrix<Scalar> dream_kernel(const CorrelationMatrix<Scalar>& c, Scalar t, bool* asymptotic = nullptr) {
  if (!(t >= 0)) throw std::invalid_argument("dream_kernel: t must be non-negative");
  if (asymptotic) *asymptotic = false;
  if (t > Scalar(kAsymptoticSleep) && min_eigenvalue(c.matrix()) > Scalar(1e-10)) {
    const Matrix<Scalar> inv = inverse_correlation(c.matrix());
    if (asymptotic) *asymptotic = true;
    return symmetrized(inv + (inv - inv * inv) / t);
  }
  return resolvent_kernel<Scalar>(c.matrix(), t, Scalar(1) + t);
}

template <typename Scalar = double>
CouplingMatrix<Scalar> hebbian(const PatternSet& ps) {
  Matrix<Scalar> x = ps.as<Scalar>();
  Matrix<Scalar> j = x.transpose() * x / Scalar(ps.n());
  return {symmetrized(j), CouplingKind::hebbian, std::nullopt, false};
}

template <typename Scalar = double>
CouplingMatrix<Scalar> dream_coupling(const PatternSet& ps, double t) {
  if (!(t >= 0)) throw std::invalid_argument("dream_coupling: t must be non-negative");
  const auto c = correlation_matrix<Scalar>(ps);
  bool asym = false;
  const Matrix<Scalar> k = dream_kernel<Scalar>(c, Scalar(t), &asym);
  return {kernel_coupling<Scalar>(ps, k), CouplingKind::dream, t, asym};
}

template <typename Scalar = double>
CouplingMatrix<Scalar> dotsenko_coupling(const PatternSet& ps, double t) {
  if (!(t >= 0)) throw std::invalid_argument("dotsenko_coupling: t must be non-negative");
  const auto c = correlation_matrix<Scalar>(ps);
  const Matrix<Scalar> k = resolvent_kernel<Scalar>(c.matrix(), Scalar(t), Scalar(1));
  return {kernel_coupling<Scalar>(ps, k), CouplingKind::dotsenko, t, false};
}

template <typename Scalar = double>
CouplingMatrix<Scalar> projector(const PatternSet& ps) {
  const auto c = correlation_matrix<Scalar>(ps);
  return {kernel_coupling<Scalar>(ps, inverse_correlation(c.matrix())), CouplingKind::projector, std::nullopt, false};
}

/// h_i = sum_j J_ij sigma_j, diagonal included.
template <typename Scalar>
Vector<Scalar> local_fields(const CouplingMatrix<Scalar>& j, const NetworkState& s) {
  if (j.n() != s.size()) throw std::invalid_argument("local_fields: dimension mismatch");
  return j.j * s.as<Scalar>();
}

/// m_mu = (1/N) sum_i xi_i^mu sigma_i.
Eigen::VectorXd mattis_overlaps(const PatternSet& ps, const NetworkState& s);

/// H = -1/2 sum_{i != j} J_ij sigma_i sigma_j.
template <typename Scalar>
Scalar energy(const CouplingMatrix<Scalar>& j, const NetworkState& s) {
  if (j.n() != s.size()) throw std::invalid_argument("energy: dimension mismatch");
  const Vector<Scalar> v = s.as<Scalar>();
  return Scalar(-0.5) * (v.dot(j.j * v) - j.j.diagonal().sum());
}

struct CouplingHeader {
  CouplingKind kind = CouplingKind::hebbian;
  double t = 0;
  int n = 0;
  int p = 0;
  std::uint64_t seed = 0;
};

void write_coupling_csv(const Matrix<double>& j, std::ostream& os);

/// Binary: "DNCM", u32 version, u32 kind, f64 t, u32 n, u32 p, u64 seed, n*n f64 column-major.
void write_coupling_binary(const Matrix<double>& j, const CouplingHeader& h, std::ostream& os);
Matrix<double> read_coupling_binary(std::istream& is, CouplingHeader* h = nullptr);

}  // namespace dreamnet
