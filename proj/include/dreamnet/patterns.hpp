#pragma once

#include "dreamnet/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace dreamnet {

/// P x N matrix of +-1 entries, one pattern per row.
using PatternMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class PatternSet {
 public:
  /// Throws std::invalid_argument if any entry is not +-1 or a dimension is zero.
  PatternSet(PatternMatrix entries, std::uint64_t seed = 0);

  int n() const { return int(xi_.cols()); }
  int p() const { return int(xi_.rows()); }
  double alpha() const { return double(p()) / double(n()); }
  std::uint64_t seed() const { return seed_; }
  const PatternMatrix& entries() const { return xi_; }
  std::int8_t operator()(int mu, int i) const { return xi_(mu, i); }

  template <typename Scalar = double>
  Matrix<Scalar> as() const {
    return xi_.template cast<Scalar>();
  }

  bool operator==(const PatternSet& o) const { return xi_ == o.xi_ && seed_ == o.seed_; }

 private:
  PatternMatrix xi_;
  std::uint64_t seed_;
};

PatternSet generate_patterns(int n, int p, std::uint64_t seed);

/// Integer Gram matrix xi xi^T; exact.
Eigen::MatrixXi pattern_gram(const PatternSet& ps);

template <typename Scalar = double>
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix<Scalar> c);
  const Matrix<Scalar>& matrix() const { return c_; }
  int size() const { return int(c_.rows()); }
  Scalar norm() const { return norm_; }
  Scalar operator()(int mu, int nu) const { return c_(mu, nu); }

 private:
  Matrix<Scalar> c_;
  Scalar norm_;
};

/// Largest eigenvalue of a symmetric PSD matrix. Dense solver for size <= 64,
/// power iteration above with a dense fallback when it stalls.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& c) {
  using S = typename Derived::Scalar;
  if (c.rows() != c.cols()) throw std::invalid_argument("spectral_norm: matrix is not square");
  const S scale = c.cwiseAbs().maxCoeff();
  if (!((c - c.transpose()).cwiseAbs().maxCoeff() <= S(1e-12) * std::max(scale, S(1))))
    throw std::invalid_argument("spectral_norm: matrix is not symmetric");
  if (c.rows() <= 64) return symmetric_eigenvalues(c).maxCoeff();
  S lam = power_iteration_norm(c, S(1e-12));
  if (std::isnan(lam)) lam = symmetric_eigenvalues(c).maxCoeff();
  return lam;
}

template <typename Scalar>
Scalar spectral_norm(const CorrelationMatrix<Scalar>& c) {
  return c.norm();
}

template <typename Scalar>
CorrelationMatrix<Scalar>::CorrelationMatrix(Matrix<Scalar> c) : c_(std::move(c)) {
  norm_ = spectral_norm(c_);
}

template <typename Scalar = double>
CorrelationMatrix<Scalar> correlation_matrix(const PatternSet& ps) {
  Matrix<Scalar> c = pattern_gram(ps).template cast<Scalar>() / Scalar(ps.n());
  return CorrelationMatrix<Scalar>(std::move(c));
}

/// CSV: one pattern per row, entries +-1.
void write_patterns_csv(const PatternSet& ps, std::ostream& os);
PatternSet read_patterns_csv(std::istream& is, std::uint64_t seed = 0);

/// Binary: "DNPS", u32 version, u32 n, u32 p, u64 seed, p*n int8 row-major. Host byte order.
void write_patterns_binary(const PatternSet& ps, std::ostream& os);
PatternSet read_patterns_binary(std::istream& is);

}  // namespace dreamnet
