#pragma once

#include <functional>
#include <vector>

namespace dreamnet {

/// Nodes and weights for E[f(X)], X ~ N(0,1). Weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal measure (Golub-Welsch).
/// Cached per order; thread safe.
const GaussRule& gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
const GaussRule& gauss_legendre(int order);

/// Integral of f against the standard Gaussian measure. Throws std::domain_error on non-finite values.
double gaussian_integral(const std::function<double(double)>& f, int order = 120);

/// Gaussian averages of tanh, sech^2 and log cosh of the affine argument a + b x.
/// Gauss-Hermite for b <= 1; above that, composite Gauss-Legendre in y = a + b x on
/// [-20, 20] with the tails done in closed form.
class AffineGaussian {
 public:
  explicit AffineGaussian(int order = 120);

  int order() const { return order_; }

  struct Moments {
    double tanh = 0;   // E tanh(a + bX)
    double sech2 = 0;  // E sech^2(a + bX)
  };
  Moments moments(double a, double b) const;
  double log_cosh(double a, double b) const;

 private:
  template <typename F>
  void composite(double a, double b, F&& acc) const;

  int order_;
  const GaussRule* gh_;
  const GaussRule* gl_;
};

double log_cosh(double y);

}  // namespace dreamnet
