#include "dreamnet/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace dreamnet {

namespace {

constexpr double kYMax = 20.0;
constexpr double kPanelWidth = 0.5;
constexpr double kCutSigmas = 12.0;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("golub_welsch: eigensolver failed");
  GaussRule r;
  const auto n = diag.size();
  r.nodes.resize(n);
  r.weights.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    r.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    r.weights[k] = mass * v0 * v0;
  }
  return r;
}

GaussRule make_hermite(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(double(k));
  GaussRule r = golub_welsch(diag, sub, 1.0);
  // Symmetrize to kill the eigensolver's tiny asymmetry in the nodes.
  for (int k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (r.nodes[n - 1 - k] - r.nodes[k]);
    const double w = 0.5 * (r.weights[k] + r.weights[n - 1 - k]);
    r.nodes[k] = -x;
    r.nodes[n - 1 - k] = x;
    r.weights[k] = r.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

GaussRule make_legendre(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = double(k) / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, sub, 2.0);
}

const GaussRule& cached(std::map<int, std::unique_ptr<GaussRule>>& cache, int order, GaussRule (*make)(int)) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, std::make_unique<GaussRule>(make(order))).first;
  return *it->second;
}

double upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
double lower_tail(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double density(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

}  // namespace

const GaussRule& gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be positive");
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  return cached(cache, order, &make_hermite);
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  return cached(cache, order, &make_legendre);
}

double gaussian_integral(const std::function<double(double)>& f, int order) {
  const GaussRule& r = gauss_hermite(order);
  double s = 0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    const double v = f(r.nodes[k]);
    if (!std::isfinite(v)) throw std::domain_error("gaussian_integral: non-finite integrand value");
    s += r.weights[k] * v;
  }
  return s;
}

double log_cosh(double y) {
  const double ay = std::abs(y);
  return ay + std::log1p(std::exp(-2.0 * ay)) - std::log(2.0);
}

AffineGaussian::AffineGaussian(int order)
    : order_(order), gh_(&gauss_hermite(order)), gl_(&gauss_legendre(std::max(8, order / 6))) {
  if (order < 20) throw std::invalid_argument("AffineGaussian: order must be at least 20");
}

template <typename F>
void AffineGaussian::composite(double a, double b, F&& acc) const {
  const double lo = std::max(-kYMax, a - kCutSigmas * b);
  const double hi = std::min(kYMax, a + kCutSigmas * b);
  if (hi <= lo) return;
  const int panels = int(std::ceil((hi - lo) / kPanelWidth));
  const double h = (hi - lo) / panels;
  const auto& x = gl_->nodes;
  const auto& w = gl_->weights;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double y = mid + 0.5 * h * x[j];
      const double z = (y - a) / b;
      acc(y, 0.5 * h * w[j] * density(z) / b);
    }
  }
}

AffineGaussian::Moments AffineGaussian::moments(double a, double b) const {
  Moments m;
  auto add = [&m](double y, double weight) {
    const double e = std::exp(-2.0 * std::abs(y));
    const double th = std::copysign((1.0 - e) / (1.0 + e), y);
    m.tanh += weight * th;
    m.sech2 += weight * 4.0 * e / ((1.0 + e) * (1.0 + e));
  };
  if (b <= 1.0) {
    for (std::size_t k = 0; k < gh_->nodes.size(); ++k) add(a + b * gh_->nodes[k], gh_->weights[k]);
    return m;
  }
  composite(a, b, add);
  if (a + kCutSigmas * b > kYMax) m.tanh += upper_tail((kYMax - a) / b);
  if (a - kCutSigmas * b < -kYMax) m.tanh -= lower_tail((-kYMax - a) / b);
  return m;
}

double AffineGaussian::log_cosh(double a, double b) const {
  double s = 0;
  auto add = [&s](double y, double weight) { s += weight * dreamnet::log_cosh(y); };
  if (b <= 1.0) {
    for (std::size_t k = 0; k < gh_->nodes.size(); ++k) add(a + b * gh_->nodes[k], gh_->weights[k]);
    return s;
  }
  composite(a, b, add);
  const double ln2 = std::log(2.0);
  if (a + kCutSigmas * b > kYMax) {
    const double z = (kYMax - a) / b;
    s += (a - ln2) * upper_tail(z) + b * density(z);
  }
  if (a - kCutSigmas * b < -kYMax) {
    const double z = (-kYMax - a) / b;
    s += (-a - ln2) * lower_tail(z) + b * density(z);
  }
  return s;
}

}  // namespace dreamnet
