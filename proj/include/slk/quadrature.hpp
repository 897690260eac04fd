#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace slk {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
template <typename Scalar = double>
struct GaussLegendre {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: order must be positive");
    const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
    // Returns P_n(x) and P_n'(x) by the three-term recurrence.
    auto legendre = [n](Scalar x) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) return std::pair<Scalar, Scalar>{x, Scalar(1)};
      return std::pair<Scalar, Scalar>{p1, n * (x * p1 - p0) / (x * x - 1)};
    };
    for (int i = 0; i < n; ++i) {
      Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
      for (int it = 0; it < 100; ++it) {
        auto [p, dp] = legendre(x);
        Scalar dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
      }
      auto [p, dp] = legendre(x);
      (void)p;
      nodes(i) = x;
      weights(i) = 2 / ((1 - x * x) * dp * dp);
    }
  }

  int size() const { return static_cast<int>(nodes.size()); }

  /// Integral of f over [a, b].
  template <typename F>
  Scalar integrate(F&& f, Scalar a, Scalar b) const {
    const Scalar mid = (a + b) / 2, half = (b - a) / 2;
    Scalar s = 0;
    for (int i = 0; i < size(); ++i) s += weights(i) * f(mid + half * nodes(i));
    return s * half;
  }
};

/// Shared Gauss-Legendre tables for common orders (thread-safe, built once).
const GaussLegendre<double>& gauss_legendre(int n);

struct AdaptiveResult {
  double value = 0;
  double error = 0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_intervals = 2000);

/// Composite Gauss-Legendre over [a, b] split into `panels` equal pieces.
template <typename F>
double integrate_composite(F&& f, double a, double b, int panels, int order = 8) {
  const auto& rule = gauss_legendre(order);
  const double w = (b - a) / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) s += rule.integrate(f, a + p * w, a + (p + 1) * w);
  return s;
}

}  // namespace slk
