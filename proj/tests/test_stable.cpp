#include <doctest.h>

#include <cmath>
#include <random>

#include "slk/quadrature.hpp"
#include "slk/stable.hpp"

using namespace slk;

namespace {
Point p1(double x) { return Point(x, 0.0); }
double cauchy(double x) { return 1.0 / (M_PI * (1 + x * x)); }
}  // namespace

TEST_CASE("alpha = 1 subordinator matches the Levy closed form") {
  // T_1 = 2S with E exp(-s S) = exp(-sqrt s): density (2 pi)^{-1/2} s^{-3/2} exp(-1/(2s)).
  for (double s : {0.02, 0.1, 0.5, 1.0, 4.0, 30.0, 1e3, 1e6}) {
    const double cf = std::pow(2 * M_PI, -0.5) * std::pow(s, -1.5) * std::exp(-0.5 / s);
    CHECK(std::abs(subordinator_density({1.0}, s) - cf) <= 1e-8 * cf);
  }
  CHECK_THROWS_AS(subordinator_density({1.0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(subordinator_density({2.0}, 1.0), InvalidArgument);
}

TEST_CASE("subordinator density has unit mass") {
  for (double a : {0.5, 1.0, 1.5}) {
    const SubordinatorLaw law{a};
    auto g = [&](double v) { return subordinator_density(law, std::exp(v)) * std::exp(v); };
    double mass = integrate_adaptive(g, -12.0, 60.0, 1e-14, 1e-11, 20000).value;
    mass += subordinator_tail(law, std::exp(60.0));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(subordination_table(a).mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("subordinator density vanishes faster than any power at the origin") {
  const SubordinatorLaw law{1.0};
  CHECK(subordinator_density(law, 1e-3) < 1e-8);
  const auto fit = fit_small_tail(law);
  // The density at lambda is bounded by the cdf at 2 lambda over lambda.
  CHECK(subordinator_density(law, 1e-3) * 1e-3 <= std::exp(-fit.c1 * std::pow(2e-3, -0.5)));
}

TEST_CASE("integral representation agrees with the power series") {
  for (double rho : {0.2, 0.4, 0.5, 0.7, 0.85})
    for (double x : {1.5, 3.0, 10.0, 100.0}) {
      const double a = one_sided_stable_density_integral(rho, x);
      const double b = one_sided_stable_density_series(rho, x);
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("small-time tail of the subordinator") {
  for (double a : {0.5, 1.0, 1.5}) {
    const auto fit = fit_small_tail({a});
    CHECK(fit.c1 > 0);
    CHECK(fit.holds);
  }
  // alpha = 1: P(T_1 <= l) = erfc(1/sqrt(2 l)).
  for (double l : {0.01, 0.1, 0.5}) CHECK(subordinator_cdf({1.0}, l) == doctest::Approx(std::erfc(1 / std::sqrt(2 * l))).epsilon(1e-8));
}

TEST_CASE("alpha = 1 density is the Cauchy density") {
  StableDensity sd{1.0, 1, 1.0, {}};
  double err = 0;
  for (double x = -10; x <= 10; x += 0.05) err = std::max(err, std::abs(stable_density(sd, p1(x)) - cauchy(x)));
  CHECK(err < 1e-4);
  for (double x : {0.5, 1.0, 2.0}) {
    const double d1 = -(2 / M_PI) * x / std::pow(1 + x * x, 2);
    CHECK(stable_density_deriv(sd, p1(x), {1, 0}) == doctest::Approx(d1).epsilon(1e-4));
    const double d2 = (2 / M_PI) * (3 * x * x - 1) / std::pow(1 + x * x, 3);
    CHECK(stable_density_deriv(sd, p1(x), {2, 0}) == doctest::Approx(d2).epsilon(1e-4));
  }
  CHECK(std::abs(stable_density_deriv(sd, p1(0.0), {1, 0})) < 1e-15);
  CHECK(std::abs(stable_density_deriv(sd, p1(0.0), {3, 0})) < 1e-15);
  // d = 2, alpha = 1: q(1,x) = (1/2pi) (1+|x|^2)^{-3/2}.
  StableDensity s2{1.0, 2, 1.0, {}};
  for (double r : {0.0, 0.7, 3.0}) {
    const Point x(r * 0.6, r * 0.8);
    CHECK(stable_density(s2, x) == doctest::Approx(std::pow(1 + r * r, -1.5) / (2 * M_PI)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(stable_density_deriv(sd, p1(1.0), {4, 0}), InvalidArgument);
}

TEST_CASE("stable density has unit mass on a lattice") {
  for (double a : {1.0, 1.5}) {
    StableDensity sd{a, 1, 1.0, {}};
    const double h = 0.02, L = 400;
    double m = 0;
    for (long i = -static_cast<long>(L / h); i <= static_cast<long>(L / h); ++i) m += h * stable_density(sd, p1(i * h));
    m += 2 * stable_tail_constant(a, 1) * std::pow(L, -a) / a;
    CHECK(m == doctest::Approx(1.0).epsilon(1e-4));
  }
  StableDensity s2{1.5, 2, 1.0, {}};
  const double h = 0.25, L = 40;
  double m = 0;
  const long N = static_cast<long>(L / h);
  for (long i = -N; i < N; ++i)
    for (long j = -N; j < N; ++j) m += h * h * stable_density(s2, Point((i + 0.5) * h, (j + 0.5) * h));
  // Far field beyond the square from the leading asymptotics.
  const double c = stable_tail_constant(1.5, 2);
  m += integrate_composite([&](double th) { return c / 1.5 * std::pow(L / std::max(std::abs(std::cos(th)), std::abs(std::sin(th))), -1.5); },
                           0.0, 2 * M_PI, 64, 8);
  CHECK(m == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("stable scaling identity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> X(-6, 6), T(0.05, 5);
  for (int k = 0; k < 20; ++k) {
    const double a = k % 2 ? 0.7 : 1.6, t = T(rng);
    const Point x(X(rng), X(rng));
    StableDensity st{a, 2, t, {}}, s1{a, 2, 1.0, {}};
    const double lhs = stable_density(st, x);
    const double rhs = std::pow(t, -2 / a) * stable_density(s1, Point(x * std::pow(t, -1 / a)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("density is even and positive") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> X(-20, 20);
  for (int k = 0; k < 100; ++k) {
    StableDensity sd{k % 3 == 0 ? 0.6 : 1.3, k % 2 ? 1 : 2, 0.7, {}};
    const Point x(X(rng), sd.dim == 2 ? X(rng) : 0.0);
    const double a = stable_density(sd, x), b = stable_density(sd, Point(-x));
    CHECK(std::abs(a - b) < 1e-10);
    CHECK(a > 0);
  }
}

TEST_CASE("integrability of derivatives") {
  auto k0 = derivative_integrability_audit({1.3, 1, 1.0, {}}, 0);
  CHECK(k0.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(k0.stability_score < 1e-3);
  auto k1 = derivative_integrability_audit({1.0, 1, 1.0, {}}, 1);
  CHECK(k1.value == doctest::Approx(2 / M_PI).epsilon(0.02));
  auto k2 = derivative_integrability_audit({1.5, 1, 1.0, {}}, 2);
  CHECK(std::isfinite(k2.value));
  CHECK(k2.stability_score < 0.02);
  CHECK(k2.pass);
  auto k3 = derivative_integrability_audit({0.7, 1, 1.0, {}}, 3);
  CHECK(k3.pass);
  // Domain doubling changes int |q'| by under 1%.
  CHECK(std::abs(k1.box_values[3] - k1.box_values[2]) <= 0.01 * k1.box_values[3]);
}

TEST_CASE("Chapman-Kolmogorov on a lattice") {
  for (double a : {1.0, 1.5}) {
    const double t = 0.5, h = 0.05;
    const long N = 20000;  // |y| <= 1000
    StableDensity st{a, 1, t, {}}, s2{a, 1, 2 * t, {}};
    std::vector<double> q(2 * (N + 200) + 1);
    for (long i = -(N + 200); i <= N + 200; ++i) q[i + N + 200] = stable_density(st, p1(i * h));
    auto Q = [&](long i) { return q[i + N + 200]; };
    double err = 0;
    for (long xi = -100; xi <= 100; xi += 10) {
      double c = 0;
      for (long j = -N; j <= N; ++j) c += h * Q(xi - j) * Q(j);
      err = std::max(err, std::abs(c - stable_density(s2, p1(xi * h))));
    }
    CHECK(err < 1e-3);
  }
}

TEST_CASE("tail mass decays like R^-alpha") {
  for (double a : {0.6, 1.0, 1.5}) {
    StableDensity sd{a, 1, 1.0, {}};
    std::vector<double> lx, ly;
    for (double R : {4.0, 8.0, 16.0, 32.0, 64.0}) {
      // Tail mass = 1 - int_{-R}^R q, with the inner integral in asinh coordinates.
      const double W = std::asinh(R);
      const double inner = integrate_composite([&](double w) { return 2 * std::cosh(w) * stable_density(sd, p1(std::sinh(w))); },
                                               0.0, W, 200, 8);
      lx.push_back(std::log(R));
      ly.push_back(std::log(1 - inner));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    CHECK(-sxy / sxx == doctest::Approx(a).epsilon(0.15 / a));
  }
}

TEST_CASE("kernel table integrates the density") {
  const auto& K = stable_kernel_table(1.2);
  double m0 = 0, m1 = 0, d1 = 0;
  for (std::size_t i = 0; i < K.z.size(); ++i) {
    m0 += K.weight[i] * K.q[0][i];
    m1 += K.weight[i] * K.q[0][i] * K.z[i];
    d1 += K.weight[i] * K.q[1][i];
  }
  CHECK(m0 == doctest::Approx(1.0 - 2 * stable_tail_constant(1.2, 1) * std::pow(1e6, -1.2) / 1.2).epsilon(1e-9));
  CHECK(std::abs(m1) < 1e-9);
  CHECK(std::abs(d1) < 1e-12);
}
