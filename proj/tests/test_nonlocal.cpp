#include <doctest.h>

#include <cmath>

#include "slk/fields.hpp"
#include "slk/nonlocal.hpp"

using namespace slk;

namespace {

FunctionField plain_cos(double xi) {
  FunctionField f = wave(1, xi);
  return f;
}

// psi(xi) = xi^alpha int (1 - cos u) |u|^{-1-alpha} du, brute force: log grid on (0,1],
// Simpson on [1,U], integration by parts beyond U.
double psi_reference(double alpha, double xi) {
  double s = 0.0;
  const double dv = 1e-4;
  for (double v = -60; v < 0; v += dv) {
    const double u = std::exp(v + 0.5 * dv);
    s += 2 * std::pow(std::sin(0.5 * u), 2) * std::pow(u, -alpha) * dv;
  }
  const double U = 2000 * M_PI;
  const int n = 2000000;
  const double du = (U - 1) / n;
  auto g = [alpha](double u) { return (1 - std::cos(u)) * std::pow(u, -1 - alpha); };
  double simpson = g(1) + g(U);
  for (int i = 1; i < n; ++i) simpson += (i % 2 ? 4 : 2) * g(1 + i * du);
  s += simpson * du / 3;
  s += std::pow(U, -alpha) / alpha + std::sin(U) * std::pow(U, -1 - alpha) - (1 + alpha) * std::cos(U) * std::pow(U, -2 - alpha);
  return 2 * std::pow(xi, alpha) * s;
}

}  // namespace

TEST_CASE("difference operators") {
  FunctionField sq;
  sq.id = "square";
  sq.dim = 1;
  sq.eval = [](const Point& x) { return x(0) * x(0); };
  sq.grad = [](const Point& x) { return Point(2 * x(0), 0); };
  CHECK(first_difference(sq, Point(1, 0), Point(0.1, 0)) == doctest::Approx(0.21).epsilon(1e-14));
  CHECK(first_difference(sq, Point(1, 0), Point(0, 0)) == 0.0);
  CHECK(first_difference(wave(1, 1), Point(0, 0), Point(M_PI, 0)) == doctest::Approx(-2));
  CHECK(compensated_difference(sq, Point(3, 0), Point(0.7, 0)) == doctest::Approx(0.49).epsilon(1e-13));
  CHECK(compensated_difference(wave(1, 1), Point(0, 0), Point(0.1, 0)) == doctest::Approx(std::cos(0.1) - 1).epsilon(1e-14));
  FunctionField noderiv = sq;
  noderiv.grad = nullptr;
  CHECK_THROWS_AS(compensated_difference(noderiv, Point(0, 0), Point(1, 0)), InvalidArgument);
  // F_h = E_h - grad.h on evaluations.
  const auto g = gaussian(1, 1.0, Point(0.3, 0));
  for (double h : {-2.0, -0.3, 0.01, 1.5}) {
    const Point x(0.4, 0), hh(h, 0);
    CHECK(compensated_difference(g, x, hh) == first_difference(g, x, hh) - g.grad(x).dot(hh));
  }
}

TEST_CASE("kappa normalization") {
  CHECK(kappa(1, 1.0) == doctest::Approx(M_PI).epsilon(1e-14));
  for (double a : {0.5, 1.5})
    CHECK(kappa(1, a) == doctest::Approx(psi_reference(a, 1.0)).epsilon(1e-5));
}

TEST_CASE("apply_L0 on cos matches the symbol") {
  const QuadratureSpec q;
  const auto k = constant_kernel(1.0, 1, 1.0);
  const auto c = plain_cos(1.0);
  const auto v = apply_L_detailed(k, c, Point(0, 0), q);
  CHECK(v.value == doctest::Approx(-M_PI).epsilon(1e-3 / M_PI));
  CHECK(std::abs(v.value + M_PI) < 1e-6);
  CHECK(v.error < 1e-3);
  // Refined budget as reference.
  const double ref = apply_L0(k, c, Point(0, 0), q.refined());
  CHECK(std::abs(v.value - ref) < 1e-6);
  for (double a : {0.3, 0.7, 1.3, 1.8}) {
    const auto ka = constant_kernel(a, 1, 1.0);
    for (double xi : {0.5, 2.0}) {
      const double expect = -psi_reference(a, xi) * std::cos(xi * 0.7);
      CHECK(apply_L0(ka, plain_cos(xi), Point(0.7, 0), q) == doctest::Approx(expect).epsilon(1e-5));
    }
  }
}

TEST_CASE("apply_L0 trivial values") {
  const QuadratureSpec q;
  for (double a : {0.5, 1.0, 1.5}) {
    const auto k = constant_kernel(a, 1, 1.0);
    CHECK(apply_L0(k, constant_field(1, 3.0), Point(0.2, 0), q) == 0.0);
    // Odd bounded field at the origin.
    FunctionField odd = step(1);
    CHECK(std::abs(apply_L0(k, odd, Point(0, 0), q)) < 1e-10);
    CHECK(std::abs(apply_L0(bumped_kernel(a, 1, 0.5), odd, Point(0, 0), q)) < 1e-10);
  }
  CHECK_THROWS_AS(apply_L0(holder_kernel(1.0, 1, 0.3), wave(1, 1), Point(0, 0), q), InvalidArgument);
  CHECK_THROWS_AS(apply_L(constant_kernel(0.8, 1, 1.0), corpus_member("cusp-0.5", 1), Point(0, 0), q),
                  InvalidArgument);
}

TEST_CASE("2d cos matches the radial symbol") {
  const QuadratureSpec q;
  for (double a : {0.6, 1.4}) {
    const auto k = constant_kernel(a, 2, 1.0);
    // With this normalization the 2d symbol is kappa(2,a)|xi|^a.
    const auto v = apply_L_detailed(k, wave(2, 1.0), Point(0, 0), q);
    CHECK(v.value == doctest::Approx(-kappa(2, a)).epsilon(2e-3));
    CHECK(std::abs(v.value + kappa(2, a)) <= v.error);
  }
}

TEST_CASE("separable kernel factorizes") {
  const QuadratureSpec q;
  const auto k = holder_kernel(1.2, 1, 0.6, 0.4, M_PI);
  const auto f = gaussian(1, 1.0, Point(0, 0));
  const auto k0 = constant_kernel(1.2, 1, 1.0);
  for (double x : {-1.3, 0.0, 0.4, 2.2}) {
    const Point p(x, 0);
    const double w = 1 + 0.4 * std::pow(std::abs(std::sin(2 * x)), 0.6);
    const double l = apply_L(k, f, p, q), l0 = apply_L0(k0, f, p, q);
    CHECK(std::abs(l - w * l0) <= 1e-10 * std::abs(w * l0));
  }
}

TEST_CASE("A identically one equals L0 with A0 one") {
  const QuadratureSpec q;
  auto k = constant_kernel(0.7, 1, 1.0);
  auto var = k;
  var.x_independent = false;
  const auto f = corpus_member("wave-1*gauss-1", 1);
  for (int i = 0; i < 50; ++i) {
    const Point p(-3 + 0.12 * i, 0);
    CHECK(apply_L(var, f, p, q) == apply_L0(k, f, p, q));
  }
}

TEST_CASE("freezing decomposition") {
  const QuadratureSpec q;
  const auto k = mixed_kernel(1.3, 1, 0.4);
  const Point x0(0.5, 0);
  const auto f = gaussian(1, 1.0, Point(0.2, 0));
  CHECK(apply_B(k, x0, f, x0, q) == 0.0);
  CHECK(apply_B(constant_kernel(1.3, 1, 2.0), x0, f, Point(1, 0), q) == 0.0);
  const auto fr = frozen(k, x0);
  for (int i = 0; i < 50; ++i) {
    const Point p(-2 + 0.08 * i, 0);
    const auto l = apply_L_detailed(k, f, p, q);
    const auto l0 = apply_L_detailed(fr, f, p, q);
    const double b = apply_B(k, x0, f, p, q);
    CHECK(std::abs(l.value - l0.value - b) < 2 * (l.error + l0.error) + 1e-12);
  }
}

TEST_CASE("linearity translation scaling") {
  const QuadratureSpec q;
  const auto k = constant_kernel(0.9, 1, 1.0);
  const auto f = gaussian(1, 1.0, Point(0.3, 0));
  const auto g = corpus_member("bump-r2", 1);
  const double lam = -1.7;
  for (double x : {-0.5, 0.25, 1.0}) {
    const Point p(x, 0);
    const double lhs = apply_L0(k, sum(f, scale(g, lam)), p, q);
    const double rhs = apply_L0(k, f, p, q) + lam * apply_L0(k, g, p, q);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (std::abs(lhs) + 1e-12));
    const Point a(0.625, 0);
    CHECK(apply_L0(k, translate(f, a), p, q) == doctest::Approx(apply_L0(k, f, p + a, q)).epsilon(1e-7));
  }
  for (double alpha : {0.6, 1.5}) {
    const auto ka = constant_kernel(alpha, 1, 1.0);
    const auto base = gaussian(1, 1.0, Point(0, 0));
    for (double r : {2.0, 4.0}) {
      FunctionField fr = base;
      fr.eval = [base, r](const Point& x) { return base(r * x); };
      fr.grad = [base, r](const Point& x) { return Point(r * base.grad(r * x)); };
      fr.hess = [base, r](const Point& x) { return Hessian(r * r * base.hess(r * x)); };
      for (double x : {0.0, 0.2, 0.5}) {
        const double lhs = apply_L0(ka, fr, Point(x, 0), q);
        const double rhs = std::pow(r, alpha) * apply_L0(ka, base, Point(r * x, 0), q);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-2));
      }
    }
  }
}

TEST_CASE("maximum principle probe") {
  const QuadratureSpec q;
  // Every field below attains its maximum at the origin.
  for (const auto& f : {corpus_member("gauss-1", 1), corpus_member("bump-r1", 1), corpus_member("wave-2", 1),
                        scale(corpus_member("cusp-0.7", 1), -1.0)}) {
    for (double a : {0.4, 1.5}) {
      if (f.regularity <= a) continue;
      const auto k = mixed_kernel(a, 1, 0.5);
      const auto v = apply_L_detailed(k, f, Point(0, 0), q);
      CHECK(v.value <= v.error + 1e-12);
    }
  }
}

TEST_CASE("rough fields use the direct ring extrapolation") {
  const QuadratureSpec q;
  const auto k = constant_kernel(0.5, 1, 1.0);
  const auto f = corpus_member("cusp-0.7", 1);
  const auto v = apply_L_detailed(k, f, Point(0, 0), q);
  const auto r = apply_L_detailed(k, f, Point(0, 0), q.refined());
  CHECK(v.extrapolated);
  CHECK(v.value > 0);
  CHECK(std::abs(v.value - r.value) < 1e-4 * std::abs(r.value));
}

TEST_CASE("symbols") {
  const QuadratureSpec q;
  const auto k = constant_kernel(1.0, 1, 1.0);
  const auto s = symbol(k, Point(1, 0), q);
  CHECK(s.real() == doctest::Approx(-M_PI).epsilon(1e-6));
  CHECK(std::abs(s.imag()) < 1e-10);
  for (double a : {0.5, 1.5})
    for (double xi : {0.25, 3.0})
      CHECK(symbol_even_1d([](const Point&) { return 1.0; }, a, xi, q) ==
            doctest::Approx(kappa(1, a) * std::pow(xi, a)).epsilon(1e-6));
  // Bumped profile against the direct symbol.
  const auto kb = bumped_kernel(0.8, 1, 0.5);
  for (double xi : {0.5, 2.0, 8.0})
    CHECK(symbol_even_1d(kb.terms[0].a0, 0.8, xi, q) == doctest::Approx(-symbol(kb, Point(xi, 0), q).real()).epsilon(1e-5));
}

TEST_CASE("kernel validation") {
  for (double beta : {0.3, 0.6}) {
    const auto v = validate_kernel(holder_kernel(0.8, 1, beta));
    CHECK(v.pass());
    CHECK(v.holder_ratio > 0.2 * holder_kernel(0.8, 1, beta).c3);
  }
  CHECK(validate_kernel(mixed_kernel(1.5, 2, 0.4)).pass());
  CHECK(validate_kernel(bumped_kernel(1.2, 1, 0.5)).pass());
  CHECK(validate_kernel(truncated_kernel(holder_kernel(0.8, 1, 0.5), 1.0)).pass());
  auto bad = holder_kernel(0.5, 1, 0.5);
  CHECK_FALSE(validate_kernel(bad).exponents_ok);
  auto loose = holder_kernel(0.8, 1, 0.3);
  loose.c3 *= 0.5;
  CHECK_FALSE(validate_kernel(loose).holder_ok);
  QuadratureSpec q;
  q.outer_cut = 0.5;
  CHECK_THROWS_AS(validate(q, 1), InvalidArgument);
}

TEST_CASE("finite difference bounds") {
  DifferenceSamples s;
  s.x_count = 17;
  s.j_max = 6;
  const auto c = fd_bounds_audit(constant_field(1, 2.0), 0.5, s);
  for (const auto& fc : c.cases) CHECK(fc.worst == 0.0);
  const auto cusp = fd_bounds_audit(corpus_member("cusp-0.5", 1), 0.5, s);
  CHECK(cusp.cases[1].worst <= 2.0);
  CHECK(cusp.pass);
  const auto qw = fd_bounds_audit(corpus_member("quad-window", 1), 1.9, s);
  CHECK(qw.cases[3].applicable);
  CHECK(std::isfinite(qw.cases[3].worst));
  CHECK(qw.pass);
  for (double g : {0.4, 1.5, 2.5}) {
    const auto a = fd_bounds_audit(corpus_member("gauss-1", 1), g, s);
    CHECK(a.pass);
  }
  CHECK_THROWS_AS(fd_bounds_audit(corpus_member("cusp-0.3", 1), 0.5, s), InvalidArgument);
}

TEST_CASE("difference integral corollary") {
  const QuadratureSpec q;
  const auto k = constant_kernel(0.5, 1, 1.0);
  std::vector<double> ks;
  for (int j = 1; j <= 6; ++j) ks.push_back(std::ldexp(1.0, -j));
  const std::vector<Point> xs = {Point(0, 0), Point(0.7, 0), Point(2.0, 0)};
  const auto a = fd_integral_audit(wave(1, 1), k, 0.3, ks, xs, q);
  CHECK(a.pass);
  CHECK(a.worst > 0);
  CHECK(std::isfinite(a.worst));
  const auto z = fd_integral_audit(constant_field(1, 1.0), k, 0.3, ks, xs, q);
  CHECK(z.worst == 0.0);
  CHECK(fd_integral_audit(wave(1, 1), k, 0.3, {0.0}, xs, q).worst == 0.0);
}

TEST_CASE("smoothness of L0 u") {
  const QuadratureSpec q;
  const auto k1 = constant_kernel(1.0, 1, 1.0);
  const auto cz = smoothness_of_L0u_audit(constant_field(1, 1.0), k1, 0.3, 1.0, q);
  CHECK(cz.report.total == 0.0);
  const auto c = smoothness_of_L0u_audit(wave(1, 1), k1, 0.3, 1.0, q);
  ProbeBox box;
  box.dim = 1;
  box.half_width = 4.0;
  box.spacing = 1.0 / 32;
  const auto ref = holder_norm(wave(1, 1), 0.3, box);
  CHECK(c.report.total == doctest::Approx(M_PI * ref.total).epsilon(1e-6));
  const auto k5 = constant_kernel(0.5, 1, 1.0);
  std::vector<double> ks;
  for (int j = 1; j <= 6; ++j) ks.push_back(std::ldexp(1.0, -j));
  const auto g = gaussian(1, 1.0, Point(0, 0));
  const auto fi = fd_integral_audit(g, k5, 0.4, ks, {Point(0, 0), Point(0.5, 0), Point(1.5, 0)}, q);
  const auto s = smoothness_of_L0u_audit(g, k5, 0.4, fi.worst, q);
  CHECK(s.pass);
}
