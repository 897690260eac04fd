#include <doctest.h>

#include <cmath>

#include "slk/holder.hpp"
#include "slk/quadrature.hpp"

using namespace slk;

namespace {

Point p1(double x) { return Point(x, 0.0); }

FunctionField poly1(double a, double b, double c) {
  FunctionField f = constant_field(1, 0.0);
  f.id = "poly";
  f.eval = [=](const Point& x) { return a * x(0) * x(0) + b * x(0) + c; };
  f.grad = [=](const Point& x) { return Point(2 * a * x(0) + b, 0.0); };
  f.hess = [=](const Point&) {
    Hessian H = Hessian::Zero();
    H(0, 0) = 2 * a;
    return H;
  };
  f.decay = Decay::power(-2);
  return f;
}

ProbeBox small_box() {
  ProbeBox b;
  b.half_width = 8.0;
  b.spacing = 1.0 / 64;
  return b;
}

}  // namespace

TEST_CASE("sup norms") {
  GridSpec g(1, 64, 2 * M_PI);
  CHECK(sup_norm(sample(constant_field(1, 1.0), g)) == 1.0);
  CHECK(sup_norm(sample(wave(1, 1.0), g)) == 1.0);
  CHECK(sup_norm(corpus_member("bump-r2"), ProbeBox::standard(1)) == 1.0);
  CHECK_THROWS_AS(sup_norm(wave(1, 1.0), std::vector<Point>{}), InvalidArgument);
}

TEST_CASE("square-root cusp has first-difference seminorm one at the origin") {
  GridSpec g(1, 256, 8.0);
  auto r = seminorm_first(sample_centered(corpus_member("cusp-0.5"), g), 0.5, Window{2 * g.spacing(), 1.0});
  CHECK(r.seminorm == doctest::Approx(1.0).epsilon(1e-14));
  // Either endpoint of the witness pair sits at the cusp.
  const double a = r.witness_x(0), b = a + r.witness_h(0);
  CHECK((a == 4.0 || b == 4.0));
  CHECK(r.method == HolderMethod::first_difference);
  CHECK(r.total == r.sup_norm + r.seminorm);
}

TEST_CASE("constant field has zero seminorms") {
  GridSpec g(1, 64, 4.0);
  auto s = sample(constant_field(1, 3.0), g);
  CHECK(seminorm_first(s, 0.4).seminorm == 0.0);
  CHECK(seminorm_second(s, 1.4).seminorm == 0.0);
}

TEST_CASE("cusp-0.3 seminorm is stable under refinement") {
  auto f = corpus_member("cusp-0.3");
  const double a = seminorm_first(sample_centered(f, GridSpec(1, 256, 8.0)), 0.3).seminorm;
  const double b = seminorm_first(sample_centered(f, GridSpec(1, 512, 8.0)), 0.3).seminorm;
  CHECK(std::abs(a - b) <= 0.02 * b);
}

TEST_CASE("second difference of x^2 is constantly 2 h^2") {
  auto r = seminorm_second(poly1(1, 0, 0), 2.0, small_box());
  CHECK(r.seminorm == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(seminorm_second(poly1(0, 3, 1), 1.5, small_box()).seminorm < 1e-12);
}

TEST_CASE("cosine second-difference quotient at exponent 1.5 peaks at the largest offset") {
  ProbeBox b;
  b.half_width = 4.0;
  b.spacing = std::ldexp(1.0, -8);
  b.window = Window{std::ldexp(1.0, -8), 0.25};
  auto r = seminorm_second(wave(1, 1.0), 1.5, b);
  // Direct scan: |cos(x+h)+cos(x-h)-2cos x| = 2|cos x|(1-cos h), maximal at x = 0.
  double best = 0;
  for (int k = 1; k <= 64; ++k) {
    const double h = k * std::ldexp(1.0, -8);
    best = std::max(best, 2 * (1 - std::cos(h)) / std::pow(h, 1.5));
  }
  CHECK(r.seminorm == doctest::Approx(best).epsilon(1e-10));
  CHECK(r.witness_h(0) == doctest::Approx(0.25));
}

TEST_CASE("holder_norm examples") {
  auto box = ProbeBox::standard(1);
  CHECK(holder_norm(constant_field(1, 1.0), 0.5, box).total == 1.0);
  CHECK(holder_norm(corpus_member("cusp-0.5"), 0.5, box).total == doctest::Approx(2.0).epsilon(1e-12));
  double oracle = 0;
  for (int k = 1; k <= 400000; ++k) {
    const double h = k * 1e-5;
    oracle = std::max(oracle, 2 * std::abs(std::sin(h)) / std::sqrt(h));
  }
  const double got = holder_norm(corpus_member("wave-2"), 0.5, box).total;
  CHECK(std::abs(got - (1 + oracle)) <= 0.03 * (1 + oracle));
  CHECK_THROWS_AS(holder_norm(wave(1, 1.0), 1.0, box), InvalidArgument);
  auto r = holder_norm(wave(1, 1.0), 2.5, box);
  CHECK(r.method == HolderMethod::derivative_based);
  CHECK(r.total > 1.0);
}

TEST_CASE("seminorm_first is absolutely homogeneous") {
  GridSpec g(1, 256, 8.0);
  for (auto& f : corpus(1)) {
    const double base = seminorm_first(sample_centered(f, g), 0.4).seminorm;
    for (double c : {-2.0, 0.5, 3.0}) {
      const double s = seminorm_first(sample_centered(scale(f, c), g), 0.4).seminorm;
      CHECK(s == doctest::Approx(std::abs(c) * base).epsilon(1e-12));
    }
  }
}

TEST_CASE("second differences are bounded by twice the first") {
  GridSpec g(1, 256, 8.0);
  for (auto& f : corpus(1)) {
    auto s = sample_centered(f, g);
    for (double gm : {0.3, 0.7}) CHECK(seminorm_second(s, gm).seminorm <= 2 * seminorm_first(s, gm).seminorm + 1e-14);
  }
  GridSpec g2(2, 32, 8.0);
  for (auto& f : corpus(2)) {
    auto s = sample_centered(f, g2);
    CHECK(seminorm_second(s, 0.5).seminorm <= 2 * seminorm_first(s, 0.5).seminorm + 1e-14);
  }
}

TEST_CASE("enlarging the window never decreases a seminorm") {
  GridSpec g(1, 256, 8.0);
  for (auto& f : corpus(1)) {
    auto s = sample_centered(f, g);
    double prev1 = 0, prev2 = 0;
    for (double hmax : {0.25, 0.5, 1.0, 2.0}) {
      const Window w{2 * g.spacing(), hmax};
      const double a = seminorm_first(s, 0.5, w).seminorm, b = seminorm_second(s, 1.5, w).seminorm;
      CHECK(a >= prev1);
      CHECK(b >= prev2);
      prev1 = a;
      prev2 = b;
    }
  }
}

TEST_CASE("empty window is rejected") {
  GridSpec g(1, 16, 1.0);
  CHECK_THROWS_AS(seminorm_first(sample(wave(1, 1.0), g), 0.5, Window{0.01, 0.02}), InvalidArgument);
  CHECK_THROWS_AS(seminorm_first(sample(wave(1, 1.0), g), 1.5), InvalidArgument);
}

TEST_CASE("interpolation examples") {
  auto box = ProbeBox::standard(1);
  auto c = interp_bound(constant_field(1, 1.0), 0.3, 0.5, 0.1, box);
  CHECK(c.lhs == 1.0);
  CHECK(c.constant >= 1.0);
  CHECK(c.pass);
  CHECK(interp_bound(corpus_member("cusp-0.5"), 0.3, 0.5, 0.1, box).pass);
  auto w = interp_bound(corpus_member("wave-1"), 0.5, 1.5, 0.5, box);
  CHECK(w.applicable);
  CHECK(w.pass);
  CHECK_THROWS_AS(interp_constant(0.5, 0.3, 0.1, 1), InvalidArgument);
  CHECK_THROWS_AS(interp_constant(1.0, 1.5, 0.1, 1), InvalidArgument);
}

TEST_CASE("interpolation holds on the corpus for the six-pair schedule") {
  const double pairs[6][2] = {{0.3, 0.5}, {0.3, 0.7}, {0.5, 0.7}, {0.5, 1.5}, {0.7, 1.3}, {1.3, 1.7}};
  auto box = small_box();
  for (auto& f : corpus(1))
    for (auto& ab : pairs)
      for (double eps : {0.5, 0.1, 0.02}) {
        auto r = interp_bound(f, ab[0], ab[1], eps, box);
        INFO(f.id << " a=" << ab[0] << " b=" << ab[1] << " eps=" << eps << " lhs=" << r.lhs << " rhs=" << r.rhs);
        CHECK(r.pass);
      }
}

TEST_CASE("product bound examples and corpus pairs") {
  auto box = small_box();
  auto one = constant_field(1, 1.0);
  auto r = product_bound(one, one, 0.5, box);
  CHECK(r.lhs == 1.0);
  CHECK(r.rhs >= 1.0);
  CHECK(r.pass);
  CHECK(product_bound(wave(1, 1.0), wave(1, 1.0), 0.5, box).pass);
  CHECK(product_bound(corpus_member("cusp-0.5"), corpus_member("bump-r2"), 0.3, box).pass);
  const std::vector<std::string> ids = {"wave-2", "bump-r2", "gauss-1"};
  for (auto& a : ids)
    for (auto& b : ids)
      for (double s : {0.3, 0.7, 1.5}) {
        auto q = product_bound(corpus_member(a), corpus_member(b), s, box);
        INFO(a << " x " << b << " a=" << s);
        CHECK(q.applicable);
        CHECK(q.pass);
      }
}

TEST_CASE("mollifier is a normalized symmetric bump") {
  // Independent oracle: adaptive quadrature of exp(-1/(1-y^2)).
  auto raw = [](double y) { return std::abs(y) < 1 ? std::exp(-1.0 / (1 - y * y)) : 0.0; };
  const double Z = integrate_adaptive(raw, -1, 1, 1e-14, 1e-13).value;
  Mollifier phi(1);
  CHECK(phi.normalization() == doctest::Approx(1 / Z).epsilon(1e-5));
  const double m0 = integrate_adaptive([&](double y) { return std::sqrt(std::abs(y)) * raw(y) / Z; }, -1, 1, 1e-13, 1e-12).value;
  CHECK(phi.moment_constants(0.5)[0] == doctest::Approx(m0).epsilon(1e-8));
  CHECK(phi(p1(0.3)) == phi(p1(-0.3)));
}

TEST_CASE("mollify examples") {
  auto c = mollify(constant_field(1, 2.5), 0.1);
  CHECK(c(p1(0.7)) == doctest::Approx(2.5).epsilon(1e-13));
  auto lin = poly1(0, 2, 1);
  auto ml = mollify(lin, 0.25);
  for (double x : {-1.0, 0.0, 0.3}) CHECK(ml(p1(x)) == doctest::Approx(lin(p1(x))).epsilon(1e-13));

  auto f = corpus_member("cusp-0.5");
  const double eps = std::ldexp(1.0, -6);
  auto fe = mollify(f, eps);
  double err = 0;
  for (auto& x : mollify_probes(1)) err = std::max(err, std::abs(f(x) - fe(x)));
  auto raw = [](double y) { return std::abs(y) < 1 ? std::exp(-1.0 / (1 - y * y)) : 0.0; };
  const double Z = integrate_adaptive(raw, -1, 1, 1e-14, 1e-13).value;
  const double m0 = integrate_adaptive([&](double y) { return std::sqrt(std::abs(y)) * raw(y) / Z; }, -1, 1, 1e-13, 1e-12).value;
  const double ratio = err / std::sqrt(eps);
  CHECK(ratio <= 2 * m0);
  CHECK(ratio >= 0.5 * m0);
}

TEST_CASE("mollify bounds audit") {
  auto box = small_box();
  std::vector<double> eps;
  for (int k = 4; k <= 8; ++k) eps.push_back(std::ldexp(1.0, -k));
  auto c = mollify_bounds_audit(constant_field(1, 1.0), 0.5, eps, box);
  for (auto& r : c.rows) CHECK(r.c0 < 1e-13);
  CHECK(c.pass);

  auto a = mollify_bounds_audit(corpus_member("cusp-0.5"), 0.5, eps, box);
  CHECK(a.pass);
  for (int col = 0; col < 3; ++col) {
    double lo = 1e300, hi = 0;
    for (auto& r : a.rows) {
      const double v = col == 0 ? r.c0 : col == 1 ? r.c1 : r.c2;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi < 4 * lo);
  }

  auto w = mollify_bounds_audit(corpus_member("wave-1"), 0.5, eps, box);
  CHECK(w.pass);
  for (std::size_t k = 1; k < w.rows.size(); ++k) CHECK(w.rows[k].c0 < 0.75 * w.rows[k - 1].c0);
}

TEST_CASE("mollification converges monotonically on the corpus") {
  const auto probes = mollify_probes(1);
  for (auto& f : corpus(1)) {
    double prev = 1e300;
    for (int k = 3; k <= 7; ++k) {
      auto fe = mollify(f, std::ldexp(1.0, -k));
      double err = 0;
      for (auto& x : probes) err = std::max(err, std::abs(f(x) - fe(x)));
      INFO(f.id << " k=" << k);
      CHECK(err <= 1.05 * prev);
      prev = err;
    }
  }
}
