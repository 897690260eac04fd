#include <doctest.h>

#include <cmath>

#include "slk/evolve.hpp"
#include "slk/quadrature.hpp"

using namespace slk;

namespace {

// Cauchy semigroup (A = 1, alpha = 1, tau = pi t) on exp(-x^2/2) at the origin.
double cauchy_gauss_at_zero(double tau) {
  if (tau > 20) {
    const double i2 = 1 / (tau * tau);
    return std::sqrt(2 / M_PI) / tau * (1 - i2 + 3 * i2 * i2 - 15 * i2 * i2 * i2);
  }
  return std::exp(0.5 * tau * tau) * std::erfc(tau / std::sqrt(2.0));
}

SemigroupSpec exact(double alpha, double a = 1.0) { return SemigroupSpec::for_kernel(constant_kernel(alpha, 1, a)); }

}  // namespace

TEST_CASE("semigroup basics") {
  for (double a : {0.4, 1.0, 1.7}) {
    const auto sg = exact(a);
    CHECK(sg.mode == SemigroupMode::exact_stable);
    for (double t : {0.01, 1.0, 10.0})
      CHECK(semigroup_apply(sg, t, constant_field(1, 1.0), Point(0.3, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(semigroup_apply(exact(1.0), 0.0, gaussian(1, 1, Point::Zero()), Point::Zero()), InvalidArgument);
  CHECK_THROWS_AS(SemigroupSpec::for_kernel(constant_kernel(1.0, 2, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(SemigroupSpec::for_kernel(holder_kernel(1.0, 1, 0.3)), InvalidArgument);
}

TEST_CASE("Cauchy smoothing of a Gaussian") {
  const auto sg = exact(1.0);
  const auto f = gaussian(1, std::sqrt(2.0), Point::Zero());
  double prev = 1.0;
  for (double t : {0.05, 0.2, 0.5, 1.0, 3.0}) {
    const double v = semigroup_apply(sg, t, f, Point::Zero());
    CHECK(v == doctest::Approx(cauchy_gauss_at_zero(M_PI * t)).epsilon(1e-7));
    CHECK(v < prev);
    prev = v;
  }
  // Constant A = 2 runs twice as fast.
  CHECK(semigroup_apply(exact(1.0, 2.0), 0.5, f, Point::Zero()) ==
        doctest::Approx(semigroup_apply(sg, 1.0, f, Point::Zero())).epsilon(1e-12));
}

TEST_CASE("semigroup invariants") {
  for (double a : {0.7, 1.5}) {
    const auto sg = exact(a);
    for (const auto& id : {"bump-r1", "gauss-1"}) {
      const auto f = corpus_member(id, 1);
      const double fs = 1.0;
      for (auto [t, s] : {std::pair{0.25, 0.25}, std::pair{0.5, 0.25}}) {
        const auto Ps = semigroup_field(sg, s, f);
        for (double x : {0.0, 0.6, 2.0}) {
          const double lhs = semigroup_apply(sg, t + s, f, Point(x, 0));
          const double rhs = semigroup_apply(sg, t, Ps, Point(x, 0));
          CHECK(std::abs(lhs - rhs) < 5e-3 * fs);
          CHECK(std::abs(lhs) <= fs + 1e-3);
          CHECK(lhs >= 0);
        }
      }
      const Point sh(0.75, 0);
      for (double x : {-1.0, 0.5})
        CHECK(semigroup_apply(sg, 0.3, translate(f, sh), Point(x, 0)) ==
              doctest::Approx(semigroup_apply(sg, 0.3, f, Point(x, 0) + sh)).epsilon(1e-9));
    }
  }
}

TEST_CASE("short time limit") {
  // |P_t f - f| <= c t^{beta/alpha} ||f||_{C^beta} for the cusp, with the constant
  // from E|X_t|^beta of the stable law.
  const double alpha = 1.2, beta = 0.5;
  const auto sg = exact(alpha);
  const auto f = corpus_member("cusp-0.5", 1);
  const double t = 0.01;
  // Fractional moment of the symmetric stable law with symbol exp(-|xi|^alpha).
  const double Ebeta_tab = std::pow(2.0, beta) * std::tgamma(0.5 * (1 + beta)) * std::tgamma(1 - beta / alpha) /
                           (std::sqrt(M_PI) * std::tgamma(1 - 0.5 * beta));
  const double bound = std::pow(sg.stable_time(t), beta / alpha) * Ebeta_tab;
  for (double x : {0.0, 0.3, 1.5}) {
    const double d = std::abs(semigroup_apply(sg, t, f, Point(x, 0)) - f(Point(x, 0)));
    CHECK(d <= bound * (1 + 1e-6));
  }
  CHECK(std::abs(semigroup_apply(sg, t, f, Point::Zero())) > 0.3 * bound);
}

TEST_CASE("split lower mode") {
  const auto k = bumped_kernel(1.2, 1, 0.5);
  auto sg = SemigroupSpec::for_kernel(k);
  CHECK(sg.mode == SemigroupMode::split_lower);
  sg.mc_samples = 1500;
  CHECK(semigroup_apply(sg, 0.5, constant_field(1, 1.0), Point::Zero()) == doctest::Approx(1.0).epsilon(1e-12));
  const auto f = gaussian(1, 1.0, Point::Zero());
  const auto a = semigroup_apply_detailed(sg, 0.5, f, Point::Zero(), 7);
  const auto b = semigroup_apply_detailed(sg, 0.5, f, Point::Zero(), 7);
  CHECK(a.value == b.value);
  CHECK(a.std_error > 0);
  CHECK(a.value >= 0);
  // The residual jumps only add spreading: below the kappa1-stable value, above the kappa2 one.
  const double lower = semigroup_apply(exact(1.2, 1.0), 0.5, f, Point::Zero());
  const double upper = semigroup_apply(exact(1.2, 1.5), 0.5, f, Point::Zero());
  CHECK(a.value <= lower + 3 * a.std_error);
  CHECK(a.value >= upper - 3 * a.std_error);
  sg.mc_tolerance = 1e-9;
  CHECK_THROWS_AS(semigroup_apply_detailed(sg, 0.5, f, Point::Zero(), 1), NumericalFailure);
}

TEST_CASE("derivative decay") {
  const std::vector<double> ts = {0.01, 0.03, 0.1, 0.3, 1.0};
  const auto z = derivative_decay_audit(exact(1.0), ts, constant_field(1, 1.0));
  for (const auto& r : z.rows) {
    CHECK(std::abs(r.d1) < 1e-9);
    CHECK(std::abs(r.d2) < 1e-9);
  }
  const auto s = derivative_decay_audit(exact(1.0), ts, step(1));
  CHECK(s.pass);
  for (const auto& r : s.rows) CHECK(r.d1 <= s.bound1 * s.f_sup);
  // Once the smoothing scale exceeds the step width the column is flat within a factor 2.
  const auto late = derivative_decay_audit(exact(1.0), {1.0, 3.0, 10.0, 30.0, 100.0}, step(1));
  double lo = 1e300, hi = 0;
  for (const auto& r : late.rows) {
    lo = std::min(lo, r.d1);
    hi = std::max(hi, r.d1);
  }
  CHECK(hi <= 2 * lo);
  const auto g = derivative_decay_audit(exact(1.5), ts, gaussian(1, 1.0, Point::Zero()));
  CHECK(g.pass);
  CHECK(g.c1 <= std::max(g.bound1, g.bound2));
}

TEST_CASE("resolvent profile and values") {
  for (double a : {0.5, 1.0, 1.5}) {
    const auto sg = exact(a);
    PotentialSpec ps;
    ps.lambda = 0.5;
    CHECK(resolvent_apply(ps, sg, constant_field(1, 1.0), Point(0.2, 0)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(resolvent_apply(ps, sg, constant_field(1, 0.0), Point(0.2, 0)) == 0.0);
  }
  // Cauchy oracle at the origin.
  const auto sg = exact(1.0);
  const auto f = gaussian(1, std::sqrt(2.0), Point::Zero());
  PotentialSpec ps;
  const auto ref = integrate_adaptive([](double t) { return std::exp(-t) * cauchy_gauss_at_zero(M_PI * t); }, 0.0, 60.0,
                                      1e-12, 1e-12);
  CHECK(resolvent_apply(ps, sg, f, Point::Zero()) == doctest::Approx(ref.value).epsilon(1e-5));
  CHECK_THROWS_AS(resolvent_apply(PotentialSpec{0.0}, sg, f, Point::Zero()), InvalidArgument);
  auto split = SemigroupSpec::for_kernel(bumped_kernel(1.0, 1, 0.5));
  CHECK_THROWS_AS(resolvent_apply(ps, split, f, Point::Zero()), InvalidArgument);
}

TEST_CASE("resolvent identity") {
  QuadratureSpec q;
  q.outer_cut = 16;
  q.ring_levels = 8;
  q.panel_width = 0.25;
  for (double a : {0.6, 1.4}) {
    const auto k = constant_kernel(a, 1, 1.0);
    const auto sg = SemigroupSpec::for_kernel(k);
    PotentialSpec ps;
    ps.lambda = 1.0;
    const auto f = gaussian(1, 1.0, Point::Zero());
    const auto u = resolvent_field(ps, sg, f);
    for (int i = 0; i < 20; ++i) {
      const Point x(-2.0 + 0.21 * i, 0);
      const double lhs = apply_L0(k, u, x, q);
      const double rhs = ps.lambda * u(x) - f(x);
      CHECK(std::abs(lhs - rhs) < 2e-3);
    }
  }
}

TEST_CASE("lattice resolvent") {
  const auto sg = exact(1.5);
  PotentialSpec ps;
  ProbeBox box;
  box.dim = 1;
  box.half_width = 4;
  box.spacing = 1.0 / 16;
  const auto f = gaussian(1, 1.0, Point::Zero());
  const auto lr = resolvent_lattice(ps, sg, f, box, true);
  const auto u = resolvent_field(ps, sg, f);
  for (long i = 0; i < static_cast<long>(lr.value.size()); i += 16) {
    const Point x((i - 64) / 16.0, 0);
    CHECK(lr.value[i] == doctest::Approx(u(x)).epsilon(5e-3));
    CHECK(lr.gradient[i] == doctest::Approx(u.grad(x)(0)).epsilon(5e-3));
  }
}

TEST_CASE("holder gain") {
  PotentialSpec ps;
  ps.t_min_factor = 1e-6;
  const auto z = holder_gain_audit(ps, exact(0.5), constant_field(1, 0.0), 0.3);
  CHECK(z.lhs == 0.0);
  CHECK(z.pass);
  const auto cusp = corpus_member("cusp-0.3", 1);
  const auto low = holder_gain_audit(ps, exact(0.5), cusp, 0.3);
  CHECK(low.pass);
  CHECK(low.constant > 0);
  const auto high = holder_gain_audit(ps, exact(1.5), cusp, 0.3);
  CHECK(high.pass);
  // The same exponent measured on f itself grows under refinement.
  ProbeBox b1, b2;
  b1.dim = b2.dim = 1;
  b1.half_width = b2.half_width = 4;
  b1.spacing = 8.0 / 256;
  b2.spacing = 8.0 / 512;
  const double f1 = seminorm_second(cusp, 1.8, b1).seminorm, f2 = seminorm_second(cusp, 1.8, b2).seminorm;
  CHECK(f2 > 1.5 * f1);
  CHECK(high.constant_refined < 1.2 * high.constant);
}
