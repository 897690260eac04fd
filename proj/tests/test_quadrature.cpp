#include <doctest.h>

#include <cmath>

#include "slk/quadrature.hpp"

using namespace slk;

TEST_CASE("gauss-legendre is exact for polynomials of degree 2n-1") {
  for (int n : {1, 2, 4, 8, 16}) {
    const auto& gl = gauss_legendre(n);
    REQUIRE(gl.size() == n);
    const int deg = 2 * n - 1;
    const double got = gl.integrate([deg](double x) { return std::pow(x, deg - 1) + std::pow(x, deg); }, 0.0, 1.0);
    CHECK(got == doctest::Approx(1.0 / deg + 1.0 / (deg + 1)).epsilon(1e-13));
  }
}

TEST_CASE("adaptive integrator handles an endpoint singularity") {
  auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 1e-10);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("composite rule integrates exp") {
  const double v = integrate_composite([](double x) { return std::exp(x); }, 0.0, 3.0, 6, 8);
  CHECK(v == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-13));
}
