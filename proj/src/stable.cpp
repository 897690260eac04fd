#include "slk/stable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "slk/parallel.hpp"
#include "slk/quadrature.hpp"

namespace slk {
namespace {

// Probabilists' Hermite polynomial He_k.
double hermite(int k, double y) {
  switch (k) {
    case 0: return 1.0;
    case 1: return y;
    case 2: return y * y - 1.0;
    case 3: return y * (y * y - 3.0);
  }
  throw InvalidArgument("derivative order above 3");
}

// d^k/dx^k exp(-x^2/(2s)) / sqrt(2 pi s) = (-1)^k s^{-k/2} He_k(x/sqrt s) r(s,x).
double gauss_deriv_1d(double s, double x, int k) {
  const double rs = std::sqrt(s);
  const double y = x / rs;
  const double g = std::exp(-0.5 * y * y) / std::sqrt(2.0 * M_PI * s);
  const double sign = (k % 2) ? -1.0 : 1.0;
  return sign * std::pow(rs, -k) * hermite(k, y) * g;
}

template <typename Key, typename Value, typename Make>
const Value& cached(std::map<Key, std::unique_ptr<Value>>& cache, std::mutex& m, const Key& key, Make&& make) {
  {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto value = std::make_unique<Value>(make());
  std::lock_guard<std::mutex> lock(m);
  auto [it, inserted] = cache.emplace(key, std::move(value));
  return *it->second;
}

}  // namespace

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 2)) throw InvalidArgument("stable index alpha must lie in (0,2)");
}

double one_sided_stable_density_integral(double rho, double x) {
  if (!(x > 0)) throw InvalidArgument("one-sided stable density: x must be positive");
  const double p = 1.0 / (1.0 - rho);
  const double X = std::pow(x, -rho * p);
  auto a = [rho, p](double phi) {
    return std::pow(std::sin(rho * phi), rho * p) * std::sin((1 - rho) * phi) / std::pow(std::sin(phi), p);
  };
  auto integrand = [&](double phi) {
    if (phi <= 0) return std::pow(rho, rho * p) * (1 - rho) * std::exp(-std::pow(rho, rho * p) * (1 - rho) * X);
    if (phi >= M_PI) return 0.0;
    const double A = a(phi);
    if (!std::isfinite(A)) return 0.0;
    const double e = A * X;
    return e > 745 ? 0.0 : A * std::exp(-e);
  };
  const auto r = integrate_adaptive(integrand, 0.0, M_PI, 1e-300, 1e-12, 4000);
  return (1.0 / M_PI) * rho * p * std::pow(x, -p) * r.value;
}

double one_sided_stable_density_series(double rho, double x, int terms) {
  if (!(x > 0)) throw InvalidArgument("one-sided stable density: x must be positive");
  const double lx = std::log(x);
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double mag = std::exp(std::lgamma(k * rho + 1) - std::lgamma(k + 1.0) - (k * rho + 1) * lx);
    sum += ((k % 2) ? 1.0 : -1.0) * mag * std::sin(M_PI * k * rho);
  }
  return sum / M_PI;
}

double one_sided_stable_density(double rho, double x) {
  if (!(rho > 0 && rho < 1)) throw InvalidArgument("one-sided stable index must lie in (0,1)");
  if (!(x > 0)) throw InvalidArgument("one-sided stable density: x must be positive");
  if (std::pow(x, -rho) <= 0.25) return one_sided_stable_density_series(rho, x);
  return one_sided_stable_density_integral(rho, x);
}

double subordinator_density(const SubordinatorLaw& law, double s) {
  check_alpha(law.alpha);
  if (!(s > 0)) throw InvalidArgument("subordinator_density: s must be positive");
  return 0.5 * one_sided_stable_density(law.rho(), 0.5 * s);
}

double subordinator_cdf(const SubordinatorLaw& law, double lambda) {
  if (!(lambda > 0)) throw InvalidArgument("subordinator_cdf: lambda must be positive");
  // Substitute s = lambda e^{-u}: the integrand decays double-exponentially in u.
  auto g = [&](double u) {
    const double s = lambda * std::exp(-u);
    return subordinator_density(law, s) * s;
  };
  const auto r = integrate_adaptive(g, 0.0, 60.0, 1e-300, 1e-10, 4000);
  return r.value;
}

double subordinator_tail(const SubordinatorLaw& law, double s) {
  // Termwise integral of the density series: P(S > x) = (1/pi) sum (-1)^{k+1} Gamma(k rho)/k! sin(pi k rho) x^{-k rho}.
  const double rho = law.rho();
  const double lx = std::log(0.5 * s);
  if (std::exp(-rho * lx) > 0.25) throw InvalidArgument("subordinator_tail: argument too small for the series");
  double sum = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double mag = std::exp(std::lgamma(k * rho) - std::lgamma(k + 1.0) - k * rho * lx);
    sum += ((k % 2) ? 1.0 : -1.0) * mag * std::sin(M_PI * k * rho);
  }
  return sum / M_PI;
}

TailFit fit_small_tail(const SubordinatorLaw& law) {
  check_alpha(law.alpha);
  TailFit fit;
  fit.lambdas = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  fit.c1 = std::numeric_limits<double>::infinity();
  for (double l : fit.lambdas) {
    const double p = subordinator_cdf(law, l);
    fit.cdf.push_back(p);
    fit.c1 = std::min(fit.c1, -std::log(p) * std::pow(l, 0.5 * law.alpha));
  }
  fit.holds = fit.c1 > 0;
  for (int k = 0; k <= 12; ++k) {
    const double l = 0.01 * std::pow(50.0, k / 12.0);
    if (subordinator_cdf(law, l) > std::exp(-fit.c1 * std::pow(l, -0.5 * law.alpha)) * (1 + 1e-9)) fit.holds = false;
  }
  return fit;
}

const SubordinationTable& subordination_table(double alpha, double step) {
  check_alpha(alpha);
  if (!(step > 0 && step <= 0.1)) throw InvalidArgument("subordination step must lie in (0, 0.1]");
  static std::map<std::pair<double, double>, std::unique_ptr<SubordinationTable>> cache;
  static std::mutex m;
  return cached(cache, m, std::make_pair(alpha, step), [&] {
    const SubordinatorLaw law{alpha};
    auto weight = [&](double v) { return subordinator_density(law, std::exp(v)) * std::exp(v) * step; };
    // Lower end: the integrand carries at most s^{-5/2} from derivatives of order 3 in d = 2.
    std::vector<double> lo_v, lo_w;
    double peak = 0.0;
    for (int j = 0;; --j) {
      const double v = j * step, w = weight(v);
      peak = std::max(peak, w);
      if (j < 0 && (w == 0.0 || w * std::exp(-2.5 * v) < 1e-40 * peak)) break;
      lo_v.push_back(v);
      lo_w.push_back(w);
    }
    // Upper end: resolve at least s = 1e14 (|x| up to 1e7) and a 1e-18 weighted tail.
    const double v_top = std::max(2 * std::log(1e7), 40.0 / (0.5 * alpha + 0.5));
    std::vector<double> hi_v, hi_w;
    for (int j = 1; j * step <= v_top; ++j) {
      hi_v.push_back(j * step);
      hi_w.push_back(weight(j * step));
    }
    SubordinationTable t{alpha, step, {}, {}, 0.0};
    for (std::size_t i = lo_v.size(); i-- > 0;) {
      t.s.push_back(std::exp(lo_v[i]));
      t.w.push_back(lo_w[i]);
    }
    for (std::size_t i = 0; i < hi_v.size(); ++i) {
      t.s.push_back(std::exp(hi_v[i]));
      t.w.push_back(hi_w[i]);
    }
    double mass = 0.0;
    for (double w : t.w) mass += w;
    mass += subordinator_tail(law, t.s.back() * std::exp(0.5 * step));
    t.mass = mass;
    if (std::abs(1.0 - mass) > 1e-8)
      throw NumericalFailure("subordination table: total mass " + std::to_string(mass) + " is not 1");
    return t;
  });
}

void validate(const StableDensity& sd) {
  check_alpha(sd.alpha);
  if (sd.dim != 1 && sd.dim != 2) throw InvalidArgument("StableDensity: dim must be 1 or 2");
  if (!(sd.t > 0)) throw InvalidArgument("StableDensity: t must be positive");
}

double stable_density(const StableDensity& sd, const Point& x) { return stable_density_deriv(sd, x, {0, 0}); }

double stable_density_deriv(const StableDensity& sd, const Point& x, std::array<int, 2> k) {
  validate(sd);
  if (sd.dim == 1) k[1] = 0;
  if (k[0] < 0 || k[1] < 0 || k[0] + k[1] > 3) throw InvalidArgument("stable_density_deriv: order must be at most 3");
  const auto& T = subordination_table(sd.alpha, sd.quad.step);
  const double c = std::pow(sd.t, 2.0 / sd.alpha);
  double sum = 0.0;
  for (std::size_t j = 0; j < T.s.size(); ++j) {
    const double s = c * T.s[j];
    double r = gauss_deriv_1d(s, x(0), k[0]);
    if (sd.dim == 2) r *= gauss_deriv_1d(s, x(1), k[1]);
    sum += T.w[j] * r;
  }
  if (!std::isfinite(sum)) throw NumericalFailure("stable density: non-finite value");
  return sum;
}

double stable_tail_constant(double alpha, int dim) {
  check_alpha(alpha);
  const double d = dim;
  return alpha * std::pow(2.0, alpha - 1) * std::tgamma(0.5 * (d + alpha)) /
         (std::pow(M_PI, 0.5 * d) * std::tgamma(1 - 0.5 * alpha));
}

IntegrabilityAudit derivative_integrability_audit(const StableDensity& sd, int k) {
  validate(sd);
  if (k < 0 || k > 3) throw InvalidArgument("derivative_integrability_audit: order must lie in 0..3");
  StableDensity one = sd;
  one.t = 1.0;
  IntegrabilityAudit out;
  const auto& gl = gauss_legendre(8);
  for (double L : {25.0, 50.0, 100.0, 200.0}) {
    double v = 0.0, tail = 0.0;
    if (sd.dim == 1) {
      // Panels uniform in asinh(x); the integrand is even in |.|.
      const double W = std::asinh(L);
      const int panels = 400;
      const double dw = W / panels;
      for (int p = 0; p < panels; ++p)
        for (int i = 0; i < gl.size(); ++i) {
          const double w = dw * (p + 0.5 * (gl.nodes[i] + 1));
          const double x = std::sinh(w);
          v += 2 * 0.5 * dw * gl.weights[i] * std::cosh(w) * std::abs(stable_density_deriv(one, Point(x, 0), {k, 0}));
        }
      tail = 2 * std::abs(stable_density_deriv(one, Point(L, 0), {k, 0})) * L / (sd.alpha + k);
    } else {
      const double W = std::asinh(L);
      const int panels = 120, nth = 64;
      const double dw = W / panels;
      double edge = 0.0;
      for (int a = 0; a < nth; ++a) {
        const double th = 2 * M_PI * (a + 0.5) / nth;
        for (int p = 0; p < panels; ++p)
          for (int i = 0; i < gl.size(); ++i) {
            const double w = dw * (p + 0.5 * (gl.nodes[i] + 1));
            const double r = std::sinh(w);
            const Point x(r * std::cos(th), r * std::sin(th));
            v += (2 * M_PI / nth) * 0.5 * dw * gl.weights[i] * std::cosh(w) * r *
                 std::abs(stable_density_deriv(one, x, {k, 0}));
          }
        edge = std::max(edge, std::abs(stable_density_deriv(one, Point(L * std::cos(th), L * std::sin(th)), {k, 0})));
      }
      tail = 2 * M_PI * L * L * edge / (sd.alpha + k);
    }
    out.box_half_widths.push_back(L);
    out.box_values.push_back(v + tail);
  }
  out.value = out.box_values.back();
  const double prev = out.box_values[out.box_values.size() - 2];
  out.stability_score = std::abs(out.value - prev) / std::abs(out.value);
  out.pass = std::isfinite(out.value) && out.stability_score <= 0.1;
  return out;
}

const StableKernelTable& stable_kernel_table(double alpha, double panel_width, double z_max) {
  check_alpha(alpha);
  static std::map<std::array<double, 3>, std::unique_ptr<StableKernelTable>> cache;
  static std::mutex m;
  return cached(cache, m, std::array<double, 3>{alpha, panel_width, z_max}, [&] {
    StableKernelTable t;
    t.alpha = alpha;
    const auto& gl = gauss_legendre(4);
    const double W = std::asinh(z_max);
    const int panels = 2 * static_cast<int>(std::ceil(W / panel_width));
    const double dw = 2 * W / panels;
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < gl.size(); ++i) {
        const double w = -W + dw * (p + 0.5 * (gl.nodes[i] + 1));
        t.z.push_back(std::sinh(w));
        t.weight.push_back(0.5 * dw * gl.weights[i] * std::cosh(w));
      }
    for (auto& col : t.q) col.resize(t.z.size());
    StableDensity sd{alpha, 1, 1.0, {}};
    parallel_chunks(t.z.size(), 32, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t n = b; n < e; ++n)
        for (int j = 0; j < 4; ++j) t.q[j][n] = stable_density_deriv(sd, Point(t.z[n], 0), {j, 0});
    });
    return t;
  });
}

}  // namespace slk
