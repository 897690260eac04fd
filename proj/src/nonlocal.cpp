#include "slk/nonlocal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "slk/parallel.hpp"
#include "slk/quadrature.hpp"

namespace slk {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double omega(int dim) { return dim == 1 ? 2.0 : 2.0 * M_PI; }

double norm_d(const Point& h, int dim) { return dim == 1 ? std::abs(h(0)) : h.norm(); }

bool is_integer(double a) { return std::abs(a - std::round(a)) < 1e-12; }

// Integrates g(h) |h|^{-d-alpha} over the shell r0 <= |h| <= r1 in polar form.
// n_theta(r) gives the angular trapezoid count in d = 2.
template <typename G, typename NTheta>
double shell(int dim, double alpha, double r0, double r1, int order, G&& g, NTheta&& n_theta, long& evals) {
  const auto& gl = gauss_legendre(order);
  const double half = 0.5 * (r1 - r0), mid = 0.5 * (r1 + r0);
  double sum = 0.0;
  for (int i = 0; i < gl.size(); ++i) {
    const double r = mid + half * gl.nodes[i];
    const double wr = half * gl.weights[i] * std::pow(r, -1.0 - alpha);
    double inner;
    if (dim == 1) {
      inner = g(Point(r, 0.0)) + g(Point(-r, 0.0));
      evals += 2;
    } else {
      const int nt = n_theta(r);
      inner = 0.0;
      for (int m = 0; m < nt; ++m) {
        const double th = 2 * M_PI * (m + 0.5) / nt;
        inner += g(Point(r * std::cos(th), r * std::sin(th)));
      }
      inner *= 2 * M_PI / nt;
      evals += nt;
    }
    sum += wr * inner;
  }
  return sum;
}

struct RingResult {
  double value = 0.0;
  double error = 0.0;
  bool extrapolated = false;
};

// Sums rings [2^{-j-1}, 2^{-j}] for j >= j0 until negligible, stopping at the
// rounding floor and closing with a geometric tail when ratios settle.
template <typename Ring>
RingResult ring_series(int j0, int j_cap, double noise_scale, double alpha, Ring&& ring) {
  RingResult out;
  double prev = 0.0, prev_q = std::numeric_limits<double>::quiet_NaN();
  int zero_run = 0;
  for (int j = j0; j < j_cap; ++j) {
    const double c = ring(j);
    const double noise = noise_scale * std::pow(2.0, (j + 1) * std::max(alpha, 1e-3));
    if (j > j0 && std::abs(c) < 100 * noise) {
      // Rounding dominates: close with the last settled ratio if any.
      if (std::isfinite(prev_q) && std::abs(prev_q) < 0.999) {
        const double tail = prev * prev_q / (1 - prev_q);
        out.value += tail;
        out.error += std::abs(tail) * 0.1 + 100 * noise;
        out.extrapolated = true;
      } else {
        out.error += 100 * noise;
      }
      return out;
    }
    out.value += c;
    if (c == 0.0) {
      if (++zero_run >= 2) return out;
      prev = c;
      continue;
    }
    zero_run = 0;
    if (prev != 0.0) {
      const double q = c / prev;
      if (std::isfinite(prev_q) && std::abs(q - prev_q) <= 1e-3 * std::abs(q) && std::abs(q) < 0.999) {
        const double tail = c * q / (1 - q);
        const double alt = c * prev_q / (1 - prev_q);
        out.value += tail;
        out.error += std::abs(tail - alt) + kEps * std::abs(out.value);
        out.extrapolated = true;
        return out;
      }
      prev_q = q;
    }
    if (std::abs(c) <= 1e-17 * std::abs(out.value)) return out;
    prev = c;
  }
  out.error += std::abs(prev) * 10;
  return out;
}

double far_coefficient(const KernelSpec& k, const Point& x, double R) {
  if (k.far) return k.far(x);
  if (k.dim == 1) return 0.5 * (k.A(x, Point(R, 0)) + k.A(x, Point(-R, 0)));
  double s = 0.0;
  const int n = 64;
  for (int m = 0; m < n; ++m) {
    const double th = 2 * M_PI * (m + 0.5) / n;
    s += k.A(x, Point(R * std::cos(th), R * std::sin(th)));
  }
  return s / n;
}

// sup |f(x+h) - f_far| over a sampled shell R <= |h| <= 4R.
double shell_deviation(const FunctionField& f, const Point& x, double R, int dim) {
  double D = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double r = R * std::pow(4.0, i / 15.0);
    for (int m = 0; m < (dim == 1 ? 2 : 8); ++m) {
      const double th = 2 * M_PI * (m + 0.25) / (dim == 1 ? 2 : 8);
      const Point h = dim == 1 ? Point(m ? -r : r, 0) : Point(r * std::cos(th), r * std::sin(th));
      D = std::max(D, std::abs(f(x + h) - f.far_value));
    }
  }
  return D;
}

// For a P-periodic g, int_R^inf (g - mean) w with w = |h|^{-1-alpha}, by repeated
// integration by parts against the zero-mean primitives of g at R (computed from a DFT).
// Returns {mean, correction, last term}.
std::array<double, 3> periodic_tail_1d(const std::function<double(double)>& g, double P, double R, double alpha) {
  constexpr int M = 64;
  std::array<double, M> s{};
  double mean = 0.0;
  for (int m = 0; m < M; ++m) {
    s[m] = g(R + P * m / M);
    mean += s[m] / M;
  }
  // G_k(R) = sum_n c_n / (i omega_n)^k.
  constexpr int terms = 4;
  std::array<double, terms + 1> G{};
  for (int n = 1; n < M / 2; ++n) {
    std::complex<double> c = 0.0;
    for (int m = 0; m < M; ++m) c += s[m] * std::polar(1.0, -2 * M_PI * n * m / M);
    c /= M;
    const std::complex<double> iw(0.0, 2 * M_PI * n / P);
    std::complex<double> p = 1.0;
    for (int k = 1; k <= terms; ++k) {
      p *= iw;
      G[k] += 2 * (c / p).real();
    }
  }
  // int_R^inf phi w = sum_k (-1)^k G_k(R) w^{(k-1)}(R), w^{(j)}(R) = (-1)^j (1+alpha)_j R^{-1-alpha-j}.
  double corr = 0.0, last = 0.0, poch = 1.0;
  for (int k = 1; k <= terms; ++k) {
    const int j = k - 1;
    if (j > 0) poch *= alpha + j;
    const double wj = ((j % 2) ? -1.0 : 1.0) * poch * std::pow(R, -1.0 - alpha - j);
    last = ((k % 2) ? -1.0 : 1.0) * G[k] * wj;
    corr += last;
  }
  return {mean, corr, last};
}

Point plane(const Point& xi, int dim) { return dim == 1 ? Point(xi(0), 0) : xi; }

FunctionField plane_wave(const Point& xi, int dim, bool sine) {
  FunctionField f;
  f.id = sine ? "sin-plane" : "cos-plane";
  f.dim = dim;
  f.eval = [xi, sine](const Point& x) { const double p = xi.dot(x); return sine ? std::sin(p) : std::cos(p); };
  f.grad = [xi, sine](const Point& x) {
    const double p = xi.dot(x);
    return Point((sine ? std::cos(p) : -std::sin(p)) * xi);
  };
  f.hess = [xi, sine](const Point& x) {
    const double p = xi.dot(x);
    return Hessian((sine ? -std::sin(p) : -std::cos(p)) * xi * xi.transpose());
  };
  f.far_value = 0.0;
  const double n = xi.norm();
  if (n > 0) f.period = 2 * M_PI / n;
  return f;
}

}  // namespace

double kappa(int dim, double alpha) {
  if (!(alpha > 0 && alpha < 2)) throw InvalidArgument("kappa: alpha must lie in (0,2)");
  const double d = dim;
  return std::pow(M_PI, 0.5 * d) * std::tgamma(1 - 0.5 * alpha) /
         (std::pow(2.0, alpha - 1) * alpha * std::tgamma(0.5 * (d + alpha)));
}

// ---------------------------------------------------------------- kernels

KernelSpec constant_kernel(double alpha, int dim, double a) {
  if (!(a > 0)) throw InvalidArgument("constant_kernel: a must be positive");
  KernelSpec k;
  k.id = "const-" + std::to_string(a).substr(0, 4);
  k.alpha = alpha;
  k.dim = dim;
  k.A = [a](const Point&, const Point&) { return a; };
  k.kappa1 = k.kappa2 = a;
  k.beta = 0.5;
  k.c3 = 0.0;
  k.x_independent = true;
  k.terms.push_back({[](const Point&) { return 1.0; }, [a](const Point&) { return a; }, a, true});
  return k;
}

KernelSpec separable_kernel(double alpha, int dim, std::function<double(const Point&)> w,
                            std::function<double(const Point&)> a0, double kappa1, double kappa2, double beta,
                            double c3, std::optional<double> a0_constant) {
  KernelSpec k;
  k.id = "separable";
  k.alpha = alpha;
  k.dim = dim;
  k.A = [w, a0](const Point& x, const Point& h) { return w(x) * a0(h); };
  k.kappa1 = kappa1;
  k.kappa2 = kappa2;
  k.beta = beta;
  k.c3 = c3;
  k.terms.push_back({w, a0, a0_constant, true});
  return k;
}

KernelSpec holder_kernel(double alpha, int dim, double beta, double amp, double period) {
  const double c = 2 * M_PI / period;
  auto w = [amp, beta, c](const Point& x) { return 1.0 + amp * std::pow(std::abs(std::sin(c * x(0))), beta); };
  KernelSpec k = separable_kernel(alpha, dim, w, [](const Point&) { return 1.0; }, 1.0, 1.0 + amp, beta,
                                  amp * std::pow(c, beta), 1.0);
  k.id = "holder-" + std::to_string(beta).substr(0, 4);
  k.x_period = period;
  return k;
}

KernelSpec mixed_kernel(double alpha, int dim, double beta, double amp, double period) {
  const double c = 2 * M_PI / period;
  auto w1 = [amp, beta, c](const Point& x) { return 1.0 + amp * std::pow(std::abs(std::sin(c * x(0))), beta); };
  auto w2 = [c](const Point& x) { return 0.2 * std::cos(c * x(0)); };
  auto a2 = [](const Point& h) { return std::exp(-h.squaredNorm()); };
  KernelSpec k;
  k.id = "mixed-" + std::to_string(beta).substr(0, 4);
  k.alpha = alpha;
  k.dim = dim;
  k.A = [w1, w2, a2](const Point& x, const Point& h) { return w1(x) + w2(x) * a2(h); };
  k.kappa1 = 0.8;
  k.kappa2 = 1.2 + amp;
  k.beta = beta;
  k.c3 = amp * std::pow(c, beta) + 0.2 * std::pow(2.0, 1 - beta) * std::pow(c, beta);
  k.terms.push_back({w1, [](const Point&) { return 1.0; }, 1.0, true});
  k.terms.push_back({w2, a2, std::nullopt, true});
  k.x_period = period;
  return k;
}

KernelSpec bumped_kernel(double alpha, int dim, double c) {
  auto a0 = [c](const Point& h) { return 1.0 + c * std::exp(-h.squaredNorm()); };
  KernelSpec k = separable_kernel(alpha, dim, [](const Point&) { return 1.0; }, a0, 1.0, 1.0 + c, 0.5, 0.0);
  k.id = "bumped";
  k.x_independent = true;
  return k;
}

KernelSpec frozen(const KernelSpec& k, const Point& x0) {
  KernelSpec f = k;
  f.id = k.id + "@frozen";
  auto A = k.A;
  f.A = [A, x0](const Point&, const Point& h) { return A(x0, h); };
  f.c3 = 0.0;
  f.x_independent = true;
  f.far = nullptr;
  f.terms.clear();
  for (const auto& t : k.terms) {
    const double w0 = t.w(x0);
    f.terms.push_back({[w0](const Point&) { return w0; }, t.a0,
                       t.a0_constant ? std::optional<double>(*t.a0_constant) : std::nullopt, t.a0_even});
  }
  return f;
}

KernelSpec perturbation(const KernelSpec& k, const Point& x0) {
  KernelSpec b = k;
  b.id = k.id + "@perturbation";
  auto A = k.A;
  b.A = [A, x0](const Point& x, const Point& h) { return A(x, h) - A(x0, h); };
  b.kappa1 = -(k.kappa2 - k.kappa1);
  b.kappa2 = k.kappa2 - k.kappa1;
  b.x_independent = false;
  b.far = nullptr;
  b.terms.clear();
  for (const auto& t : k.terms) {
    auto w = t.w;
    const double w0 = t.w(x0);
    b.terms.push_back({[w, w0](const Point& x) { return w(x) - w0; }, t.a0, t.a0_constant, t.a0_even});
  }
  return b;
}

KernelSpec truncated_kernel(const KernelSpec& base, double h0, double rough_beta) {
  if (!(h0 > 0)) throw InvalidArgument("truncated_kernel: h0 must be positive");
  KernelSpec k = base;
  k.id = base.id + "@h0";
  auto A = base.A;
  const double lo = base.kappa1, hi = base.kappa2;
  const int dim = base.dim;
  k.A = [A, h0, lo, hi, rough_beta, dim](const Point& x, const Point& h) {
    if (norm_d(h, dim) <= h0) return A(x, h);
    return lo + (hi - lo) * std::pow(std::abs(std::sin(x(0))), rough_beta);
  };
  k.truncation_h0 = h0;
  k.x_independent = false;
  k.terms.clear();
  return k;
}

KernelValidation validate_kernel(const KernelSpec& k, int probes, unsigned long long seed) {
  KernelValidation v;
  v.exponents_ok = k.beta > 0 && k.beta < 1 && !is_integer(k.alpha + k.beta) && k.alpha > 0 && k.alpha < 2;
  std::mt19937_64 rng(seed);
  const double span = k.x_period.value_or(10.0);
  std::uniform_real_distribution<double> ux(-span, span), uth(0, 2 * M_PI), ulog(-3, 3), uk(-4, 0);
  v.min_A = std::numeric_limits<double>::infinity();
  v.max_A = -v.min_A;
  for (int i = 0; i < probes; ++i) {
    const Point x(ux(rng), k.dim == 2 ? ux(rng) : 0.0);
    double r = std::pow(10.0, ulog(rng));
    if (k.truncation_h0 && i % 2 == 0) r = std::min(r, *k.truncation_h0);
    const double th = uth(rng);
    const Point h = k.dim == 1 ? Point(th < M_PI ? r : -r, 0) : Point(r * std::cos(th), r * std::sin(th));
    const double a = k.A(x, h);
    v.min_A = std::min(v.min_A, a);
    v.max_A = std::max(v.max_A, a);
    const double kk = std::pow(10.0, uk(rng));
    const double kth = uth(rng);
    const Point dk = k.dim == 1 ? Point(kth < M_PI ? kk : -kk, 0) : Point(kk * std::cos(kth), kk * std::sin(kth));
    if (k.truncation_h0 && r > *k.truncation_h0) continue;
    v.holder_ratio = std::max(v.holder_ratio, std::abs(k.A(x + dk, h) - a) / std::pow(kk, k.beta));
  }
  const double tol = 1e-12;
  v.ellipticity_ok = v.min_A >= k.kappa1 - tol && v.max_A <= k.kappa2 + tol && k.kappa1 > 0;
  v.holder_ok = v.holder_ratio <= k.c3 * (1 + 1e-9) + tol;
  return v;
}

// ---------------------------------------------------------------- quadrature spec

double QuadratureSpec::inner_radius() const { return std::ldexp(1.0, -ring_levels); }

double QuadratureSpec::effective_outer_cut(int dim) const {
  if (outer_cut > 0) return outer_cut;
  return dim == 1 ? 256.0 : 16.0;
}

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec r = *this;
  r.panel_width = panel_width / 10;
  r.angular_min = angular_min * 4;
  r.radial_order = std::min(radial_order * 2, 16);
  r.ring_levels = ring_levels + 4;
  return r;
}

void validate(const QuadratureSpec& q, int dim) {
  const double d = q.inner_radius(), R = q.effective_outer_cut(dim);
  if (!(0 < d && d < 1 && 1 < R)) throw InvalidArgument("QuadratureSpec: need 0 < delta < 1 < R");
  if (q.ring_levels < 1 || q.radial_order < 2 || q.angular_min < 4 || !(q.panel_width > 0) || !(q.tolerance > 0))
    throw InvalidArgument("QuadratureSpec: invalid node counts");
}

double first_difference(const FunctionField& f, const Point& x, const Point& h) { return f(x + h) - f(x); }

double compensated_difference(const FunctionField& f, const Point& x, const Point& h) {
  if (!f.grad) throw InvalidArgument("compensated_difference: field has no gradient");
  return f(x + h) - f(x) - f.grad(x).dot(h);
}

// ---------------------------------------------------------------- operator

OperatorValue apply_L_detailed(const KernelSpec& k, const FunctionField& f, const Point& x, const QuadratureSpec& q) {
  if (f.dim != k.dim) throw InvalidArgument("apply_L: dimension mismatch");
  validate(q, k.dim);
  const double alpha = k.alpha;
  const int dim = k.dim;
  if (!(f.regularity > alpha)) throw InvalidArgument("apply_L: field " + f.id + " is not more regular than alpha");
  const bool comp = alpha >= 1;
  if (comp && !f.grad) throw InvalidArgument("apply_L: alpha >= 1 needs the gradient of " + f.id);

  OperatorValue out;
  const double fx = f(x);
  const Point g = f.grad ? f.grad(x) : Point::Zero();
  const auto inner_theta = [&](double) { return q.angular_min; };
  auto integrand = [&](const Point& h) {
    double e = f(x + h) - fx;
    if (comp && norm_d(h, dim) <= 1.0) e -= g.dot(h);
    return e * k.A(x, h);
  };

  // Inner direct rings.
  double inner = 0.0;
  double last_direct = 0.0;
  for (int j = 0; j < q.ring_levels; ++j) {
    last_direct = shell(dim, alpha, std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j), q.radial_order, integrand,
                        inner_theta, out.evaluations);
    inner += last_direct;
  }

  // Below delta: Taylor rings when a Hessian is available, otherwise more direct rings.
  if (f.hess) {
    const Hessian H = f.hess(x);
    auto quad = [&](const Point& h) { return 0.5 * h.dot(H * h) * k.A(x, h); };
    auto lin = [&](const Point& h) { return g.dot(h) * k.A(x, h); };
    auto taylor_ring = [&](int j, bool linear) {
      const double r0 = std::ldexp(1.0, -j - 1), r1 = std::ldexp(1.0, -j);
      return linear ? shell(dim, alpha, r0, r1, q.radial_order, lin, inner_theta, out.evaluations)
                    : shell(dim, alpha, r0, r1, q.radial_order, quad, inner_theta, out.evaluations);
    };
    // Remainder estimate: the last direct ring against its Taylor model, scaled by the cubic ring ratio.
    const int jl = q.ring_levels - 1;
    const double model = taylor_ring(jl, false) + (comp ? 0.0 : taylor_ring(jl, true));
    const double q3 = std::pow(2.0, -(3.0 - alpha));
    out.error += std::abs(last_direct - model) * q3 / (1 - q3);
    double Q = 0.0, Lsum = 0.0, Qlast = 0.0, Llast = 0.0;
    for (int j = q.ring_levels; j < q.ring_levels + q.taylor_levels; ++j) {
      Qlast = taylor_ring(j, false);
      Q += Qlast;
      if (!comp) {
        Llast = taylor_ring(j, true);
        Lsum += Llast;
      }
    }
    const double q2 = std::pow(2.0, -(2.0 - alpha));
    Q += Qlast * q2 / (1 - q2);
    if (!comp) {
      const double q1 = std::pow(2.0, -(1.0 - alpha));
      Lsum += Llast * q1 / (1 - q1);
    }
    inner += Q + Lsum;
  } else {
    const double noise = 8 * kEps * (std::abs(fx) + 1e-300) * std::max(std::abs(k.kappa2), 1.0) * omega(dim) / alpha;
    auto direct_ring = [&](int j) {
      return shell(dim, alpha, std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j), q.radial_order, integrand, inner_theta,
                   out.evaluations);
    };
    const RingResult rr = ring_series(q.ring_levels, q.max_direct_levels, noise, alpha, direct_ring);
    inner += rr.value;
    out.error += rr.error;
    out.extrapolated = rr.extrapolated;
  }

  // Outer zone [1, R].
  const double R = q.effective_outer_cut(dim);
  const int panels = static_cast<int>(std::ceil((R - 1.0) / q.panel_width));
  const double pw = (R - 1.0) / panels;
  const auto outer_theta = [&](double r) {
    return std::max(q.angular_min, static_cast<int>(std::ceil(2 * M_PI * r / q.panel_width)));
  };
  double outer = 0.0;
  for (int p = 0; p < panels; ++p)
    outer += shell(dim, alpha, 1.0 + p * pw, 1.0 + (p + 1) * pw, q.radial_order, integrand, outer_theta,
                   out.evaluations);

  // Tail beyond R from the far value of f.
  const double fc = far_coefficient(k, x, R);
  const double D = shell_deviation(f, x, R, dim);
  const double kap = std::max(std::abs(k.kappa1), std::abs(k.kappa2));
  double tail;
  if (f.period && dim == 1) {
    const double P = *f.period;
    const auto right = periodic_tail_1d([&](double h) { return f(x + Point(h, 0)); }, P, R, alpha);
    const auto left = periodic_tail_1d([&](double h) { return f(x - Point(h, 0)); }, P, R, alpha);
    tail = fc * ((right[0] - fx + left[0] - fx) * std::pow(R, -alpha) / alpha + right[1] + left[1]);
    out.error += kap * (std::abs(right[2]) + std::abs(left[2])) * 4;
  } else {
    tail = fc * (f.far_value - fx) * omega(dim) * std::pow(R, -alpha) / alpha;
    if (f.period) out.error += kap * omega(dim) * D * (*f.period) * std::pow(R, -1.0 - alpha);
    else out.error += kap * omega(dim) * D * std::pow(R, -alpha) / alpha;
  }
  out.tail_bound = 2 * std::max(std::abs(fx), D + std::abs(f.far_value)) * kap * omega(dim) * std::pow(R, -alpha) / alpha;

  out.value = inner + outer + tail;
  out.error += 64 * kEps * (std::abs(inner) + std::abs(outer) + std::abs(tail));
  if (!std::isfinite(out.value)) throw NumericalFailure("apply_L: non-finite quadrature value");
  return out;
}

double apply_L(const KernelSpec& k, const FunctionField& f, const Point& x, const QuadratureSpec& q) {
  return apply_L_detailed(k, f, x, q).value;
}

double apply_L0(const KernelSpec& k, const FunctionField& f, const Point& x, const QuadratureSpec& q) {
  if (!k.x_independent) throw InvalidArgument("apply_L0: kernel depends on x");
  return apply_L(k, f, x, q);
}

double apply_B(const KernelSpec& k, const Point& x0, const FunctionField& f, const Point& x, const QuadratureSpec& q) {
  if (k.x_independent) return 0.0;
  return apply_L(perturbation(k, x0), f, x, q);
}

std::complex<double> symbol(const KernelSpec& k, const Point& xi, const QuadratureSpec& q) {
  if (!k.x_independent) throw InvalidArgument("symbol: kernel depends on x");
  const Point z = Point::Zero();
  const Point w = plane(xi, k.dim);
  if (w.norm() == 0) return 0.0;
  return {apply_L(k, plane_wave(w, k.dim, false), z, q), apply_L(k, plane_wave(w, k.dim, true), z, q)};
}

double symbol_even_1d(const std::function<double(const Point&)>& a0, double alpha, double kwave,
                      const QuadratureSpec& q) {
  if (kwave < 0) kwave = -kwave;
  if (kwave == 0) return 0.0;
  // psi(k) = k^alpha int (1 - cos u) a0(u/k) |u|^{-1-alpha} du.
  KernelSpec scaled;
  scaled.alpha = alpha;
  scaled.dim = 1;
  scaled.A = [a0, kwave](const Point&, const Point& u) { return a0(Point(u(0) / kwave, 0.0)); };
  scaled.kappa1 = scaled.kappa2 = 1.0;
  scaled.x_independent = true;
  scaled.far = [a0](const Point&) { return 0.5 * (a0(Point(1e300, 0)) + a0(Point(-1e300, 0))); };
  return -std::pow(kwave, alpha) * apply_L(scaled, plane_wave(Point(1, 0), 1, false), Point::Zero(), q);
}

// ---------------------------------------------------------------- difference audits

DifferenceSamples DifferenceSamples::doubled() const {
  DifferenceSamples d = *this;
  d.x_count = 2 * x_count - 1;
  d.j_max = j_max + 2;
  return d;
}

namespace {

std::vector<Point> sample_points(int dim, const DifferenceSamples& s) {
  std::vector<Point> xs;
  const int n = s.x_count | 1;
  for (int i = 0; i < n; ++i) {
    const double t = -s.x_extent + 2 * s.x_extent * i / (n - 1);
    if (dim == 1) xs.emplace_back(t, 0);
    else {
      xs.emplace_back(t, 0);
      xs.emplace_back(0.5 * t, t);
    }
  }
  return xs;
}

std::vector<Point> sample_offsets(int dim, const DifferenceSamples& s) {
  std::vector<Point> hs;
  for (int j = -2; j <= s.j_max; ++j) {
    const double r = std::ldexp(1.0, -j);
    for (double sg : {1.0, -1.0}) {
      hs.emplace_back(sg * r, 0);
      if (dim == 2) {
        hs.emplace_back(0, sg * r);
        hs.emplace_back(sg * r / std::sqrt(2.0), r / std::sqrt(2.0));
      }
    }
  }
  return hs;
}

struct CaseWorst {
  std::array<double, 5> w{};
};

CaseWorst fd_scan(const FunctionField& f, double gamma, double N, const DifferenceSamples& s,
                  const std::array<bool, 5>& on) {
  const auto xs = sample_points(f.dim, s);
  const auto hs = sample_offsets(f.dim, s);
  const double g1 = std::min(gamma, 1.0), g2 = std::min(gamma, 2.0);
  std::vector<CaseWorst> part(xs.size());
  parallel_chunks(xs.size(), 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const Point& x = xs[i];
      CaseWorst cw;
      for (const auto& h : hs) {
        const double nh = h.norm();
        const double Eh = first_difference(f, x, h);
        if (on[0]) {
          cw.w[0] = std::max(cw.w[0], std::abs(Eh) / (std::min(std::pow(nh, g1), 1.0) * N));
          // The compensated bound is only meaningful for |h| <= 1: F_h grows linearly beyond.
          if (gamma > 1 && f.grad && nh <= 1.0)
            cw.w[0] = std::max(cw.w[0], std::abs(compensated_difference(f, x, h)) / (std::pow(nh, g2) * N));
        }
        for (const auto& kk : hs) {
          const double nk = kk.norm();
          const double dE = first_difference(f, x + kk, h) - Eh;
          if (on[1]) cw.w[1] = std::max(cw.w[1], std::abs(dE) / (std::min(std::pow(nh, g1), std::pow(nk, g1)) * N));
          if (on[2])
            cw.w[2] = std::max(cw.w[2], std::abs(dE) / (std::min(std::pow(nh, gamma - 1) * nk, nh * std::pow(nk, gamma - 1)) * N));
          if (on[3] || on[4]) {
            const double dF = compensated_difference(f, x + kk, h) - compensated_difference(f, x, h);
            if (on[3])
              cw.w[3] = std::max(cw.w[3], std::abs(dF) / (std::min(std::pow(nh, gamma), nh * std::pow(nk, gamma - 1)) * N));
            if (on[4])
              cw.w[4] = std::max(cw.w[4], std::abs(dF) / (std::min(std::pow(nk, gamma - 2) * nh * nh, std::pow(nh, gamma - 1) * nk) * N));
          }
        }
      }
      part[i] = cw;
    }
  });
  CaseWorst out;
  for (const auto& p : part)
    for (int c = 0; c < 5; ++c) out.w[c] = std::max(out.w[c], p.w[c]);
  return out;
}

}  // namespace

FdAudit fd_bounds_audit(const FunctionField& f, double gamma, const DifferenceSamples& s, const ProbeBox* box) {
  check_exponent(gamma);
  if (gamma > f.regularity) throw InvalidArgument("fd_bounds_audit: gamma exceeds the regularity of " + f.id);
  const ProbeBox b = box ? *box : ProbeBox::standard(f.dim);
  FdAudit out;
  out.field_id = f.id;
  out.gamma = gamma;
  out.norm = hse2_norm(f, gamma, b);
  const bool grad = static_cast<bool>(f.grad);
  const std::array<bool, 5> on = {true, true, gamma > 1 && gamma < 2,
                                  gamma > 1 && gamma < 2 && grad, gamma > 2 && gamma < 3 && grad};
  const double N = out.norm;
  CaseWorst w1, w2;
  if (N > 0) {
    w1 = fd_scan(f, gamma, N, s, on);
    w2 = fd_scan(f, gamma, N, s.doubled(), on);
  }
  out.pass = true;
  for (int c = 0; c < 5; ++c) {
    FdCase fc;
    fc.id = static_cast<char>('a' + c);
    fc.applicable = on[c];
    fc.worst = w1.w[c];
    fc.worst_doubled = w2.w[c];
    fc.proof_constant = c < 2 ? 2.0 : 0.0;
    if (fc.applicable) {
      const bool finite = std::isfinite(fc.worst) && std::isfinite(fc.worst_doubled);
      const double lo = std::min(fc.worst, fc.worst_doubled), hi = std::max(fc.worst, fc.worst_doubled);
      const bool stable = hi == 0.0 || (lo > 0 && hi <= 1.5 * lo);
      fc.pass = finite && stable && (c >= 2 || hi <= fc.proof_constant);
    } else {
      fc.pass = true;
    }
    out.pass = out.pass && fc.pass;
    out.cases.push_back(fc);
  }
  return out;
}

namespace {

// int |Delta_k D_h f(x)| |h|^{-d-alpha} dh with D_h = F_h on |h| <= 1 when alpha >= 1, else E_h.
double difference_integral(const FunctionField& f, double alpha, const Point& x, const Point& kk,
                           const QuadratureSpec& q) {
  const int dim = f.dim;
  const bool comp = alpha >= 1;
  const double fx = f(x), fxk = f(x + kk);
  const Point gx = comp ? f.grad(x) : Point::Zero();
  const Point gxk = comp ? f.grad(x + kk) : Point::Zero();
  auto integrand = [&](const Point& h) {
    double d = (f(x + kk + h) - fxk) - (f(x + h) - fx);
    if (comp && norm_d(h, dim) <= 1.0) d -= (gxk - gx).dot(h);
    return std::abs(d);
  };
  long evals = 0;
  const auto th = [&](double) { return q.angular_min; };
  auto ring = [&](int j) {
    return shell(dim, alpha, std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j), q.radial_order, integrand, th, evals);
  };
  double v = 0.0;
  for (int j = 0; j < q.ring_levels; ++j) v += ring(j);
  const double noise = 16 * kEps * (std::abs(fx) + std::abs(fxk) + 1e-300) * omega(dim) / alpha;
  v += ring_series(q.ring_levels, q.max_direct_levels, noise, alpha, ring).value;
  const double R = q.effective_outer_cut(dim);
  const int panels = static_cast<int>(std::ceil((R - 1.0) / q.panel_width));
  const double pw = (R - 1.0) / panels;
  const auto oth = [&](double r) {
    return std::max(q.angular_min, static_cast<int>(std::ceil(2 * M_PI * r / q.panel_width)));
  };
  for (int p = 0; p < panels; ++p) v += shell(dim, alpha, 1.0 + p * pw, 1.0 + (p + 1) * pw, q.radial_order, integrand, oth, evals);
  // Far field: f(x+k+h) - f(x+h) -> 0, leaving |f(x+k) - f(x)|.
  v += std::abs(fxk - fx) * omega(dim) * std::pow(R, -alpha) / alpha;
  return v;
}

}  // namespace

FdIntegralAudit fd_integral_audit(const FunctionField& f, const KernelSpec& k, double beta,
                                  const std::vector<double>& k_list, const std::vector<Point>& xs,
                                  const QuadratureSpec& q) {
  const double alpha = k.alpha;
  const double g = alpha + beta;
  if (!(beta > 0 && beta < 1) || is_integer(g) || g >= 3) throw InvalidArgument("fd_integral_audit: inadmissible alpha+beta");
  if (f.regularity < g) throw InvalidArgument("fd_integral_audit: field less regular than alpha+beta");
  if (alpha >= 1 && !f.grad) throw InvalidArgument("fd_integral_audit: alpha >= 1 needs a gradient");
  FdIntegralAudit out;
  out.norm = hse2_norm(f, g, ProbeBox::standard(f.dim));
  if (out.norm == 0) {
    out.pass = true;
    return out;
  }
  auto worst = [&](const QuadratureSpec& qq) {
    double w = 0.0;
    std::vector<double> part(xs.size());
    parallel_chunks(xs.size(), xs.size(), [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        double m = 0.0;
        for (double kv : k_list) {
          if (kv == 0) continue;
          const Point kk(kv, 0.0);
          m = std::max(m, difference_integral(f, alpha, xs[i], kk, qq) / (std::pow(std::abs(kv), beta) * out.norm));
        }
        part[i] = m;
      }
    });
    for (double p : part) w = std::max(w, p);
    return w;
  };
  out.worst = worst(q);
  QuadratureSpec qr = q;
  qr.panel_width = q.panel_width / 2;
  qr.radial_order = std::min(2 * q.radial_order, 16);
  qr.angular_min = 2 * q.angular_min;
  out.worst_refined = worst(qr);
  const double lo = std::min(out.worst, out.worst_refined), hi = std::max(out.worst, out.worst_refined);
  out.pass = std::isfinite(hi) && (hi == 0 || (lo > 0 && hi <= 1.5 * lo));
  return out;
}

L0SmoothnessAudit smoothness_of_L0u_audit(const FunctionField& u, const KernelSpec& k, double beta, double c1,
                                          const QuadratureSpec& q) {
  if (!k.x_independent) throw InvalidArgument("smoothness_of_L0u_audit: kernel must be x-independent");
  const double alpha = k.alpha, g = alpha + beta;
  if (!(beta > 0 && beta < 1) || is_integer(g) || g >= 3) throw InvalidArgument("smoothness_of_L0u_audit: inadmissible alpha+beta");
  L0SmoothnessAudit out;
  out.c1 = c1;
  FunctionField Lu;
  Lu.id = "L0(" + u.id + ")";
  Lu.dim = u.dim;
  Lu.eval = [k, u, q](const Point& x) { return apply_L(k, u, x, q); };
  Lu.regularity = beta;
  ProbeBox box;
  box.dim = u.dim;
  box.half_width = u.dim == 1 ? 4.0 : 2.0;
  box.spacing = u.dim == 1 ? 1.0 / 32 : 1.0 / 4;
  out.report = holder_norm(Lu, beta, box);
  out.u_norm = hse2_norm(u, g, ProbeBox::standard(u.dim));
  // Sup part from the first-difference bounds; seminorm part from the difference integrals.
  const double gp = alpha >= 1 ? std::min(g, 2.0) : std::min(g, 1.0);
  const double c_sup = k.kappa2 * omega(u.dim) * (1.0 / (gp - alpha) + 2.0 / alpha);
  out.pass = out.report.total <= (c_sup + k.kappa2 * c1) * out.u_norm * (1 + 1e-9) + 1e-12;
  return out;
}

}  // namespace slk
