#include "slk/holder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "slk/parallel.hpp"
#include "slk/quadrature.hpp"

namespace slk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Values on an n^d lattice with spacing dx starting at origin; axis 0 slowest.
struct Lattice {
  int dim;
  long n;
  double dx;
  Point origin;
  bool periodic;
  Eigen::VectorXd v;

  Point point(long i0, long i1) const {
    return origin + Point(i0 * dx, dim == 2 ? i1 * dx : 0.0);
  }
  // Returns false when the index leaves a non-periodic lattice.
  bool wrap(long& i) const {
    if (periodic) {
      i = ((i % n) + n) % n;
      return true;
    }
    return i >= 0 && i < n;
  }
  double at(long i0, long i1) const { return v[dim == 1 ? i0 : i0 * n + i1]; }
};

struct Offset {
  long m0, m1;
  double len;
  double pow_len;
};

struct Best {
  double value = 0.0;
  Point x = Point::Zero();
  Point h = Point::Zero();
};

std::vector<Offset> offsets(const Lattice& L, double gamma, Window w) {
  std::vector<Offset> out;
  const long mmax = static_cast<long>(std::floor(w.h_max / L.dx + 1e-9));
  for (long m0 = 0; m0 <= mmax; ++m0)
    for (long m1 = (L.dim == 2 ? -mmax : 0); m1 <= (L.dim == 2 ? mmax : 0); ++m1) {
      if (m0 == 0 && m1 <= 0) continue;  // half-plane: h and -h give the same quotients
      const double len = std::hypot(static_cast<double>(m0), static_cast<double>(m1)) * L.dx;
      if (len < w.h_min * (1 - 1e-12) || len > w.h_max * (1 + 1e-12)) continue;
      out.push_back({m0, m1, len, std::pow(len, gamma)});
    }
  if (out.empty()) throw InvalidArgument("seminorm: window contains no lattice offsets");
  return out;
}

Best scan(const Lattice& L, double gamma, Window w, bool second) {
  const auto offs = offsets(L, gamma, w);
  const std::size_t chunks = std::min<std::size_t>(offs.size(), 64);
  std::vector<Best> part(chunks);
  parallel_chunks(offs.size(), chunks, [&](std::size_t b, std::size_t e, std::size_t c) {
    Best best;
    for (std::size_t k = b; k < e; ++k) {
      const Offset& o = offs[k];
      const long n1 = L.dim == 2 ? L.n : 1;
      for (long i0 = 0; i0 < L.n; ++i0)
        for (long i1 = 0; i1 < n1; ++i1) {
          long p0 = i0 + o.m0, p1 = i1 + o.m1;
          if (!L.wrap(p0) || (L.dim == 2 && !L.wrap(p1))) continue;
          double diff;
          if (second) {
            long q0 = i0 - o.m0, q1 = i1 - o.m1;
            if (!L.wrap(q0) || (L.dim == 2 && !L.wrap(q1))) continue;
            diff = L.at(p0, p1) + L.at(q0, q1) - 2.0 * L.at(i0, i1);
          } else {
            diff = L.at(p0, p1) - L.at(i0, i1);
          }
          const double q = std::abs(diff) / o.pow_len;
          if (q > best.value) {
            best.value = q;
            best.x = L.point(i0, i1);
            best.h = Point(o.m0 * L.dx, o.m1 * L.dx);
          }
        }
    }
    part[c] = best;
  });
  Best best;
  for (const auto& p : part)
    if (p.value > best.value) best = p;
  return best;
}

Lattice from_sampled(const SampledField& f) {
  const auto& g = f.grid();
  return {g.dim(), g.n(), g.spacing(), Point::Zero(), true, f.values()};
}

long box_points(const ProbeBox& box) { return box.points_per_axis(); }

template <typename Fn>
Lattice from_box(const ProbeBox& box, Fn&& value) {
  const long n = box_points(box);
  const long half = (n - 1) / 2;
  Lattice L{box.dim, n, box.spacing, Point(-half * box.spacing, box.dim == 2 ? -half * box.spacing : 0.0), false, {}};
  L.v.resize(box.dim == 1 ? n : n * n);
  const long n1 = box.dim == 2 ? n : 1;
  parallel_chunks(static_cast<std::size_t>(n), 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (long i0 = static_cast<long>(b); i0 < static_cast<long>(e); ++i0)
      for (long i1 = 0; i1 < n1; ++i1) {
        const double y = value(L.point(i0, i1));
        if (!std::isfinite(y)) throw NumericalFailure("non-finite field value while sampling probe box");
        L.v[box.dim == 1 ? i0 : i0 * n + i1] = y;
      }
  });
  return L;
}

void check_dim(const FunctionField& f, const ProbeBox& box) {
  if (f.dim != box.dim) throw InvalidArgument("probe box dimension does not match field");
}

std::function<Point(const Point&)> gradient_of(const FunctionField& f, const ProbeBox& box) {
  if (f.grad) return f.grad;
  if (box.fd_step <= 0) throw InvalidArgument("field " + f.id + " has no gradient and no fd_step was declared");
  const double s = box.fd_step;
  const int d = f.dim;
  auto e = f.eval;
  return [e, s, d](const Point& x) {
    Point g = Point::Zero();
    for (int i = 0; i < d; ++i) {
      Point u = Point::Zero();
      u(i) = s;
      g(i) = (e(x + u) - e(x - u)) / (2 * s);
    }
    return g;
  };
}

std::function<Hessian(const Point&)> hessian_of(const FunctionField& f, const ProbeBox& box) {
  if (f.hess) return f.hess;
  if (box.fd_step <= 0) throw InvalidArgument("field " + f.id + " has no Hessian and no fd_step was declared");
  const double s = box.fd_step;
  const int d = f.dim;
  auto gr = gradient_of(f, box);
  return [gr, s, d](const Point& x) {
    Hessian H = Hessian::Zero();
    for (int j = 0; j < d; ++j) {
      Point u = Point::Zero();
      u(j) = s;
      const Point col = (gr(x + u) - gr(x - u)) / (2 * s);
      for (int i = 0; i < d; ++i) H(i, j) = col(i);
    }
    return H;
  };
}

HolderReport make_report(const std::string& id, double gamma, Window w, double sup, const Best& b,
                         HolderMethod m) {
  HolderReport r;
  r.field_id = id;
  r.gamma = gamma;
  r.window = w;
  r.sup_norm = sup;
  r.seminorm = b.value;
  r.total = sup + b.value;
  r.witness_x = b.x;
  r.witness_h = b.h;
  r.method = m;
  return r;
}

bool is_integer(double a) { return a == std::floor(a); }

// 16 panels of 4 Gauss-Legendre nodes on [-1, 1]; 0 is a panel boundary.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_panels() {
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> r;
    const auto& gl = gauss_legendre(4);
    const int panels = 16;
    const double w = 2.0 / panels;
    for (int p = 0; p < panels; ++p)
      for (int k = 0; k < gl.size(); ++k) {
        r.first.push_back(-1.0 + w * (p + 0.5 * (gl.nodes[k] + 1.0)));
        r.second.push_back(0.5 * w * gl.weights[k]);
      }
    return r;
  }();
  return rule;
}

// Sum over derivative components of either sup norms or first-difference seminorms.
double derivative_part(const FunctionField& f, int order, double gamma, const ProbeBox& box, bool seminorm) {
  const Window w = box.effective_window();
  double total = 0.0;
  if (order == 1) {
    auto gr = gradient_of(f, box);
    for (int i = 0; i < f.dim; ++i) {
      const Lattice L = from_box(box, [&](const Point& x) { return gr(x)(i); });
      total += seminorm ? scan(L, gamma, w, false).value : L.v.cwiseAbs().maxCoeff();
    }
  } else {
    auto he = hessian_of(f, box);
    for (int i = 0; i < f.dim; ++i)
      for (int j = 0; j < f.dim; ++j) {
        const Lattice L = from_box(box, [&](const Point& x) { return he(x)(i, j); });
        total += seminorm ? scan(L, gamma, w, false).value : L.v.cwiseAbs().maxCoeff();
      }
  }
  return total;
}

}  // namespace

std::string to_string(HolderMethod m) {
  switch (m) {
    case HolderMethod::first_difference: return "first_difference";
    case HolderMethod::second_difference: return "second_difference";
    case HolderMethod::derivative_based: return "derivative_based";
  }
  return "unknown";
}

ProbeBox ProbeBox::standard(int dim) {
  ProbeBox b;
  b.dim = dim;
  if (dim == 2) {
    b.half_width = 4.0;
    b.spacing = 1.0 / 8;
  }
  return b;
}

Window ProbeBox::effective_window() const {
  if (window) return *window;
  return {2.0 * spacing, 0.5 * half_width};
}

int ProbeBox::points_per_axis() const {
  if (!(spacing > 0) || !(half_width > spacing)) throw InvalidArgument("ProbeBox: need 0 < spacing < half_width");
  return 2 * static_cast<int>(std::round(half_width / spacing)) + 1;
}

void check_exponent(double gamma, bool integer_mode) {
  if (!(gamma > 0 && gamma < 3)) throw InvalidArgument("Hölder exponent must lie in (0,3)");
  if (!integer_mode && is_integer(gamma)) throw InvalidArgument("integer Hölder exponent requires integer mode");
}

double sup_norm(const SampledField& f) { return f.values().cwiseAbs().maxCoeff(); }

double sup_norm(const FunctionField& f, const std::vector<Point>& probes) {
  if (probes.empty()) throw InvalidArgument("sup_norm: empty probe set");
  double m = 0.0;
  for (const auto& x : probes) m = std::max(m, std::abs(f(x)));
  return m;
}

double sup_norm(const FunctionField& f, const ProbeBox& box) {
  check_dim(f, box);
  return from_box(box, f.eval).v.cwiseAbs().maxCoeff();
}

Window default_window(const GridSpec& grid) { return {2.0 * grid.spacing(), 0.25 * grid.period()}; }

HolderReport seminorm_first(const SampledField& f, double gamma, std::optional<Window> window) {
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("seminorm_first: gamma must lie in (0,1)");
  const Window w = window.value_or(default_window(f.grid()));
  if (!(w.h_min > 0 && w.h_min < w.h_max)) throw InvalidArgument("seminorm_first: need 0 < h_min < h_max");
  return make_report("", gamma, w, sup_norm(f), scan(from_sampled(f), gamma, w, false), HolderMethod::first_difference);
}

HolderReport seminorm_second(const SampledField& f, double gamma, std::optional<Window> window) {
  if (!(gamma > 0 && gamma <= 2) || gamma == 1.0) throw InvalidArgument("seminorm_second: gamma must lie in (0,1)U(1,2]");
  const Window w = window.value_or(default_window(f.grid()));
  if (!(w.h_min > 0 && w.h_min < w.h_max)) throw InvalidArgument("seminorm_second: need 0 < h_min < h_max");
  return make_report("", gamma, w, sup_norm(f), scan(from_sampled(f), gamma, w, true), HolderMethod::second_difference);
}

HolderReport seminorm_first(const FunctionField& f, double gamma, const ProbeBox& box) {
  check_dim(f, box);
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("seminorm_first: gamma must lie in (0,1)");
  const Window w = box.effective_window();
  if (!(w.h_min > 0 && w.h_min < w.h_max)) throw InvalidArgument("seminorm_first: need 0 < h_min < h_max");
  const Lattice L = from_box(box, f.eval);
  return make_report(f.id, gamma, w, L.v.cwiseAbs().maxCoeff(), scan(L, gamma, w, false), HolderMethod::first_difference);
}

HolderReport seminorm_second(const FunctionField& f, double gamma, const ProbeBox& box) {
  check_dim(f, box);
  if (!(gamma > 0 && gamma <= 2) || gamma == 1.0) throw InvalidArgument("seminorm_second: gamma must lie in (0,1)U(1,2]");
  const Window w = box.effective_window();
  if (!(w.h_min > 0 && w.h_min < w.h_max)) throw InvalidArgument("seminorm_second: need 0 < h_min < h_max");
  const Lattice L = from_box(box, f.eval);
  return make_report(f.id, gamma, w, L.v.cwiseAbs().maxCoeff(), scan(L, gamma, w, true), HolderMethod::second_difference);
}

HolderReport holder_norm(const SampledField& f, double gamma, std::optional<Window> window) {
  check_exponent(gamma);
  if (gamma < 1) return seminorm_first(f, gamma, window);
  if (gamma < 2) return seminorm_second(f, gamma, window);
  throw InvalidArgument("holder_norm: exponents above 2 need analytic derivatives; pass a FunctionField");
}

HolderReport holder_norm(const FunctionField& f, double gamma, const ProbeBox& box) {
  check_exponent(gamma);
  if (gamma < 1) return seminorm_first(f, gamma, box);
  if (gamma < 2) return seminorm_second(f, gamma, box);
  check_dim(f, box);
  const auto grad = gradient_of(f, box);
  const Window w = box.effective_window();
  Best best;
  double sum = 0.0;
  for (int i = 0; i < f.dim; ++i) {
    const Lattice L = from_box(box, [&](const Point& x) { return grad(x)(i); });
    const Best b = scan(L, gamma - 1.0, w, true);
    sum += b.value;
    if (b.value > best.value) best = b;
  }
  HolderReport r = make_report(f.id, gamma, w, sup_norm(f, box), best, HolderMethod::derivative_based);
  r.seminorm = sum;
  r.total = r.sup_norm + sum;
  return r;
}

double n_norm(const FunctionField& f, double a, const ProbeBox& box) {
  check_dim(f, box);
  check_exponent(a, true);
  if (f.regularity < a) return kInf;
  const double sup = sup_norm(f, box);
  if (a < 1) return sup + seminorm_first(f, a, box).seminorm;
  if (a == 1) return sup + derivative_part(f, 1, 0, box, false);
  if (a < 2) return sup + derivative_part(f, 1, a - 1, box, true);
  if (a == 2) return sup + derivative_part(f, 1, 0, box, false) + derivative_part(f, 2, 0, box, false);
  return sup + derivative_part(f, 2, a - 2, box, true);
}

double hse2_norm(const FunctionField& f, double a, const ProbeBox& box) {
  check_dim(f, box);
  check_exponent(a);
  if (f.regularity < a) return kInf;
  if (a < 1) return n_norm(f, a, box);
  double v = sup_norm(f, box) + derivative_part(f, 1, 0, box, false);
  if (a < 2) return v + derivative_part(f, 1, a - 1, box, true);
  return v + derivative_part(f, 2, 0, box, false) + derivative_part(f, 2, a - 2, box, true);
}

double interp_constant(double a, double b, double eps, int dim) {
  if (!(0 < a && a < b && b < 3)) throw InvalidArgument("interp_bound: need 0 < a < b < 3");
  if (is_integer(a)) throw InvalidArgument("interp_bound: integer a is not supported");
  if (!(eps > 0)) throw InvalidArgument("interp_bound: eps must be positive");
  double K, M;
  if (a < 1) {
    if (b <= 1) K = 2, M = 1;
    else if (b <= 2) K = 4, M = 1;
    else K = 6, M = std::pow(2.0, b - 2);
  } else if (a < 2) {
    if (b <= 2) K = 4, M = 3;
    else K = 16, M = std::pow(2.0, b) + 1;
  } else {
    K = 16, M = std::pow(2.0, b) + 3;
  }
  // Coordinate sums over derivatives cost at most a factor d per derivative order of b.
  const double dfac = std::pow(static_cast<double>(dim), std::floor(b));
  K *= dfac;
  M *= dfac;
  const double rho = std::pow(eps / M, 1.0 / (b - a));
  return 1.0 + K * std::pow(rho, -a);
}

BoundCheck interp_bound(const FunctionField& f, double a, double b, double eps, const ProbeBox& box) {
  BoundCheck r;
  r.constant = interp_constant(a, b, eps, f.dim);
  if (f.regularity < b) {
    r.applicable = false;
    r.pass = true;
    r.lhs = n_norm(f, a, box);
    r.rhs = kInf;
    return r;
  }
  r.lhs = n_norm(f, a, box);
  r.rhs = r.constant * sup_norm(f, box) + eps * n_norm(f, b, box);
  r.pass = r.lhs <= r.rhs;
  return r;
}

double product_constant(double a, int dim) {
  check_exponent(a, true);
  if (a < 1) return 2.0;
  if (a == 1) return 1.0;
  if (a < 2) return 1.0 + 2.0 * (1.0 + 8.0 * dim);
  if (a == 2) return 2.0;
  return 355.0 * dim * dim;
}

BoundCheck product_bound(const FunctionField& f, const FunctionField& g, double a, const ProbeBox& box) {
  BoundCheck r;
  r.constant = product_constant(a, f.dim);
  if (f.regularity < a || g.regularity < a) {
    r.applicable = false;
    r.pass = true;
    r.rhs = kInf;
    return r;
  }
  r.lhs = n_norm(product(f, g), a, box);
  r.rhs = r.constant * n_norm(f, a, box) * n_norm(g, a, box);
  r.pass = r.lhs <= r.rhs;
  return r;
}

Mollifier::Mollifier(int dim) : dim_(dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("Mollifier: dim must be 1 or 2");
  const auto& gl = gauss_legendre_panels();
  for (std::size_t i = 0; i < gl.first.size(); ++i) {
    if (dim == 1) {
      rule_.nodes.emplace_back(gl.first[i], 0.0);
      rule_.weights.push_back(gl.second[i]);
      continue;
    }
    for (std::size_t j = 0; j < gl.first.size(); ++j) {
      const Point y(gl.first[i], gl.first[j]);
      if (y.squaredNorm() >= 1.0) continue;
      rule_.nodes.push_back(y);
      rule_.weights.push_back(gl.second[i] * gl.second[j]);
    }
  }
  double mass = 0.0;
  for (std::size_t k = 0; k < rule_.nodes.size(); ++k) mass += rule_.weights[k] * (*this)(rule_.nodes[k]);
  c_ = 1.0 / mass;
}

double Mollifier::operator()(const Point& y) const {
  const double u = 1.0 - y.squaredNorm();
  return u > 0 ? c_ * std::exp(-1.0 / u) : 0.0;
}

Point Mollifier::gradient(const Point& y) const {
  const double u = 1.0 - y.squaredNorm();
  if (u <= 0) return Point::Zero();
  return (*this)(y) * (-2.0 / (u * u)) * y;
}

Hessian Mollifier::hessian(const Point& y) const {
  const double u = 1.0 - y.squaredNorm();
  if (u <= 0) return Hessian::Zero();
  const Hessian yy = y * y.transpose();
  Hessian H = (*this)(y) * (4.0 * yy / (u * u * u * u) - 8.0 * yy / (u * u * u) - 2.0 * Hessian::Identity() / (u * u));
  if (dim_ == 1) H(1, 1) = H(0, 1) = H(1, 0) = 0.0;
  return H;
}

std::array<double, 3> Mollifier::moment_constants(double beta) const {
  // Radial profile psi(r) = exp(-1/(1-r^2)) with exact normalization.
  auto psi = [](double r) { return r < 1 ? std::exp(-1.0 / (1 - r * r)) : 0.0; };
  auto dpsi = [&](double r) { const double u = 1 - r * r; return r < 1 ? psi(r) * (-2.0 * r / (u * u)) : 0.0; };
  auto d2psi = [&](double r) {
    const double u = 1 - r * r;
    return r < 1 ? psi(r) * (4.0 * r * r / (u * u * u * u) - 8.0 * r * r / (u * u * u) - 2.0 / (u * u)) : 0.0;
  };
  auto integ = [](const std::function<double(double)>& g) {
    const auto r = integrate_adaptive(g, 0.0, 1.0, 1e-14, 1e-12, 20000);
    if (!r.converged) throw NumericalFailure("mollifier moment quadrature did not converge");
    return r.value;
  };
  if (dim_ == 1) {
    const double Z = 2 * integ(psi);
    const double m0 = 2 * integ([&](double r) { return std::pow(r, beta) * psi(r); }) / Z;
    const double m1 = 2 * integ([&](double r) { return std::pow(r, beta) * std::abs(dpsi(r)); }) / Z;
    const double m2 = 2 * integ([&](double r) { return std::pow(r, beta) * std::abs(d2psi(r)); }) / Z;
    return {m0, m1, m2};
  }
  // int_0^{2 pi} |a + b cos u| du.
  auto ring = [](double a, double b) {
    if (std::abs(a) >= std::abs(b)) return 2 * M_PI * std::abs(a);
    return 4 * (std::sqrt(b * b - a * a) + a * std::asin(a / std::abs(b)));
  };
  const double Z = 2 * M_PI * integ([&](double r) { return r * psi(r); });
  const double m0 = 2 * M_PI * integ([&](double r) { return std::pow(r, beta + 1) * psi(r); }) / Z;
  const double m1 = 4 * integ([&](double r) { return std::pow(r, beta + 1) * std::abs(dpsi(r)); }) / Z;
  // D_11 = psi'' cos^2 + (psi'/r) sin^2, D_12 = (psi'' - psi'/r) cos sin.
  const double m11 = integ([&](double r) {
    if (r == 0) return 0.0;
    const double A = d2psi(r), B = dpsi(r) / r;
    return std::pow(r, beta + 1) * ring(0.5 * (A + B), 0.5 * (A - B));
  }) / Z;
  const double m12 = 2 * integ([&](double r) {
    if (r == 0) return 0.0;
    return std::pow(r, beta + 1) * std::abs(d2psi(r) - dpsi(r) / r);
  }) / Z;
  return {m0, m1, std::max(m11, m12)};
}

FunctionField mollify(const FunctionField& f, double eps) {
  if (!(eps > 0)) throw InvalidArgument("mollify: eps must be positive");
  auto phi = std::make_shared<const Mollifier>(f.dim);
  auto fe = f.eval;
  FunctionField m;
  m.id = "mollify(" + f.id + ")";
  m.dim = f.dim;
  m.eval = [phi, fe, eps](const Point& x) {
    const auto& R = phi->rule();
    double s = 0.0;
    for (std::size_t k = 0; k < R.nodes.size(); ++k) s += R.weights[k] * (*phi)(R.nodes[k]) * fe(x - eps * R.nodes[k]);
    if (!std::isfinite(s)) throw NumericalFailure("mollify: non-finite quadrature value");
    return s;
  };
  m.grad = [phi, fe, eps](const Point& x) {
    const auto& R = phi->rule();
    Point s = Point::Zero();
    for (std::size_t k = 0; k < R.nodes.size(); ++k)
      s += R.weights[k] * fe(x - eps * R.nodes[k]) * phi->gradient(R.nodes[k]);
    return Point(s / eps);
  };
  m.hess = [phi, fe, eps](const Point& x) {
    const auto& R = phi->rule();
    Hessian s = Hessian::Zero();
    for (std::size_t k = 0; k < R.nodes.size(); ++k)
      s += R.weights[k] * fe(x - eps * R.nodes[k]) * phi->hessian(R.nodes[k]);
    return Hessian(s / (eps * eps));
  };
  m.decay = f.decay;
  if (f.decay.kind == Decay::Kind::compact_support) m.decay.param += eps;
  m.far_value = f.far_value;
  m.period = f.period;
  return m;
}

std::vector<Point> mollify_probes(int dim, double half_width) {
  std::vector<Point> p;
  const int coarse = dim == 1 ? 257 : 33;
  const int fine = dim == 1 ? 129 : 17;
  const double fh = std::ldexp(1.0, -12);
  auto axis = [](int n, double step) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back((i - (n - 1) / 2) * step);
    return v;
  };
  for (const auto& [n, step] : {std::pair{coarse, 2 * half_width / (coarse - 1)}, std::pair{fine, fh}}) {
    const auto a = axis(n, step);
    for (double x : a) {
      if (dim == 1) p.emplace_back(x, 0.0);
      else
        for (double y : a) p.emplace_back(x, y);
    }
  }
  return p;
}

MollifyAudit mollify_bounds_audit(const FunctionField& f, double beta, const std::vector<double>& eps_list,
                                  const ProbeBox& box) {
  if (!(beta > 0 && beta < 1)) throw InvalidArgument("mollify_bounds_audit: beta must lie in (0,1)");
  if (f.regularity < beta) throw InvalidArgument("mollify_bounds_audit: field is less regular than beta");
  MollifyAudit out;
  out.holder_norm = holder_norm(f, beta, box).total;
  out.constants = Mollifier(f.dim).moment_constants(beta);
  out.c1 = *std::max_element(out.constants.begin(), out.constants.end());
  const auto probes = mollify_probes(f.dim, 0.5 * box.half_width);
  out.pass = true;
  for (double eps : eps_list) {
    const FunctionField fe = mollify(f, eps);
    MollifyRow row{eps, 0, 0, 0};
    std::vector<std::array<double, 3>> part(probes.size());
    parallel_chunks(probes.size(), 32, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t k = b; k < e; ++k) {
        const Point& x = probes[k];
        const Point g = fe.grad(x);
        const Hessian H = fe.hess(x);
        part[k] = {std::abs(f(x) - fe(x)), g.head(f.dim).cwiseAbs().maxCoeff(),
                   H.topLeftCorner(f.dim, f.dim).cwiseAbs().maxCoeff()};
      }
    });
    for (const auto& q : part) {
      row.c0 = std::max(row.c0, q[0]);
      row.c1 = std::max(row.c1, q[1]);
      row.c2 = std::max(row.c2, q[2]);
    }
    row.c0 /= std::pow(eps, beta);
    row.c1 *= std::pow(eps, 1 - beta);
    row.c2 *= std::pow(eps, 2 - beta);
    const double tol = 1 + 1e-9;
    if (row.c0 > out.constants[0] * out.holder_norm * tol || row.c1 > out.constants[1] * out.holder_norm * tol ||
        row.c2 > out.constants[2] * out.holder_norm * tol)
      out.pass = false;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace slk
