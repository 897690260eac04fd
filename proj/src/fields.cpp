#include "slk/fields.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace slk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g(t) = exp(-1/t) for t > 0 and its first two derivatives.
double g0(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
double g1(double t) { return t > 0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
double g2(double t) { return t > 0 ? std::exp(-1.0 / t) * (1.0 / (t * t * t * t) - 2.0 / (t * t * t)) : 0.0; }

double norm_d(const Point& x, int dim) { return dim == 1 ? std::abs(x(0)) : x.norm(); }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Radial profile psi(r) with psi'(r), psi''(r) lifted to gradient and Hessian.
Point radial_grad(const Point& x, int dim, double dpsi) {
  const double r = norm_d(x, dim);
  if (r == 0.0 || dpsi == 0.0) return Point::Zero();
  if (dim == 1) return Point(dpsi * (x(0) > 0 ? 1.0 : -1.0), 0.0);
  return dpsi * x / r;
}

Hessian radial_hess(const Point& x, int dim, double dpsi, double d2psi) {
  Hessian H = Hessian::Zero();
  const double r = norm_d(x, dim);
  if (dim == 1) {
    H(0, 0) = d2psi;
    return H;
  }
  if (r == 0.0) return d2psi * Hessian::Identity();
  const Point e = x / r;
  H = d2psi * e * e.transpose() + (dpsi / r) * (Hessian::Identity() - e * e.transpose());
  return H;
}

}  // namespace

double smooth_step(double t, int derivative) {
  if (t <= 0.0 || t >= 1.0) return (derivative == 0 && t >= 1.0) ? 1.0 : 0.0;
  const double a = g0(t), b = g0(1 - t), D = a + b;
  if (derivative == 0) return a / D;
  const double a1 = g1(t), b1 = g1(1 - t);
  const double N = a1 * b + a * b1;
  if (derivative == 1) return N / (D * D);
  if (derivative == 2) {
    const double dN = g2(t) * b - a * g2(1 - t);
    const double dD = a1 - b1;
    return dN / (D * D) - 2.0 * N * dD / (D * D * D);
  }
  throw InvalidArgument("smooth_step: derivative order must be 0, 1 or 2");
}

CutoffFunction::CutoffFunction(int dim, Point center, double radius)
    : dim_(dim), center_(std::move(center)), radius_(radius) {
  if (dim != 1 && dim != 2) throw InvalidArgument("CutoffFunction: dim must be 1 or 2");
  if (!(radius > 0)) throw InvalidArgument("CutoffFunction: radius must be positive");
  if (dim == 1) center_(1) = 0.0;
}

double CutoffFunction::operator()(const Point& x) const {
  const double s = norm_d(x - center_, dim_) / radius_;
  return smooth_step(2.0 - s);
}

Point CutoffFunction::gradient(const Point& x) const {
  const Point y = x - center_;
  const double s = norm_d(y, dim_) / radius_;
  return radial_grad(y, dim_, -smooth_step(2.0 - s, 1) / radius_);
}

Hessian CutoffFunction::hessian(const Point& x) const {
  const Point y = x - center_;
  const double s = norm_d(y, dim_) / radius_;
  const double d1 = -smooth_step(2.0 - s, 1) / radius_;
  const double d2 = smooth_step(2.0 - s, 2) / (radius_ * radius_);
  return radial_hess(y, dim_, d1, d2);
}

FunctionField CutoffFunction::field() const {
  auto self = std::make_shared<CutoffFunction>(*this);
  FunctionField f;
  f.id = "cutoff-r" + fmt(radius_);
  f.dim = dim_;
  f.eval = [self](const Point& x) { return (*self)(x); };
  f.grad = [self](const Point& x) { return self->gradient(x); };
  f.hess = [self](const Point& x) { return self->hessian(x); };
  f.decay = Decay::compact(2.0 * radius_ + norm_d(center_, dim_));
  f.far_value = 0.0;
  return f;
}

FunctionField constant_field(int dim, double c) {
  FunctionField f;
  f.id = "const-" + fmt(c);
  f.dim = dim;
  f.eval = [c](const Point&) { return c; };
  f.grad = [](const Point&) { return Point::Zero().eval(); };
  f.hess = [](const Point&) { return Hessian::Zero().eval(); };
  f.decay = Decay::bounded();
  f.far_value = c;
  return f;
}

FunctionField wave(int dim, double k) {
  FunctionField f;
  f.id = "wave-" + fmt(k);
  f.dim = dim;
  f.eval = [k](const Point& x) { return std::cos(k * x(0)); };
  f.grad = [k](const Point& x) { return Point(-k * std::sin(k * x(0)), 0.0); };
  f.hess = [k](const Point& x) {
    Hessian H = Hessian::Zero();
    H(0, 0) = -k * k * std::cos(k * x(0));
    return H;
  };
  f.decay = Decay::bounded();
  f.far_value = 0.0;
  f.period = 2.0 * M_PI / k;
  return f;
}

FunctionField gaussian(int dim, double s, Point center) {
  if (dim == 1) center(1) = 0.0;
  FunctionField f;
  f.id = "gauss-" + fmt(s);
  f.dim = dim;
  const double is2 = 1.0 / (s * s);
  f.eval = [=](const Point& x) { return std::exp(-(x - center).squaredNorm() * is2); };
  f.grad = [=](const Point& x) {
    const Point y = x - center;
    return Point(-2.0 * is2 * std::exp(-y.squaredNorm() * is2) * y);
  };
  f.hess = [=](const Point& x) {
    const Point y = x - center;
    const double e = std::exp(-y.squaredNorm() * is2);
    Hessian H = e * (4.0 * is2 * is2 * y * y.transpose() - 2.0 * is2 * Hessian::Identity());
    if (dim == 1) H(1, 1) = 0.0;
    return H;
  };
  f.decay = Decay::power(kInf);
  f.far_value = 0.0;
  return f;
}

FunctionField bump(int dim, double r) {
  FunctionField f = CutoffFunction(dim, Point::Zero(), r).field();
  f.id = "bump-r" + fmt(r);
  return f;
}

FunctionField cusp(int dim, double gamma, Point x0, double M) {
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("cusp: gamma must lie in (0,1)");
  if (dim == 1) x0(1) = 0.0;
  FunctionField f;
  f.id = "cusp-" + fmt(gamma);
  f.dim = dim;
  f.eval = [=](const Point& x) { return std::min(std::pow(norm_d(x - x0, dim), gamma), M); };
  f.regularity = gamma;
  f.decay = Decay::bounded();
  f.far_value = M;
  return f;
}

FunctionField step(int dim) {
  FunctionField f;
  f.id = "step";
  f.dim = dim;
  f.eval = [](const Point& x) { return std::tanh(x(0)); };
  f.grad = [](const Point& x) {
    const double c = 1.0 / std::cosh(x(0));
    return Point(c * c, 0.0);
  };
  f.hess = [](const Point& x) {
    const double c = 1.0 / std::cosh(x(0));
    Hessian H = Hessian::Zero();
    H(0, 0) = -2.0 * std::tanh(x(0)) * c * c;
    return H;
  };
  f.decay = Decay::bounded();
  f.far_value = 0.0;
  return f;
}

FunctionField quad_window(int dim) {
  const FunctionField sq = [dim] {
    FunctionField q;
    q.id = "sq";
    q.dim = dim;
    q.eval = [dim](const Point& x) { return dim == 1 ? x(0) * x(0) : x.squaredNorm(); };
    q.grad = [dim](const Point& x) { return Point(2.0 * x(0), dim == 1 ? 0.0 : 2.0 * x(1)); };
    q.hess = [dim](const Point&) {
      Hessian H = 2.0 * Hessian::Identity();
      if (dim == 1) H(1, 1) = 0.0;
      return H;
    };
    return q;
  }();
  FunctionField f = product(sq, bump(dim, 2.0));
  f.id = "quad-window";
  return f;
}

FunctionField sum(const FunctionField& f, const FunctionField& g) {
  if (f.dim != g.dim) throw InvalidArgument("sum: dimension mismatch");
  FunctionField s;
  s.id = f.id + "+" + g.id;
  s.dim = f.dim;
  auto fe = f.eval, ge = g.eval;
  s.eval = [fe, ge](const Point& x) { return fe(x) + ge(x); };
  if (f.grad && g.grad) {
    auto fg = f.grad, gg = g.grad;
    s.grad = [fg, gg](const Point& x) { return Point(fg(x) + gg(x)); };
  }
  if (f.hess && g.hess) {
    auto fh = f.hess, gh = g.hess;
    s.hess = [fh, gh](const Point& x) { return Hessian(fh(x) + gh(x)); };
  }
  s.regularity = std::min(f.regularity, g.regularity);
  const bool fc = f.decay.kind == Decay::Kind::compact_support;
  const bool gc = g.decay.kind == Decay::Kind::compact_support;
  if (fc && gc) s.decay = Decay::compact(std::max(f.decay.param, g.decay.param));
  else if (f.decay.kind == Decay::Kind::bounded || g.decay.kind == Decay::Kind::bounded) s.decay = Decay::bounded();
  else s.decay = Decay::power(std::min(fc ? kInf : f.decay.param, gc ? kInf : g.decay.param));
  s.far_value = f.far_value + g.far_value;
  if (f.period && g.period && *f.period == *g.period) s.period = f.period;
  return s;
}

FunctionField product(const FunctionField& f, const FunctionField& g) {
  if (f.dim != g.dim) throw InvalidArgument("product: dimension mismatch");
  FunctionField p;
  p.id = f.id + "*" + g.id;
  p.dim = f.dim;
  auto fe = f.eval, ge = g.eval;
  p.eval = [fe, ge](const Point& x) { return fe(x) * ge(x); };
  if (f.grad && g.grad) {
    auto fg = f.grad, gg = g.grad;
    p.grad = [=](const Point& x) { return Point(fg(x) * ge(x) + fe(x) * gg(x)); };
    if (f.hess && g.hess) {
      auto fh = f.hess, gh = g.hess;
      p.hess = [=](const Point& x) {
        const Point a = fg(x), b = gg(x);
        return Hessian(fh(x) * ge(x) + fe(x) * gh(x) + a * b.transpose() + b * a.transpose());
      };
    }
  }
  p.regularity = std::min(f.regularity, g.regularity);
  const bool fc = f.decay.kind == Decay::Kind::compact_support;
  const bool gc = g.decay.kind == Decay::Kind::compact_support;
  if (fc && gc) p.decay = Decay::compact(std::min(f.decay.param, g.decay.param));
  else if (fc) p.decay = f.decay;
  else if (gc) p.decay = g.decay;
  else if (f.decay.kind == Decay::Kind::power_decay || g.decay.kind == Decay::Kind::power_decay)
    p.decay = Decay::power(std::max(f.decay.kind == Decay::Kind::power_decay ? f.decay.param : 0.0,
                                    g.decay.kind == Decay::Kind::power_decay ? g.decay.param : 0.0));
  else p.decay = Decay::bounded();
  p.far_value = (fc || gc) ? 0.0 : f.far_value * g.far_value;
  if (f.period && g.period && *f.period == *g.period) p.period = f.period;
  return p;
}

FunctionField scale(const FunctionField& f, double c) {
  FunctionField s = f;
  s.id = fmt(c) + "*" + f.id;
  auto fe = f.eval;
  s.eval = [fe, c](const Point& x) { return c * fe(x); };
  if (f.grad) {
    auto fg = f.grad;
    s.grad = [fg, c](const Point& x) { return Point(c * fg(x)); };
  }
  if (f.hess) {
    auto fh = f.hess;
    s.hess = [fh, c](const Point& x) { return Hessian(c * fh(x)); };
  }
  s.far_value = c * f.far_value;
  return s;
}

FunctionField translate(const FunctionField& f, const Point& a) {
  if (!a.allFinite()) throw InvalidArgument("translate: offset must be finite");
  Point b = a;
  if (f.dim == 1) b(1) = 0.0;
  FunctionField t = f;
  t.id = "translate(" + f.id + ")";
  auto fe = f.eval;
  t.eval = [fe, b](const Point& x) { return fe(x + b); };
  if (f.grad) {
    auto fg = f.grad;
    t.grad = [fg, b](const Point& x) { return fg(x + b); };
  }
  if (f.hess) {
    auto fh = f.hess;
    t.hess = [fh, b](const Point& x) { return fh(x + b); };
  }
  if (f.decay.kind == Decay::Kind::compact_support) t.decay = Decay::compact(f.decay.param + b.norm());
  return t;
}

std::vector<FunctionField> corpus(int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("corpus: dim must be 1 or 2");
  std::vector<FunctionField> c;
  c.push_back(constant_field(dim, 1.0));
  for (double k : {1.0, 2.0, 4.0}) c.push_back(wave(dim, k));
  c.push_back(gaussian(dim, 1.0));
  for (double r : {1.0, 2.0, 4.0, 8.0}) c.push_back(bump(dim, r));
  for (double g : {0.3, 0.5, 0.7}) c.push_back(cusp(dim, g));
  c.push_back(step(dim));
  c.push_back(quad_window(dim));
  c.push_back(product(cusp(dim, 0.5), bump(dim, 2.0)));
  c.push_back(product(wave(dim, 1.0), gaussian(dim, 1.0)));
  c.push_back(sum(wave(dim, 2.0), bump(dim, 1.0)));
  return c;
}

FunctionField corpus_member(const std::string& id, int dim) {
  for (auto& f : corpus(dim))
    if (f.id == id) return f;
  throw InvalidArgument("unknown corpus member: " + id);
}

SampledField sample(const FunctionField& f, const GridSpec& grid) {
  if (f.dim != grid.dim()) throw InvalidArgument("sample: dimension mismatch");
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = f.eval(grid.point(i));
    if (!std::isfinite(y)) throw NumericalFailure("sample: non-finite value in " + f.id);
    v[static_cast<Eigen::Index>(i)] = y;
  }
  return SampledField(grid, std::move(v));
}

SampledField sample_centered(const FunctionField& f, const GridSpec& grid) {
  const double c = -0.5 * grid.period();
  return sample(translate(f, Point(c, grid.dim() == 1 ? 0.0 : c)), grid);
}

}  // namespace slk
