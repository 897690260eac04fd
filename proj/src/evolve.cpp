#include "slk/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "slk/parallel.hpp"
#include "slk/quadrature.hpp"
#include "slk/stable.hpp"

namespace slk {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t point_stream(const Point& x) {
  std::uint64_t a, b;
  const double x0 = x(0), x1 = x(1);
  std::memcpy(&a, &x0, sizeof a);
  std::memcpy(&b, &x1, sizeof b);
  return splitmix64(a ^ splitmix64(b));
}

// Hermite interpolant of q^(j)(1, .) in w = asinh(z) on the kernel table nodes.
class Profile {
 public:
  explicit Profile(double alpha) : t_(stable_kernel_table(alpha)), c_(stable_tail_constant(alpha, 1)), alpha_(alpha) {
    w_.reserve(t_.z.size());
    for (double z : t_.z) w_.push_back(std::asinh(z));
    mass_ = 0.0;
    for (std::size_t n = 0; n < t_.z.size(); ++n) mass_ += t_.weight[n] * t_.q[0][n];
  }

  double operator()(int j, double y) const {
    const double w = std::asinh(y);
    if (w <= w_.front() || w >= w_.back()) return tail(j, y);
    const std::size_t i = std::upper_bound(w_.begin(), w_.end(), w) - w_.begin() - 1;
    const double h = w_[i + 1] - w_[i], s = (w - w_[i]) / h;
    const double d0 = t_.q[j + 1][i] * std::cosh(w_[i]), d1 = t_.q[j + 1][i + 1] * std::cosh(w_[i + 1]);
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * t_.q[j][i] + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * t_.q[j][i + 1] +
           (s3 - s2) * h * d1;
  }

  double tail(int j, double y) const {
    const double a = std::abs(y);
    double v = c_ * std::pow(a, -1.0 - alpha_);
    for (int i = 0; i < j; ++i) v *= -(1.0 + alpha_ + i) / a;
    return (j % 2 && y < 0) ? -v : v;
  }

  const StableKernelTable& table() const { return t_; }
  double mass() const { return mass_; }
  double tail_constant() const { return c_; }

 private:
  const StableKernelTable& t_;
  double c_, alpha_, mass_;
  std::vector<double> w_;
};

const Profile& profile(double alpha) {
  static std::map<double, std::unique_ptr<Profile>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto& p = cache[alpha];
  if (!p) p = std::make_unique<Profile>(alpha);
  return *p;
}

struct TimeRule {
  std::vector<double> s, w;  // w includes ds = s du and e^{-s}
};

TimeRule time_rule(double s_min, double s_max, double pw) {
  TimeRule r;
  const auto& gl = gauss_legendre(8);
  const double a = std::log(s_min), b = std::log(s_max);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / pw)));
  const double du = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < gl.size(); ++i) {
      const double u = a + du * (p + 0.5 * (gl.nodes[i] + 1));
      const double s = std::exp(u);
      r.s.push_back(s);
      r.w.push_back(0.5 * du * gl.weights[i] * s * std::exp(-s));
    }
  return r;
}

double profile_at(const Profile& pr, const TimeRule& tr, double alpha, double z, int j = 0) {
  double g = 0.0;
  for (std::size_t n = 0; n < tr.s.size(); ++n) {
    const double sc = std::pow(tr.s[n], -1.0 / alpha);
    g += tr.w[n] * std::pow(sc, 1 + j) * pr(j, z * sc);
  }
  return g;
}

// Nodes z = +-e^v for R f(x) = lambda^{-1} [sum w_n f(x - l z_n) + point f(x) + far f_far].
struct ResolventRule {
  std::vector<double> z, w;
  double point = 0.0;
  double far = 0.0;
};

const ResolventRule& resolvent_rule(double alpha, double s_min, double s_max, double pw) {
  static std::map<std::array<double, 4>, std::unique_ptr<ResolventRule>> cache;
  static std::mutex m;
  {
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find({alpha, s_min, s_max, pw});
    if (it != cache.end()) return *it->second;
  }
  const Profile& pr = profile(alpha);
  const TimeRule tr = time_rule(s_min, s_max, pw);
  auto r = std::make_unique<ResolventRule>();
  const auto& gl = gauss_legendre(4);
  const double v0 = -50.0, v1 = std::log(1e6), dv = 0.1;
  const int panels = static_cast<int>(std::ceil((v1 - v0) / dv));
  const double h = (v1 - v0) / panels;
  std::vector<double> zs, ws;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < gl.size(); ++i) {
      const double z = std::exp(v0 + h * (p + 0.5 * (gl.nodes[i] + 1)));
      zs.push_back(z);
      ws.push_back(0.5 * h * gl.weights[i] * z);
    }
  std::vector<double> g(zs.size());
  parallel_chunks(zs.size(), 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t n = b; n < e; ++n) g[n] = profile_at(pr, tr, alpha, zs[n]);
  });
  double inside = 0.0, merged = 0.0;
  for (std::size_t n = 0; n < zs.size(); ++n) {
    // Offsets this small do not change f in double precision.
    if (zs[n] < 1e-10) {
      merged += 2 * ws[n] * g[n];
      continue;
    }
    for (double sg : {1.0, -1.0}) {
      r->z.push_back(sg * zs[n]);
      r->w.push_back(ws[n] * g[n]);
    }
    inside += 2 * ws[n] * g[n];
  }
  double tail_time = 0.0;
  for (std::size_t n = 0; n < tr.s.size(); ++n) tail_time += tr.w[n] * tr.s[n];
  r->far = 2 * pr.tail_constant() * tail_time * std::pow(1e6, -alpha) / alpha + std::exp(-s_max);
  const double middle = std::exp(-s_min) - std::exp(-s_max);
  r->point = (1 - std::exp(-s_min)) + merged + (middle - inside - merged - (r->far - std::exp(-s_max)));
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{alpha, s_min, s_max, pw}];
  if (!slot) slot = std::move(r);
  return *slot;
}

double exact_coefficient(const KernelSpec& k) {
  if (k.terms.size() != 1 || !k.terms[0].a0_constant) return -1.0;
  return k.terms[0].w(Point::Zero()) * *k.terms[0].a0_constant;
}

double stable_sum(const Profile& pr, double s, const FunctionField& f, const Point& x, int j) {
  const auto& t = pr.table();
  double acc = 0.0, mass = 0.0;
  for (std::size_t n = 0; n < t.z.size(); ++n) {
    const double wq = t.weight[n] * t.q[j][n];
    acc += wq * f(x - Point(s * t.z[n], 0.0));
    mass += wq;
  }
  if (j == 0) return acc + f.far_value * (1.0 - mass);
  return (acc - f.far_value * mass) * std::pow(s, -j);
}

}  // namespace

std::string to_string(SemigroupMode m) { return m == SemigroupMode::exact_stable ? "exact_stable" : "split_lower"; }

SemigroupSpec SemigroupSpec::for_kernel(const KernelSpec& k) {
  SemigroupSpec sg;
  sg.kernel = k;
  sg.mode = exact_coefficient(k) > 0 ? SemigroupMode::exact_stable : SemigroupMode::split_lower;
  validate(sg);
  return sg;
}

double SemigroupSpec::stable_time(double t) const {
  const double a = mode == SemigroupMode::exact_stable ? exact_coefficient(kernel) : kernel.kappa1;
  return a * kappa(1, kernel.alpha) * t;
}

void validate(const SemigroupSpec& sg) {
  check_alpha(sg.kernel.alpha);
  if (sg.kernel.dim != 1) throw InvalidArgument("semigroup: only d = 1 is supported");
  if (!sg.kernel.x_independent) throw InvalidArgument("semigroup: kernel must be x-independent");
  if (sg.mode == SemigroupMode::exact_stable && !(exact_coefficient(sg.kernel) > 0))
    throw InvalidArgument("semigroup: exact_stable needs a constant positive A0");
  if (sg.mode == SemigroupMode::split_lower) {
    if (!(sg.kernel.kappa1 > 0) || sg.kernel.kappa2 < sg.kernel.kappa1)
      throw InvalidArgument("semigroup: split_lower needs 0 < kappa1 <= kappa2");
    if (sg.mc_samples < 2 || !(sg.eps_cut > 0)) throw InvalidArgument("semigroup: invalid Monte-Carlo settings");
  }
}

SemigroupValue semigroup_apply_detailed(const SemigroupSpec& sg, double t, const FunctionField& f, const Point& x,
                                        std::uint64_t stream) {
  validate(sg);
  if (!(t > 0)) throw InvalidArgument("semigroup_apply: t must be positive");
  const double alpha = sg.kernel.alpha;
  const Profile& pr = profile(alpha);
  const double s = std::pow(sg.stable_time(t), 1.0 / alpha);
  if (sg.mode == SemigroupMode::exact_stable) return {stable_sum(pr, s, f, x, 0), 0.0};

  // Residual kernel (A0 - kappa1)|h|^{-1-alpha} on |h| > eps by thinning a Pareto proposal.
  const double k1 = sg.kernel.kappa1, k2 = sg.kernel.kappa2;
  const double rate = (k2 - k1) * 2 * std::pow(sg.eps_cut, -alpha) / alpha;
  std::mt19937_64 rng(splitmix64(sg.seed ^ splitmix64(stream)));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::poisson_distribution<long> N(rate * t);
  const auto& A = sg.kernel.A;
  double sum = 0.0, sum2 = 0.0;
  for (int m = 0; m < sg.mc_samples; ++m) {
    double J = 0.0;
    const long n = k2 > k1 ? N(rng) : 0;
    for (long i = 0; i < n; ++i) {
      const double r = sg.eps_cut * std::pow(1.0 - U(rng), -1.0 / alpha);
      const double h = U(rng) < 0.5 ? r : -r;
      if (U(rng) * (k2 - k1) < A(Point::Zero(), Point(h, 0)) - k1) J += h;
    }
    const double v = stable_sum(pr, s, f, x + Point(J, 0), 0);
    sum += v;
    sum2 += v * v;
  }
  const double M = sg.mc_samples;
  const double mean = sum / M;
  const double se = std::sqrt(std::max(0.0, sum2 / M - mean * mean) / (M - 1));
  if (se > sg.mc_tolerance) throw NumericalFailure("semigroup_apply: Monte-Carlo standard error above tolerance");
  return {mean, se};
}

double semigroup_apply(const SemigroupSpec& sg, double t, const FunctionField& f, const Point& x) {
  return semigroup_apply_detailed(sg, t, f, x, point_stream(x)).value;
}

double semigroup_derivative(const SemigroupSpec& sg, double t, const FunctionField& f, const Point& x, int k) {
  validate(sg);
  if (sg.mode != SemigroupMode::exact_stable) throw InvalidArgument("semigroup_derivative: exact_stable only");
  if (!(t > 0)) throw InvalidArgument("semigroup_derivative: t must be positive");
  if (k < 0 || k > 3) throw InvalidArgument("semigroup_derivative: order must lie in 0..3");
  const double s = std::pow(sg.stable_time(t), 1.0 / sg.kernel.alpha);
  return stable_sum(profile(sg.kernel.alpha), s, f, x, k);
}

FunctionField semigroup_field(const SemigroupSpec& sg, double t, const FunctionField& f) {
  validate(sg);
  FunctionField g;
  g.id = "P" + std::to_string(t).substr(0, 5) + "(" + f.id + ")";
  g.dim = 1;
  g.eval = [sg, t, f](const Point& x) { return semigroup_apply(sg, t, f, x); };
  if (sg.mode == SemigroupMode::exact_stable) {
    g.grad = [sg, t, f](const Point& x) { return Point(semigroup_derivative(sg, t, f, x, 1), 0); };
    g.hess = [sg, t, f](const Point& x) {
      Hessian H = Hessian::Zero();
      H(0, 0) = semigroup_derivative(sg, t, f, x, 2);
      return H;
    };
    g.regularity = std::numeric_limits<double>::infinity();
  } else {
    g.regularity = f.regularity;
  }
  g.decay = f.decay;
  g.far_value = f.far_value;
  g.period = f.period;
  return g;
}

DecayAudit derivative_decay_audit(const SemigroupSpec& sg, const std::vector<double>& t_list, const FunctionField& f) {
  validate(sg);
  const double alpha = sg.kernel.alpha;
  const auto& t = profile(alpha).table();
  DecayAudit out;
  std::vector<Point> xs;
  for (int i = -128; i <= 128; ++i) xs.emplace_back(i / 16.0, 0.0);
  out.f_sup = sup_norm(f, xs);
  const double unit = sg.stable_time(1.0);
  for (int k : {1, 2}) {
    double l1 = 0.0;
    for (std::size_t n = 0; n < t.z.size(); ++n) l1 += t.weight[n] * std::abs(t.q[k][n]);
    (k == 1 ? out.bound1 : out.bound2) = std::pow(unit, -k / alpha) * l1;
  }
  out.pass = true;
  for (double tt : t_list) {
    DecayRow row;
    row.t = tt;
    std::vector<double> d1(xs.size()), d2(xs.size());
    parallel_chunks(xs.size(), 16, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        d1[i] = std::abs(semigroup_derivative(sg, tt, f, xs[i], 1));
        d2[i] = std::abs(semigroup_derivative(sg, tt, f, xs[i], 2));
      }
    });
    row.d1 = *std::max_element(d1.begin(), d1.end()) * std::pow(tt, 1 / alpha);
    row.d2 = *std::max_element(d2.begin(), d2.end()) * std::pow(tt, 2 / alpha);
    out.rows.push_back(row);
    if (out.f_sup > 0) out.c1 = std::max(out.c1, std::max(row.d1, row.d2) / out.f_sup);
    const double slack = 1e-6 * out.f_sup + 1e-12;
    out.pass = out.pass && std::isfinite(row.d1) && std::isfinite(row.d2) &&
               row.d1 <= out.bound1 * out.f_sup + slack && row.d2 <= out.bound2 * out.f_sup + slack;
  }
  return out;
}

void validate(const PotentialSpec& ps) {
  if (!(ps.lambda > 0)) throw InvalidArgument("PotentialSpec: lambda must be positive");
  if (!(ps.t_min_factor > 0 && ps.t_min_factor < ps.t_max_factor) || !(ps.panel_width > 0))
    throw InvalidArgument("PotentialSpec: invalid time window");
}

double resolvent_profile(double alpha, double z, double s_min, double s_max, double panel_width) {
  check_alpha(alpha);
  return profile_at(profile(alpha), time_rule(s_min, s_max, panel_width), alpha, z);
}

namespace {

double resolvent_scale(const PotentialSpec& ps, const SemigroupSpec& sg) {
  validate(ps);
  validate(sg);
  if (sg.mode != SemigroupMode::exact_stable) throw InvalidArgument("resolvent: exact_stable semigroups only");
  return std::pow(sg.stable_time(1.0) / ps.lambda, 1.0 / sg.kernel.alpha);
}

template <typename Eval>
double resolvent_sum(const ResolventRule& r, double l, double lambda, double far, const Point& x, Eval&& f) {
  double acc = r.point * f(x) + r.far * far;
  for (std::size_t n = 0; n < r.z.size(); ++n) acc += r.w[n] * f(x - Point(l * r.z[n], 0.0));
  return acc / lambda;
}

}  // namespace

double resolvent_apply(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f, const Point& x) {
  const double l = resolvent_scale(ps, sg);
  const auto& r = resolvent_rule(sg.kernel.alpha, ps.t_min_factor, ps.t_max_factor, ps.panel_width);
  return resolvent_sum(r, l, ps.lambda, f.far_value, x, [&](const Point& y) { return f(y); });
}

FunctionField resolvent_field(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f) {
  const double l = resolvent_scale(ps, sg);
  const auto& r = resolvent_rule(sg.kernel.alpha, ps.t_min_factor, ps.t_max_factor, ps.panel_width);
  const double lam = ps.lambda;
  FunctionField g;
  g.id = "R(" + f.id + ")";
  g.dim = 1;
  g.eval = [&r, l, lam, f](const Point& x) { return resolvent_sum(r, l, lam, f.far_value, x, f.eval); };
  if (f.grad)
    g.grad = [&r, l, lam, f](const Point& x) {
      return Point(resolvent_sum(r, l, lam, 0.0, x, [&](const Point& y) { return f.grad(y)(0); }), 0.0);
    };
  if (f.hess)
    g.hess = [&r, l, lam, f](const Point& x) {
      Hessian H = Hessian::Zero();
      H(0, 0) = resolvent_sum(r, l, lam, 0.0, x, [&](const Point& y) { return f.hess(y)(0, 0); });
      return H;
    };
  g.regularity = f.regularity + sg.kernel.alpha;
  g.decay = f.decay;
  g.far_value = f.far_value / lam;
  g.period = f.period;
  return g;
}

FunctionField LatticeResolvent::field(const std::string& id) const {
  FunctionField g;
  g.id = id;
  g.dim = 1;
  const double h = box.spacing;
  const long half = (box.points_per_axis() - 1) / 2;
  auto index = [h, half](const Point& x) {
    const double p = x(0) / h + half;
    const long i = std::lround(p);
    if (std::abs(p - i) > 1e-6 || i < 0 || i > 2 * half) throw InvalidArgument("lattice field evaluated off lattice");
    return static_cast<std::size_t>(i);
  };
  const auto v = value;
  g.eval = [v, index](const Point& x) { return v[index(x)]; };
  if (!gradient.empty()) {
    const auto d = gradient;
    g.grad = [d, index](const Point& x) { return Point(d[index(x)], 0.0); };
  }
  return g;
}

LatticeResolvent resolvent_lattice(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f,
                                   const ProbeBox& box, bool with_gradient) {
  const double l = resolvent_scale(ps, sg);
  if (box.dim != 1 || f.dim != 1) throw InvalidArgument("resolvent_lattice: d = 1 only");
  const double alpha = sg.kernel.alpha, lam = ps.lambda;
  const double h = box.spacing;
  const long half = (box.points_per_axis() - 1) / 2;
  const long n = 2 * half + 1;
  const double Y = 64.0;
  const long J = static_cast<long>(std::ceil(Y / h));

  // Cell masses m_j and first moments mu_j of the continuous kernel on [jh, (j+1)h], j >= 0.
  const Profile& pr = profile(alpha);
  const TimeRule tr = time_rule(ps.t_min_factor, ps.t_max_factor, ps.panel_width);
  auto kern = [&](double y) { return profile_at(pr, tr, alpha, y / l) / (lam * l); };
  std::vector<double> m(J), mu(J);
  const auto& gl = gauss_legendre(8);
  parallel_chunks(J, 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t j = b; j < e; ++j) {
      double mm = 0.0, mo = 0.0;
      const double a = j * h;
      if (j == 0) {
        const double v0 = -60.0, dv = 0.25;
        for (int p = 0; p < 240; ++p)
          for (int i = 0; i < gl.size(); ++i) {
            const double y = h * std::exp(v0 + dv * (p + 0.5 * (gl.nodes[i] + 1)));
            const double w = 0.5 * dv * gl.weights[i] * y * kern(y);
            mm += w;
            mo += w * y / h;
          }
      } else {
        for (int i = 0; i < gl.size(); ++i) {
          const double y = a + 0.5 * h * (gl.nodes[i] + 1);
          const double w = 0.5 * h * gl.weights[i] * kern(y);
          mm += w;
          mo += w * (y - a) / h;
        }
      }
      m[j] = mm;
      mu[j] = mo;
    }
  });
  // Hat weights omega[j + J] for offsets y = j h, j in [-J, J]; cells mirror for y < 0.
  std::vector<double> omega(2 * J + 1, 0.0);
  for (long j = 0; j < J; ++j) {
    omega[J + j] += m[j] - mu[j];
    omega[J + j + 1] += mu[j];
    omega[J - j] += m[j] - mu[j];
    omega[J - j - 1] += mu[j];
  }
  const double point = (1 - std::exp(-ps.t_min_factor)) / lam;
  omega[J] += point;
  double total = 0.0;
  for (double w : omega) total += w;
  const double far = 1.0 / lam - total;

  // f on the extended lattice: F[k] = f(x_{k - J}) with x_i = (i - half) h.
  std::vector<double> F(n + 2 * J);
  parallel_chunks(F.size(), 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t k = b; k < e; ++k) F[k] = f(Point((static_cast<long>(k) - J - half) * h, 0.0));
  });
  LatticeResolvent out;
  out.box = box;
  out.value.assign(n, 0.0);
  if (with_gradient) out.gradient.assign(n, 0.0);
  parallel_chunks(n, 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const long c = static_cast<long>(i) + J;  // index of x_i in F
      double v = far * f.far_value;
      for (long j = -J; j <= J; ++j) v += omega[J + j] * F[c - j];
      out.value[i] = v;
      if (with_gradient) {
        // Slopes of the interpolant on [x_i - (j+1)h, x_i - jh], mirrored for negative offsets.
        double g = 0.0;
        for (long j = 0; j < J; ++j) {
          g += m[j] * (F[c - j] - F[c - j - 1]) / h;
          g += m[j] * (F[c + j + 1] - F[c + j]) / h;
        }
        g += point * (F[c + 1] - F[c - 1]) / (2 * h);
        out.gradient[i] = g;
      }
    }
  });
  return out;
}

GainAudit holder_gain_audit(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f, double beta,
                            int grid) {
  const double alpha = sg.kernel.alpha, gamma = alpha + beta;
  check_exponent(beta);
  check_exponent(gamma);
  if (beta > 1) throw InvalidArgument("holder_gain_audit: beta must lie in (0,1)");
  if (grid < 16) throw InvalidArgument("holder_gain_audit: grid too coarse");
  GainAudit out;
  out.gamma = gamma;
  out.grid = grid;
  auto measure = [&](int N, HolderReport& rep, double& fn, double& us) {
    ProbeBox box;
    box.dim = 1;
    box.half_width = 4.0;
    box.spacing = 8.0 / N;
    const auto lr = resolvent_lattice(ps, sg, f, box, gamma > 2);
    const auto u = lr.field("R(" + f.id + ")");
    rep = holder_norm(u, gamma, box);
    fn = holder_norm(f, beta, box).total;
    us = rep.sup_norm;
    const double rhs = fn + us;
    return rhs > 0 ? rep.total / rhs : 0.0;
  };
  HolderReport fine;
  double fn2, us2;
  out.constant = measure(grid, out.report, out.f_norm, out.u_sup);
  out.constant_refined = measure(2 * grid, fine, fn2, us2);
  out.lhs = out.report.total;
  out.rhs = out.f_norm + out.u_sup;
  const double lo = std::min(out.constant, out.constant_refined), hi = std::max(out.constant, out.constant_refined);
  out.pass = std::isfinite(hi) && (hi == 0 || (lo > 0 && hi <= 1.5 * lo));
  return out;
}

}  // namespace slk
