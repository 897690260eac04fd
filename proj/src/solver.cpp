#include "slk/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/FFT>

#include "slk/parallel.hpp"
#include "slk/stable.hpp"

namespace slk {
class DiscreteOperator;
}

namespace {
// Matrix-free wrapper so BiCGSTAB can run on the FFT-applied operator.
class OperatorReplacement;
}  // namespace

namespace Eigen::internal {
template <>
struct traits<OperatorReplacement> : public traits<SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace {

class OperatorReplacement : public Eigen::EigenBase<OperatorReplacement> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit OperatorReplacement(const slk::DiscreteOperator& op) : op_(&op) {}
  Eigen::Index rows() const { return static_cast<Eigen::Index>(op_->grid().size()); }
  Eigen::Index cols() const { return rows(); }
  template <typename Rhs>
  Eigen::Product<OperatorReplacement, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<OperatorReplacement, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }
  const slk::DiscreteOperator& op() const { return *op_; }

 private:
  const slk::DiscreteOperator* op_;
};

}  // namespace

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<OperatorReplacement, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<OperatorReplacement, Rhs, generic_product_impl<OperatorReplacement, Rhs>> {
  using Scalar = typename Product<OperatorReplacement, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const OperatorReplacement& lhs, const Rhs& rhs, const Scalar& alpha) {
    dst.noalias() += alpha * lhs.op().apply(Eigen::VectorXd(rhs));
  }
};
}  // namespace Eigen::internal

namespace slk {
namespace {

using cvec = std::vector<std::complex<double>>;

double wave_number(int m, int n, double period) { return 2 * M_PI * (m <= n / 2 ? m : m - n) / period; }

// In-place complex DFT over the lattice (axis 1 fastest); inverse is scaled by 1/size.
void dft(cvec& a, const GridSpec& g, bool inverse) {
  static thread_local Eigen::FFT<double> fft;
  const int n = g.n();
  cvec in(n), out(n);
  auto pass = [&](auto index, int lines) {
    for (int l = 0; l < lines; ++l) {
      for (int i = 0; i < n; ++i) in[i] = a[index(l, i)];
      if (inverse) fft.inv(out, in);
      else fft.fwd(out, in);
      for (int i = 0; i < n; ++i) a[index(l, i)] = out[i];
    }
  };
  if (g.dim() == 1) {
    pass([](int, int i) { return i; }, 1);
  } else {
    pass([n](int l, int i) { return l * n + i; }, n);
    pass([n](int l, int i) { return i * n + l; }, n);
  }
}

}  // namespace

Point torus_point(const GridSpec& g, std::size_t i) {
  Point x = g.point(i);
  const double P = g.period();
  for (int a = 0; a < g.dim(); ++a)
    if (x(a) >= 0.5 * P) x(a) -= P;
  return x;
}

namespace {

Point torus_offset(const GridSpec& g, const Point& x, const Point& x0) {
  Point d = x - x0;
  const double P = g.period();
  for (int a = 0; a < g.dim(); ++a) d(a) -= P * std::round(d(a) / P);
  return d;
}

double sup(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double term_symbol(const KernelSpec& k, std::size_t term, const Point& wave, const QuadratureSpec& q) {
  const auto& t = k.terms.at(term);
  const double kn = k.dim == 1 ? std::abs(wave(0)) : wave.norm();
  if (t.a0_constant) return *t.a0_constant * kappa(k.dim, k.alpha) * std::pow(kn, k.alpha);
  if (k.dim != 1 || !t.a0_even) throw InvalidArgument("term_symbol: only constant or even 1-d profiles are supported");
  return symbol_even_1d(t.a0, k.alpha, kn, q);
}

SampledField sample_torus(const FunctionField& f, const GridSpec& grid) {
  if (f.dim != grid.dim()) throw InvalidArgument("sample_torus: dimension mismatch");
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(torus_point(grid, i));
  return SampledField(grid, v);
}

Eigen::VectorXd sample_torus(const std::function<double(const Point&)>& f, const GridSpec& grid) {
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(torus_point(grid, i));
  return v;
}

DiscreteOperator assemble(const KernelSpec& k, const GridSpec& grid, double lambda, const AssembleOptions& opt) {
  check_alpha(k.alpha);
  if (k.dim != grid.dim()) throw InvalidArgument("assemble: dimension mismatch");
  if (k.terms.empty()) throw InvalidArgument("assemble: kernel " + k.id + " has no separable form");
  if (k.x_period) {
    const double ratio = grid.period() / *k.x_period;
    if (std::abs(ratio - std::round(ratio)) > 1e-9) throw InvalidArgument("assemble: kernel is not periodic on the torus");
  }
  if (!opt.zero_order && !(lambda >= opt.lambda_floor))
    throw InvalidArgument("assemble: lambda below the floor without a zero-order term");
  if (opt.first_order && !(k.alpha > 1)) throw InvalidArgument("assemble: a first-order term requires alpha > 1");

  DiscreteOperator op(grid);
  op.alpha_ = k.alpha;
  op.lambda_ = lambda;
  const int n = grid.n();
  const std::size_t N = grid.size();
  for (std::size_t t = 0; t < k.terms.size(); ++t) {
    op.weights_.push_back(sample_torus(k.terms[t].w, grid));
    // psi depends on |k| only: evaluate once per distinct wave number.
    Eigen::VectorXd psi(N);
    std::vector<double> radial(n / 2 + 1);
    if (grid.dim() == 1) {
      parallel_chunks(radial.size(), 8, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t m = b; m < e; ++m)
          radial[m] = term_symbol(k, t, Point(wave_number(static_cast<int>(m), n, grid.period()), 0), opt.quad);
      });
      for (int m = 0; m < n; ++m) psi[m] = radial[std::abs(m <= n / 2 ? m : m - n)];
    } else {
      for (int m0 = 0; m0 < n; ++m0)
        for (int m1 = 0; m1 < n; ++m1)
          psi[m0 * n + m1] = term_symbol(k, t, Point(wave_number(m0, n, grid.period()), wave_number(m1, n, grid.period())),
                                         opt.quad);
    }
    op.symbols_.push_back(psi);
  }
  op.zero_order_ = opt.zero_order ? sample_torus(opt.zero_order, grid) : Eigen::VectorXd::Zero(N);
  if (opt.first_order) {
    for (int a = 0; a < grid.dim(); ++a) op.drift_.emplace_back(N);
    for (std::size_t i = 0; i < N; ++i) {
      const Point Q = opt.first_order(torus_point(grid, i));
      for (int a = 0; a < grid.dim(); ++a) op.drift_[a][i] = Q(a);
    }
  }
  if (N <= 4096) {
    op.dense_ = op.nonlocal_matrix();
    op.dense_.diagonal() += op.zero_order_ - Eigen::VectorXd::Constant(N, lambda);
    const double inv2h = 0.5 / grid.spacing();
    for (std::size_t a = 0; a < op.drift_.size(); ++a)
      for (std::size_t i = 0; i < N; ++i) {
        const long c0 = grid.coord(i, 0), c1 = grid.dim() == 2 ? grid.coord(i, 1) : 0;
        const std::size_t ip = a == 0 ? grid.index(c0 + 1, c1) : grid.index(c0, c1 + 1);
        const std::size_t im = a == 0 ? grid.index(c0 - 1, c1) : grid.index(c0, c1 - 1);
        op.dense_(i, ip) += op.drift_[a][i] * inv2h;
        op.dense_(i, im) -= op.drift_[a][i] * inv2h;
      }
  }
  return op;
}

const Eigen::MatrixXd& DiscreteOperator::matrix() const {
  if (!has_dense()) throw InvalidArgument("DiscreteOperator: no dense matrix above 4096 unknowns");
  return dense_;
}

Eigen::MatrixXd DiscreteOperator::nonlocal_matrix() const {
  const std::size_t N = grid_.size();
  const int n = grid_.n();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t t = 0; t < symbols_.size(); ++t) {
    cvec c(N);
    for (std::size_t m = 0; m < N; ++m) c[m] = -symbols_[t][m];
    dft(c, grid_, true);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t l = 0; l < N; ++l) {
        std::size_t d;
        if (grid_.dim() == 1) d = (i + N - l) % N;
        else {
          const std::size_t i0 = i / n, i1 = i % n, l0 = l / n, l1 = l % n;
          d = ((i0 + n - l0) % n) * n + (i1 + n - l1) % n;
        }
        M(i, l) += weights_[t][i] * c[d].real();
      }
  }
  return M;
}

Eigen::VectorXd DiscreteOperator::apply_nonlocal(const Eigen::VectorXd& u) const {
  const std::size_t N = grid_.size();
  cvec U(N);
  for (std::size_t i = 0; i < N; ++i) U[i] = u[i];
  dft(U, grid_, false);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  cvec V(N);
  for (std::size_t t = 0; t < symbols_.size(); ++t) {
    for (std::size_t m = 0; m < N; ++m) V[m] = -symbols_[t][m] * U[m];
    dft(V, grid_, true);
    for (std::size_t i = 0; i < N; ++i) out[i] += weights_[t][i] * V[i].real();
  }
  return out;
}

Eigen::VectorXd DiscreteOperator::apply_drift(const Eigen::VectorXd& u) const {
  const std::size_t N = grid_.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  const double inv2h = 0.5 / grid_.spacing();
  for (std::size_t a = 0; a < drift_.size(); ++a)
    for (std::size_t i = 0; i < N; ++i) {
      const long c0 = grid_.coord(i, 0), c1 = grid_.dim() == 2 ? grid_.coord(i, 1) : 0;
      const std::size_t ip = a == 0 ? grid_.index(c0 + 1, c1) : grid_.index(c0, c1 + 1);
      const std::size_t im = a == 0 ? grid_.index(c0 - 1, c1) : grid_.index(c0, c1 - 1);
      out[i] += drift_[a][i] * (u[ip] - u[im]) * inv2h;
    }
  return out;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = apply_nonlocal(u);
  out += zero_order_.cwiseProduct(u) - lambda_ * u;
  if (!drift_.empty()) out += apply_drift(u);
  return out;
}

StructureCheck check_structure(const DiscreteOperator& op) {
  const Eigen::MatrixXd M = op.nonlocal_matrix();
  StructureCheck s;
  s.max_row_sum = sup(M.rowwise().sum());
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (j != i) {
        off += M(i, j);
        s.min_off_diagonal = std::min(s.min_off_diagonal, M(i, j));
      }
    s.diagonal_defect = std::max(s.diagonal_defect, std::abs(M(i, i) + off));
  }
  return s;
}

Window solver_window(const GridSpec& grid) { return {2 * grid.spacing(), grid.period() / 8}; }

HolderReport discrete_norm(const SampledField& u, double gamma) {
  check_exponent(gamma);
  const Window w = solver_window(u.grid());
  if (gamma < 2) return holder_norm(u, gamma, w);
  if (u.grid().dim() != 1) throw InvalidArgument("discrete_norm: exponents above 2 need d = 1");
  const auto& g = u.grid();
  const int n = g.n();
  cvec U(n);
  for (int i = 0; i < n; ++i) U[i] = u[i];
  dft(U, g, false);
  for (int m = 0; m < n; ++m) {
    const double k = (m == n / 2) ? 0.0 : wave_number(m, n, g.period());
    U[m] *= std::complex<double>(0.0, k);
  }
  dft(U, g, true);
  Eigen::VectorXd du(n);
  for (int i = 0; i < n; ++i) du[i] = U[i].real();
  HolderReport r = seminorm_second(SampledField(g, du), gamma - 1, w);
  r.gamma = gamma;
  r.sup_norm = sup_norm(u);
  r.total = r.sup_norm + r.seminorm;
  r.method = HolderMethod::derivative_based;
  return r;
}

SolveReport solve(const DiscreteOperator& op, const SampledField& f, double beta) {
  if (!(f.grid() == op.grid())) throw InvalidArgument("solve: grid mismatch");
  const Eigen::VectorXd& b = f.values();
  Eigen::VectorXd u;
  bool iterative = false;
  if (op.has_dense()) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.matrix());
    if (!(lu.rcond() > 1e-14)) throw NumericalFailure("solve: operator is singular or ill-conditioned");
    u = lu.solve(b);
  } else {
    OperatorReplacement A(op);
    Eigen::BiCGSTAB<OperatorReplacement, Eigen::IdentityPreconditioner> it;
    it.setTolerance(1e-10);
    it.setMaxIterations(5000);
    it.compute(A);
    u = it.solve(b);
    if (it.info() != Eigen::Success) throw NumericalFailure("solve: BiCGSTAB did not converge");
    iterative = true;
  }
  SolveReport r{SampledField(op.grid(), u)};
  r.iterative = iterative;
  r.residual_inf = sup(op.apply(u) - b);
  if (!(r.residual_inf <= 1e-8 * std::max(1.0, sup(b)))) throw NumericalFailure("solve: residual above tolerance");
  r.u_sup = sup(u);
  r.f_norm = discrete_norm(f, beta).total;
  r.u_norm = discrete_norm(r.u, op.alpha() + beta).total;
  const double den = r.u_sup + r.f_norm;
  r.apriori_constant = den > 0 ? r.u_norm / den : 0.0;
  return r;
}

AprioriResult apriori_experiment(const KernelSpec& k, const FunctionField& f, double beta, const std::vector<int>& grids,
                                 double lambda, double period, const AssembleOptions& opt) {
  AprioriResult out;
  out.grids = grids;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n : grids) {
    const GridSpec g(k.dim, n, period);
    const DiscreteOperator op = assemble(k, g, lambda, opt);
    out.reports.push_back(solve(op, sample_torus(f, g), beta));
    lo = std::min(lo, out.reports.back().apriori_constant);
    hi = std::max(hi, out.reports.back().apriori_constant);
  }
  out.score = hi == 0.0 ? 1.0 : (lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
  for (auto& r : out.reports) r.refinement_score = out.score;
  out.pass = std::isfinite(hi) && out.score < 2.0;
  return out;
}

FreezingRecord freezing_diagnostic(const KernelSpec& k, const DiscreteOperator& op, const SampledField& u,
                                   const SampledField& f, const Point& x0, double eps,
                                   const std::vector<double>& r_schedule, double beta) {
  const GridSpec& g = op.grid();
  if (!(u.grid() == g) || !(f.grid() == g)) throw InvalidArgument("freezing_diagnostic: grid mismatch");
  if (!op.has_dense()) throw InvalidArgument("freezing_diagnostic: needs a dense operator");
  const std::size_t N = g.size();
  FreezingRecord rec;
  rec.eps = eps;

  // Radius rule: largest r whose 4r ball keeps the coefficient within eps of A(x0, .).
  std::vector<double> rs = r_schedule;
  std::sort(rs.rbegin(), rs.rend());
  std::vector<Point> hs;
  for (int j = -6; j <= 6; ++j)
    for (double s : {1.0, -1.0}) {
      hs.emplace_back(s * std::ldexp(1.0, j), 0.0);
      if (g.dim() == 2) hs.emplace_back(0.0, s * std::ldexp(1.0, j));
    }
  bool found = false;
  for (double r : rs) {
    double osc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const Point d = torus_offset(g, g.point(i), x0);
      if (d.norm() > 4 * r) continue;
      for (const auto& h : hs) osc = std::max(osc, std::abs(k.A(x0 + d, h) - k.A(x0, h)));
    }
    if (osc < eps) {
      rec.r = r;
      rec.oscillation = osc;
      found = true;
      break;
    }
  }
  if (!found) throw InvalidArgument("freezing_diagnostic: no radius in the schedule satisfies the rule");

  const DiscreteOperator op0 = assemble(frozen(k, x0), g, op.lambda());
  const Eigen::MatrixXd L = op.nonlocal_matrix();
  const Eigen::MatrixXd L0 = op0.nonlocal_matrix();
  const CutoffFunction cut(g.dim(), Point::Zero(), rec.r);
  Eigen::VectorXd phi(N);
  for (std::size_t i = 0; i < N; ++i) phi[i] = cut(torus_offset(g, g.point(i), x0));
  const Eigen::VectorXd& uv = u.values();
  const Eigen::VectorXd v = uv.cwiseProduct(phi);

  const Eigen::VectorXd lhs = L0 * v;
  const Eigen::VectorXd J1 = uv.cwiseProduct(L * phi);
  // L u from the equation: L u = f + lambda u - P u - Q.grad u.
  const Eigen::VectorXd Lu = f.values() + op.lambda() * uv - op.zero_order().cwiseProduct(uv) - op.apply_drift(uv);
  const Eigen::VectorXd J2 = phi.cwiseProduct(Lu);
  Eigen::VectorXd J3(N);
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += L(i, j) * (uv[j] - uv[i]) * (phi[j] - phi[i]);
    J3[i] = s;
  }
  const Eigen::VectorXd J4 = -((L - L0) * v);
  const Eigen::VectorXd F = J1 + J2 + J3 + J4;

  const double eps_m = std::numeric_limits<double>::epsilon();
  const double row = L.cwiseAbs().rowwise().sum().maxCoeff();
  const double solve_res = sup(op.apply(uv) - f.values());
  rec.tolerance = solve_res + 64 * eps_m * N * row * std::max(sup(uv), 1e-300);
  for (std::size_t i = 0; i < N; ++i)
    if (torus_offset(g, g.point(i), x0).norm() <= 3 * rec.r) rec.residual = std::max(rec.residual, std::abs(lhs[i] - F[i]));
  rec.J4_sup = sup(J4);
  const SampledField Fs(g, F);
  rec.F_sup = sup(F);
  rec.F_seminorm = discrete_norm(Fs, beta).seminorm;
  rec.bound_shape = discrete_norm(f, beta).total + sup(uv) + eps * discrete_norm(u, op.alpha() + beta).total;
  rec.ratio = rec.bound_shape > 0 ? (rec.F_sup + rec.F_seminorm) / rec.bound_shape : 0.0;
  rec.pass = rec.residual < 5 * rec.tolerance && std::isfinite(rec.ratio);
  return rec;
}

SharpnessResult sharpness_scaling(double alpha, const std::vector<double>& r_list, int n) {
  check_alpha(alpha);
  if (r_list.size() < 2) throw InvalidArgument("sharpness_scaling: need at least two radii");
  SharpnessResult out;
  out.alpha = alpha;
  out.r = r_list;
  const double rmax = *std::max_element(r_list.begin(), r_list.end());
  const GridSpec g(1, n, 16 * rmax);
  const double lambda = 1e-3;
  const double kap = kappa(1, alpha);
  auto gauge = [&](double r, double lam) {
    const SampledField f = sample_torus(CutoffFunction(1, Point::Zero(), r).field(), g);
    cvec U(n);
    for (int i = 0; i < n; ++i) U[i] = f[i];
    dft(U, g, false);
    for (int m = 0; m < n; ++m) U[m] /= -(kap * std::pow(std::abs(wave_number(m, n, g.period())), alpha) + lam);
    dft(U, g, true);
    const long j = std::lround(2 * r / g.spacing());
    return std::abs(U[0].real() - U[j].real());
  };
  std::vector<double> lx, ly;
  for (double r : r_list) {
    const double v = gauge(r, lambda);
    out.gauge.push_back(v);
    out.lambda_bias = std::max(out.lambda_bias, std::abs(gauge(r, 2 * lambda) - v) / v);
    const SampledField f = sample_torus(CutoffFunction(1, Point::Zero(), r).field(), g);
    out.f_seminorm.push_back(holder_norm(f, 0.3, solver_window(g)).seminorm);
    lx.push_back(std::log(r));
    ly.push_back(std::log(v));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0)) throw InvalidArgument("sharpness_scaling: degenerate radii");
  out.exponent = sxy / sxx;
  bool monotone = true;
  for (std::size_t i = 1; i < out.gauge.size(); ++i) monotone = monotone && out.gauge[i] > out.gauge[i - 1];
  out.pass = monotone && std::abs(out.exponent - alpha) <= 0.1;
  return out;
}

std::function<double(const Point&)> weierstrass(double s, int n) {
  const double c = 0.4 * (1 - std::pow(2.0, -s));
  int J = 0;
  while ((2 << J) <= n / 4) ++J;
  return [c, s, J](const Point& x) {
    double v = 0.0;
    for (int j = 0; j <= J; ++j) v += std::pow(2.0, -j * s) * std::cos(std::ldexp(1.0, j) * x(0));
    return 1.0 + c * v;
  };
}

CoefficientProbe coefficient_sharpness_probe(double delta, double alpha, double beta, const std::vector<int>& grids) {
  if (!(delta >= 0 && delta < beta)) throw InvalidArgument("coefficient_sharpness_probe: need 0 <= delta < beta");
  CoefficientProbe out;
  out.delta = delta;
  out.grids = grids;
  const FunctionField f = cusp(1, beta);
  for (int n : grids) {
    const GridSpec g(1, n, 2 * M_PI);
    for (int rough = 0; rough < 2; ++rough) {
      const double s = rough ? beta - delta : beta;
      KernelSpec k = separable_kernel(alpha, 1, weierstrass(s, n), [](const Point&) { return 1.0; }, 0.6, 1.4, s, 1.0, 1.0);
      k.x_period = 2 * M_PI;
      const auto rep = solve(assemble(k, g, 1.0), sample_torus(f, g), beta);
      (rough ? out.rough : out.compliant).push_back(discrete_norm(rep.u, alpha + beta).seminorm);
    }
  }
  out.compliant_growth = out.compliant.back() / out.compliant.front();
  out.rough_growth = out.rough.back() / out.rough.front();
  return out;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  static_assert(std::endian::native == std::endian::little, "SLKO dumps assume a little-endian host");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("write_matrix: cannot open " + path);
  const std::uint64_t rows = m.rows(), cols = m.cols();
  os.write("SLKO", 4);
  os.write(reinterpret_cast<const char*>(&rows), 8);
  os.write(reinterpret_cast<const char*>(&cols), 8);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  os.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(8 * rows * cols));
  if (!os) throw InvalidArgument("write_matrix: write failed for " + path);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("read_matrix: cannot open " + path);
  char magic[4];
  std::uint64_t rows = 0, cols = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&rows), 8);
  is.read(reinterpret_cast<char*>(&cols), 8);
  if (!is || std::string(magic, 4) != "SLKO") throw InvalidArgument("read_matrix: not an SLKO file");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  is.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(8 * rows * cols));
  if (!is) throw InvalidArgument("read_matrix: truncated file");
  return rm;
}

}  // namespace slk
