#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slk/grid.hpp"
#include "slk/holder.hpp"
#include "slk/nonlocal.hpp"

namespace slk {

struct AssembleOptions {
  /// P(x) added to the diagonal.
  std::function<double(const Point&)> zero_order;
  /// Q(x) . grad u by centered differences; requires alpha > 1.
  std::function<Point(const Point&)> first_order;
  /// Smallest lambda accepted without a zero-order term.
  double lambda_floor = 1e-3;
  /// Quadrature for numeric symbols of non-constant profiles.
  QuadratureSpec quad;
};

/// (L - lambda + P + Q.grad) on the periodic lattice. Each separable term
/// w_t(x) a0_t(h) of the kernel acts as w_t(x_i) times the Fourier multiplier
/// -psi_t(k) of the trigonometric interpolant, which is the exactly periodized
/// kernel (no folding truncation).
class DiscreteOperator {
 public:
  const GridSpec& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  bool has_dense() const { return dense_.size() > 0; }
  /// Full operator; only assembled when n^d <= 4096.
  const Eigen::MatrixXd& matrix() const;
  /// The nonlocal part alone as a dense matrix.
  Eigen::MatrixXd nonlocal_matrix() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_nonlocal(const Eigen::VectorXd& u) const;
  /// Centered-difference drift Q . grad u (zero without a first-order term).
  Eigen::VectorXd apply_drift(const Eigen::VectorXd& u) const;
  const Eigen::VectorXd& zero_order() const { return zero_order_; }
  /// psi_t at the FFT ordering of wave numbers, one vector per term.
  const std::vector<Eigen::VectorXd>& symbols() const { return symbols_; }
  const std::vector<Eigen::VectorXd>& weights() const { return weights_; }

 private:
  friend DiscreteOperator assemble(const KernelSpec&, const GridSpec&, double, const AssembleOptions&);
  explicit DiscreteOperator(GridSpec g) : grid_(std::move(g)) {}
  GridSpec grid_;
  double alpha_ = 1.0;
  double lambda_ = 1.0;
  std::vector<Eigen::VectorXd> symbols_;
  std::vector<Eigen::VectorXd> weights_;
  Eigen::VectorXd zero_order_;
  std::vector<Eigen::VectorXd> drift_;
  Eigen::MatrixXd dense_;
};

DiscreteOperator assemble(const KernelSpec& k, const GridSpec& grid, double lambda, const AssembleOptions& opt = {});

/// Whole-space symbol psi(k) >= 0 of one separable term (L0 e^{ikx} = -psi e^{ikx}).
double term_symbol(const KernelSpec& k, std::size_t term, const Point& wave, const QuadratureSpec& q = {});

/// Lattice point i wrapped into [-P/2, P/2)^d.
Point torus_point(const GridSpec& grid, std::size_t i);
/// Samples f at lattice points wrapped into [-P/2, P/2)^d.
SampledField sample_torus(const FunctionField& f, const GridSpec& grid);
/// Evaluates a coefficient at the same wrapped points.
Eigen::VectorXd sample_torus(const std::function<double(const Point&)>& f, const GridSpec& grid);

struct StructureCheck {
  double max_row_sum = 0.0;       ///< |L 1| of the nonlocal part
  double min_off_diagonal = 0.0;  ///< most negative off-diagonal weight
  double diagonal_defect = 0.0;   ///< |diag + off-diagonal row sum|
};
StructureCheck check_structure(const DiscreteOperator& op);

/// Discrete norm window [2 spacing, P/8].
Window solver_window(const GridSpec& grid);
/// Discrete C^gamma norm: first or second differences, or for gamma in (2,3) the
/// spectral derivative measured by second differences at gamma - 1 (d = 1).
HolderReport discrete_norm(const SampledField& u, double gamma);

struct SolveReport {
  SampledField u;
  double residual_inf = 0.0;
  double u_sup = 0.0;
  double f_norm = 0.0;
  double u_norm = 0.0;
  double apriori_constant = 0.0;
  double refinement_score = 0.0;
  bool iterative = false;
};

/// Solves op u = f: dense LU up to 4096 unknowns, otherwise BiCGSTAB on the
/// FFT-applied operator with relative tolerance 1e-10. Norms use exponents beta and alpha + beta.
SolveReport solve(const DiscreteOperator& op, const SampledField& f, double beta);

struct AprioriResult {
  std::vector<int> grids;
  std::vector<SolveReport> reports;
  double score = 0.0;  ///< max/min of the apriori constants
  bool pass = false;
};
/// Solves on each grid of period `period`; passes when the constant varies by less than a factor 2.
AprioriResult apriori_experiment(const KernelSpec& k, const FunctionField& f, double beta, const std::vector<int>& grids,
                                 double lambda = 1.0, double period = 4 * M_PI, const AssembleOptions& opt = {});

struct FreezingRecord {
  double r = 0.0;
  double eps = 0.0;
  double oscillation = 0.0;  ///< sampled sup |A(x,h) - A(x0,h)| on B(x0, 4r)
  double residual = 0.0;     ///< max |L0 v - (J1+J2+J3+J4)| on B(x0, 3r)
  double tolerance = 0.0;
  double J4_sup = 0.0;
  double F_sup = 0.0;
  double F_seminorm = 0.0;
  double bound_shape = 0.0;  ///< ||f||_{C^beta} + ||u||_inf + eps ||u||_{C^{alpha+beta}}
  double ratio = 0.0;
  bool pass = false;
};
/// u must solve op u = f; op must be dense. The radius is the largest r in r_schedule
/// passing the oscillation rule for eps.
FreezingRecord freezing_diagnostic(const KernelSpec& k, const DiscreteOperator& op, const SampledField& u,
                                   const SampledField& f, const Point& x0, double eps,
                                   const std::vector<double>& r_schedule, double beta);

struct SharpnessResult {
  double alpha = 0.0;
  std::vector<double> r;
  std::vector<double> gauge;       ///< |u_r(0) - u_r(2r)|
  std::vector<double> f_seminorm;  ///< [f_r]_{C^0.3}
  double exponent = 0.0;
  double lambda_bias = 0.0;  ///< largest relative gauge change when lambda doubles
  bool pass = false;
};
/// A = 1, f_r = bump(x/r) on the period 16 max(r) with lambda = 1e-3, solved by the Fourier multiplier.
SharpnessResult sharpness_scaling(double alpha, const std::vector<double>& r_list = {1, 2, 4, 8}, int n = 8192);

struct CoefficientProbe {
  double delta = 0.0;
  std::vector<int> grids;
  std::vector<double> compliant;  ///< [u]_{C^{alpha+beta}} with w in C^beta
  std::vector<double> rough;      ///< with w in C^{beta-delta}
  double compliant_growth = 0.0;
  double rough_growth = 0.0;
};
/// A(x,h) = w(x) with w a Weierstrass sum truncated at the grid scale; f = cusp-beta.
CoefficientProbe coefficient_sharpness_probe(double delta, double alpha = 0.8, double beta = 0.3,
                                             const std::vector<int>& grids = {256, 512, 1024});
/// 1 + c sum_j 2^{-j s} cos(2^j x) for 2^j <= n/4, scaled into [0.6, 1.4].
std::function<double(const Point&)> weierstrass(double s, int n);

/// Dense binary dump: "SLKO", uint64 rows, uint64 cols, row-major little-endian doubles.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

}  // namespace slk
