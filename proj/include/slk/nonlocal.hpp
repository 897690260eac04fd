#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slk/fields.hpp"
#include "slk/holder.hpp"

namespace slk {

/// kappa(d, alpha) = int (1 - cos h_1) |h|^{-d-alpha} dh, so that A = a gives the
/// symbol a kappa |xi|^alpha.
double kappa(int dim, double alpha);

/// One product term w(x) a0(h) of a separable coefficient.
struct SeparableTerm {
  std::function<double(const Point&)> w;
  std::function<double(const Point&)> a0;
  /// Set when a0 is constant; enables the closed-form symbol.
  std::optional<double> a0_constant;
  /// True when a0(-h) = a0(h).
  bool a0_even = true;
};

/// Coefficient A(x,h) of the jump kernel A(x,h) |h|^{-d-alpha}.
struct KernelSpec {
  std::string id;
  double alpha = 1.0;
  int dim = 1;
  std::function<double(const Point& x, const Point& h)> A;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  /// Hölder-in-x exponent and constant.
  double beta = 0.5;
  double c3 = 0.0;
  /// When set, the Hölder bound is only claimed for |h| <= truncation_h0.
  std::optional<double> truncation_h0;
  bool x_independent = false;
  /// Optional representation A(x,h) = sum_t w_t(x) a0_t(h); required by the solver.
  std::vector<SeparableTerm> terms;
  /// Optional override of the angular mean of A(x, h) at large |h|.
  std::function<double(const Point&)> far;
  /// Period in every coordinate of x -> A(x,h), if periodic.
  std::optional<double> x_period;

  double operator()(const Point& x, const Point& h) const { return A(x, h); }
};

/// A = a.
KernelSpec constant_kernel(double alpha, int dim = 1, double a = 1.0);
/// A = w(x) a0(h) with user bounds.
KernelSpec separable_kernel(double alpha, int dim, std::function<double(const Point&)> w,
                            std::function<double(const Point&)> a0, double kappa1, double kappa2, double beta,
                            double c3, std::optional<double> a0_constant = {});
/// A(x,h) = 1 + amp |sin(2 pi x_1 / period)|^beta, a genuinely C^beta coefficient in x.
KernelSpec holder_kernel(double alpha, int dim, double beta, double amp = 0.4, double period = 2 * M_PI);
/// Non-separable in the sense that its h-dependence varies with x:
/// A = 1 + amp |sin(2 pi x_1/P)|^beta + 0.2 cos(2 pi x_1/P) exp(-|h|^2).
KernelSpec mixed_kernel(double alpha, int dim, double beta, double amp = 0.3, double period = 2 * M_PI);
/// x-independent, even in h: A0(h) = 1 + c exp(-|h|^2).
KernelSpec bumped_kernel(double alpha, int dim, double c = 0.5);
/// Freezes A at x0: A(x0, h) for every x.
KernelSpec frozen(const KernelSpec& k, const Point& x0);
/// Coefficient b(x,h) = A(x,h) - A(x0,h); not elliptic, used by apply_B.
KernelSpec perturbation(const KernelSpec& k, const Point& x0);
/// A for |h| <= h0 and a rough x-dependence beyond.
KernelSpec truncated_kernel(const KernelSpec& base, double h0, double rough_beta = 0.1);

struct KernelValidation {
  double min_A = 0.0;
  double max_A = 0.0;
  /// max |A(x+k,h) - A(x,h)| / |k|^beta over the probe.
  double holder_ratio = 0.0;
  bool ellipticity_ok = false;
  bool holder_ok = false;
  bool exponents_ok = false;
  bool pass() const { return ellipticity_ok && holder_ok && exponents_ok; }
};
KernelValidation validate_kernel(const KernelSpec& k, int probes = 10000, unsigned long long seed = 1);

struct QuadratureSpec {
  /// Direct rings [2^{-j-1}, 2^{-j}] for j < ring_levels; delta = 2^{-ring_levels}.
  int ring_levels = 16;
  /// Rings below delta evaluated from the Taylor polynomial (fields with a Hessian).
  int taylor_levels = 48;
  /// Cap for direct rings when no Hessian is available.
  int max_direct_levels = 200;
  /// Truncation radius R; 0 selects 256 for d = 1 and 16 for d = 2.
  double outer_cut = 0.0;
  double panel_width = 0.125;
  int radial_order = 8;
  int angular_min = 32;
  double tolerance = 1e-8;

  double inner_radius() const;
  double effective_outer_cut(int dim) const;
  /// Ten-fold node budget for reference computations.
  QuadratureSpec refined() const;
};

void validate(const QuadratureSpec& q, int dim);

/// E_h f(x) = f(x+h) - f(x).
double first_difference(const FunctionField& f, const Point& x, const Point& h);
/// F_h f(x) = f(x+h) - f(x) - grad f(x).h.
double compensated_difference(const FunctionField& f, const Point& x, const Point& h);

struct OperatorValue {
  double value = 0.0;
  /// Quadrature plus truncation error estimate.
  double error = 0.0;
  /// Crude tail bound 2 |f|_inf kappa2 omega_d R^{-alpha}/alpha.
  double tail_bound = 0.0;
  long evaluations = 0;
  bool extrapolated = false;
};

/// L f(x) with the variable coefficient.
OperatorValue apply_L_detailed(const KernelSpec& k, const FunctionField& f, const Point& x,
                               const QuadratureSpec& q = {});
double apply_L(const KernelSpec& k, const FunctionField& f, const Point& x, const QuadratureSpec& q = {});
/// Requires an x-independent kernel; same code path as apply_L.
double apply_L0(const KernelSpec& k, const FunctionField& f, const Point& x, const QuadratureSpec& q = {});
/// Operator with coefficient A(x,h) - A(x0,h).
double apply_B(const KernelSpec& k, const Point& x0, const FunctionField& f, const Point& x,
               const QuadratureSpec& q = {});

/// Symbol of the x-independent kernel at frequency xi: L e^{i xi.x} = s(xi) e^{i xi.x},
/// so s = [L cos](0) + i [L sin](0).
std::complex<double> symbol(const KernelSpec& k, const Point& xi, const QuadratureSpec& q = {});
/// Symbol of a single even h-profile a0 at wavenumber k >= 0 in d = 1 by rescaled quadrature.
double symbol_even_1d(const std::function<double(const Point&)>& a0, double alpha, double k,
                      const QuadratureSpec& q = {});

/// Sampling plan for the difference audits.
struct DifferenceSamples {
  /// Points x on an odd linspace over [-x_extent, x_extent].
  int x_count = 33;
  double x_extent = 2.0;
  /// Offsets +-2^{-j} for j = -2..j_max, along each axis (and the diagonal in d = 2).
  int j_max = 8;
  DifferenceSamples doubled() const;
};

struct FdCase {
  char id;
  bool applicable = false;
  double worst = 0.0;
  double worst_doubled = 0.0;
  /// Proof constant when explicit (cases a and b), otherwise 0.
  double proof_constant = 0.0;
  bool pass = false;
};

struct FdAudit {
  std::string field_id;
  double gamma;
  double norm;  // measured C^gamma norm used in the denominators
  std::vector<FdCase> cases;
  bool pass = false;
};

/// Worst ratios of the five difference estimates against bound * |f|_{C^gamma}.
FdAudit fd_bounds_audit(const FunctionField& f, double gamma, const DifferenceSamples& s = {},
                        const ProbeBox* box = nullptr);

struct FdIntegralAudit {
  double worst = 0.0;
  double worst_refined = 0.0;
  double norm = 0.0;
  bool pass = false;
};
/// sup over x and k of the difference integrals / (|k|^beta |f|_{C^{alpha+beta}}).
FdIntegralAudit fd_integral_audit(const FunctionField& f, const KernelSpec& k, double beta,
                                  const std::vector<double>& k_list, const std::vector<Point>& xs,
                                  const QuadratureSpec& q = {});

struct L0SmoothnessAudit {
  HolderReport report;  // of L0 u at exponent beta
  double u_norm = 0.0;  // |u|_{C^{alpha+beta}}
  double c1 = 0.0;
  bool pass = false;
};
L0SmoothnessAudit smoothness_of_L0u_audit(const FunctionField& u, const KernelSpec& k, double beta, double c1,
                                          const QuadratureSpec& q = {});

}  // namespace slk
