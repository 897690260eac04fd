#pragma once

#include <array>
#include <vector>

#include "slk/grid.hpp"

namespace slk {

void check_alpha(double alpha);

/// Law of T_1 = 2S where S is one-sided stable of index rho = alpha/2 with
/// E exp(-s S) = exp(-s^rho). Then E exp(-s T_1) = exp(-(2s)^(alpha/2)) and the
/// subordinated Brownian motion W_{T_t} has Fourier transform exp(-t|xi|^alpha).
struct SubordinatorLaw {
  double alpha = 1.0;
  double rho() const { return 0.5 * alpha; }
};

/// Density of S (index rho) by the Kanter-Zolotarev integral representation.
double one_sided_stable_density_integral(double rho, double x);
/// The same density by its power series in x^-rho (convergent for rho < 1,
/// numerically useful once x^-rho is small).
double one_sided_stable_density_series(double rho, double x, int terms = 60);
/// Dispatches between the two representations.
double one_sided_stable_density(double rho, double x);

double subordinator_density(const SubordinatorLaw& law, double s);
/// P(T_1 <= lambda) by adaptive quadrature.
double subordinator_cdf(const SubordinatorLaw& law, double lambda);
/// P(T_1 > s) from the leading term of the large-argument expansion.
double subordinator_tail(const SubordinatorLaw& law, double s);

struct TailFit {
  double c1 = 0.0;
  std::vector<double> lambdas;
  std::vector<double> cdf;
  /// P(T_1 <= lambda) <= exp(-c1 lambda^(-alpha/2)) on a grid twice as dense as the fit grid.
  bool holds = false;
};
/// Fits c1 on lambda in {0.01, 0.02, 0.05, 0.1, 0.2, 0.5} and checks the bound on a denser grid.
TailFit fit_small_tail(const SubordinatorLaw& law);

struct SubordinationQuad {
  /// Step of the logarithmic grid s = e^v.
  double step = 0.02;
};

/// Nodes s_j = e^{v_j} and weights W_j = g_T(s_j) s_j dv for the T_1 law.
struct SubordinationTable {
  double alpha;
  double step;
  std::vector<double> s;
  std::vector<double> w;
  /// sum of weights plus the analytic tail beyond the last node.
  double mass;
};
/// Cached per (alpha, step); thread-safe.
const SubordinationTable& subordination_table(double alpha, double step = 0.02);

struct StableDensity {
  double alpha = 1.0;
  int dim = 1;
  double t = 1.0;
  SubordinationQuad quad;
};

void validate(const StableDensity& sd);

/// q(t,x) = E r(T_t, x) with r the Gaussian kernel of variance s per coordinate.
double stable_density(const StableDensity& sd, const Point& x);
/// D^k q(t,x) for a multi-index k with |k| <= 3 (k[1] ignored when d = 1).
double stable_density_deriv(const StableDensity& sd, const Point& x, std::array<int, 2> k);

/// Constant c with q(1,x) ~ c |x|^{-d-alpha} as |x| -> infinity.
double stable_tail_constant(double alpha, int dim);

struct IntegrabilityAudit {
  double value = 0.0;
  double stability_score = 0.0;
  std::vector<double> box_half_widths;
  std::vector<double> box_values;
  bool pass = false;
};
/// int |D_1^k q(1,.)| over expanding boxes plus a tail estimate from the
/// boundary values; the score is the relative change over the last doubling.
IntegrabilityAudit derivative_integrability_audit(const StableDensity& sd, int k);

/// Fixed quadrature for convolutions against q(1,.) in d = 1: nodes z = sinh(w)
/// on panels in w, with q^(j)(1,z) for j = 0..3 tabulated.
struct StableKernelTable {
  double alpha;
  std::vector<double> z;
  std::vector<double> weight;
  std::array<std::vector<double>, 4> q;
};
/// Cached per (alpha, panel width, z_max); thread-safe.
const StableKernelTable& stable_kernel_table(double alpha, double panel_width = 0.05, double z_max = 1e6);

}  // namespace slk
