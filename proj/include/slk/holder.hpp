#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "slk/fields.hpp"

namespace slk {

/// Range of offset lengths |h| scanned by the seminorms.
struct Window {
  double h_min = 0.0;
  double h_max = 0.0;
};

/// Non-periodic lattice on [-half_width, half_width]^d used to measure norms of
/// closed-form fields. Pairs leaving the box are skipped.
struct ProbeBox {
  int dim = 1;
  double half_width = 8.0;
  double spacing = 1.0 / 128;
  /// Empty means [2 spacing, half_width / 2].
  std::optional<Window> window;
  /// Central-difference step for fields without analytic derivatives; 0 disables.
  double fd_step = 0.0;

  static ProbeBox standard(int dim);
  Window effective_window() const;
  int points_per_axis() const;
};

enum class HolderMethod { first_difference, second_difference, derivative_based };
std::string to_string(HolderMethod m);

struct HolderReport {
  std::string field_id;
  double gamma = 0.0;
  Window window;
  double sup_norm = 0.0;
  double seminorm = 0.0;
  double total = 0.0;
  Point witness_x = Point::Zero();
  Point witness_h = Point::Zero();
  HolderMethod method = HolderMethod::first_difference;
};

/// Validates a Hölder exponent in (0, 3); integers are rejected unless integer_mode.
void check_exponent(double gamma, bool integer_mode = false);

double sup_norm(const SampledField& f);
double sup_norm(const FunctionField& f, const std::vector<Point>& probes);
double sup_norm(const FunctionField& f, const ProbeBox& box);

Window default_window(const GridSpec& grid);

HolderReport seminorm_first(const SampledField& f, double gamma, std::optional<Window> window = {});
HolderReport seminorm_second(const SampledField& f, double gamma, std::optional<Window> window = {});
HolderReport seminorm_first(const FunctionField& f, double gamma, const ProbeBox& box);
HolderReport seminorm_second(const FunctionField& f, double gamma, const ProbeBox& box);

/// Periodic lattice norm: first differences for gamma < 1, second differences for gamma in (1,2).
HolderReport holder_norm(const SampledField& f, double gamma, std::optional<Window> window = {});
/// As above for gamma < 2; for gamma in (2,3) sup plus the sum over i of the
/// second-difference seminorm of D_i f at gamma - 1 (analytic gradient, else central
/// differences with box.fd_step).
HolderReport holder_norm(const FunctionField& f, double gamma, const ProbeBox& box);

/// N(f,a): sup plus first-difference seminorms of the top derivatives for
/// non-integer a; sup norms of derivatives for a in {1, 2}.
double n_norm(const FunctionField& f, double a, const ProbeBox& box);
/// The equivalent norm that also includes the sup norms of all lower derivatives.
double hse2_norm(const FunctionField& f, double a, const ProbeBox& box);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool pass = false;
  /// False when the bound is vacuous for this field (e.g. N(f,b) infinite).
  bool applicable = true;
};

/// Constant c1(a, b, eps, d) assembled from the interpolation proof.
double interp_constant(double a, double b, double eps, int dim);
BoundCheck interp_bound(const FunctionField& f, double a, double b, double eps, const ProbeBox& box);

/// Constant of N(fg,a) <= c N(f,a) N(g,a).
double product_constant(double a, int dim);
BoundCheck product_bound(const FunctionField& f, const FunctionField& g, double a, const ProbeBox& box);

/// The normalized bump phi(x) = C exp(-1/(1-|x|^2)) on the unit ball.
class Mollifier {
 public:
  explicit Mollifier(int dim);
  double operator()(const Point& y) const;
  Point gradient(const Point& y) const;
  Hessian hessian(const Point& y) const;
  int dim() const { return dim_; }
  double normalization() const { return c_; }

  /// int |y|^beta phi, int |y|^beta |D_1 phi|, max_ij int |y|^beta |D_ij phi|.
  std::array<double, 3> moment_constants(double beta) const;

  /// Tensor Gauss-Legendre rule on [-1,1]^d: 16 panels of 4 nodes per axis.
  struct Rule {
    std::vector<Point> nodes;
    std::vector<double> weights;
  };
  const Rule& rule() const { return rule_; }

 private:
  int dim_;
  double c_ = 1.0;
  Rule rule_;
};

/// f_eps = f * phi_eps with value, gradient and Hessian by fixed quadrature.
FunctionField mollify(const FunctionField& f, double eps);

struct MollifyRow {
  double eps;
  double c0;  // |f - f_eps|_inf / eps^beta
  double c1;  // max_i |D_i f_eps|_inf eps^(1-beta)
  double c2;  // max_ij |D_ij f_eps|_inf eps^(2-beta)
};

struct MollifyAudit {
  std::vector<MollifyRow> rows;
  double holder_norm = 0.0;
  std::array<double, 3> constants{};
  double c1 = 0.0;
  bool pass = false;
};

/// Probe set: a coarse lattice on [-half_width, half_width]^d plus a fine
/// lattice of spacing 2^-12 near the origin.
std::vector<Point> mollify_probes(int dim, double half_width = 4.0);

MollifyAudit mollify_bounds_audit(const FunctionField& f, double beta, const std::vector<double>& eps_list,
                                  const ProbeBox& box);

}  // namespace slk
