#pragma once

#include <cstdint>
#include <vector>

#include "slk/fields.hpp"
#include "slk/holder.hpp"
#include "slk/nonlocal.hpp"

namespace slk {

enum class SemigroupMode { exact_stable, split_lower };
std::string to_string(SemigroupMode m);

/// Semigroup generated by an x-independent kernel in d = 1.
struct SemigroupSpec {
  KernelSpec kernel;
  SemigroupMode mode = SemigroupMode::exact_stable;
  /// split_lower only: jumps of the residual kernel (A0 - kappa1) with |h| > eps_cut
  /// are sampled as compound Poisson; smaller residual jumps are dropped.
  int mc_samples = 4000;
  std::uint64_t seed = 1;
  double eps_cut = 0.05;
  double mc_tolerance = 0.02;

  /// exact_stable when A0 is constant, split_lower otherwise.
  static SemigroupSpec for_kernel(const KernelSpec& k);
  /// Stable time tau with P_t = Q_tau for the (lower) stable part, q having symbol exp(-tau |xi|^alpha).
  double stable_time(double t) const;
};

void validate(const SemigroupSpec& sg);

struct SemigroupValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// P_t f(x); stream selects the Monte-Carlo substream for split_lower.
SemigroupValue semigroup_apply_detailed(const SemigroupSpec& sg, double t, const FunctionField& f, const Point& x,
                                        std::uint64_t stream = 0);
double semigroup_apply(const SemigroupSpec& sg, double t, const FunctionField& f, const Point& x);
/// D^k P_t f(x) for k <= 3 by convolution with derivatives of q (exact_stable only).
double semigroup_derivative(const SemigroupSpec& sg, double t, const FunctionField& f, const Point& x, int k);
/// x -> P_t f(x) as a field, with gradient and Hessian from the kernel derivatives.
FunctionField semigroup_field(const SemigroupSpec& sg, double t, const FunctionField& f);

struct DecayRow {
  double t = 0.0;
  double d1 = 0.0;  ///< sup |D P_t f| t^{1/alpha}
  double d2 = 0.0;  ///< sup |D^2 P_t f| t^{2/alpha}
};
struct DecayAudit {
  std::vector<DecayRow> rows;
  double f_sup = 0.0;
  /// (A kappa)^{-k/alpha} ||q^(k)(1,.)||_L1: the bound for column k divided by ||f||.
  double bound1 = 0.0, bound2 = 0.0;
  /// Largest column entry divided by ||f||.
  double c1 = 0.0;
  bool pass = false;
};
/// Sup over the probe lattice [-8, 8] with spacing 1/16.
DecayAudit derivative_decay_audit(const SemigroupSpec& sg, const std::vector<double>& t_list, const FunctionField& f);

/// Killed potential R f = int_0^inf e^{-lambda t} P_t f dt.
struct PotentialSpec {
  double lambda = 1.0;
  /// Time window [t_min, t_max] = [t_min_factor, t_max_factor] / lambda; mass outside is
  /// treated as a point mass at the origin.
  double t_min_factor = 1e-4;
  double t_max_factor = 30.0;
  double panel_width = 0.25;
};

void validate(const PotentialSpec& ps);

/// G(z) = int e^{-s} s^{-1/alpha} q(1, z s^{-1/alpha}) ds over the time window, so that
/// R f(x) = lambda^{-1} int f(x - l z) G(z) dz with l = (A kappa / lambda)^{1/alpha}.
double resolvent_profile(double alpha, double z, double s_min, double s_max, double panel_width = 0.25);

double resolvent_apply(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f, const Point& x);
/// R f as a field; gradient and Hessian are R applied to those of f when available.
FunctionField resolvent_field(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f);

/// R f on the lattice of a probe box by product integration against the piecewise-linear
/// interpolant of f. Weights depend only on the lattice offset, so shifting f by a lattice
/// step shifts the result exactly.
struct LatticeResolvent {
  ProbeBox box;
  std::vector<double> value;
  std::vector<double> gradient;
  /// Field that evaluates at lattice points only.
  FunctionField field(const std::string& id) const;
};
LatticeResolvent resolvent_lattice(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f,
                                   const ProbeBox& box, bool with_gradient);

struct GainAudit {
  double gamma = 0.0;
  double lhs = 0.0;  ///< measured C^{alpha+beta} norm of R f
  double f_norm = 0.0;
  double u_sup = 0.0;
  double rhs = 0.0;  ///< f_norm + u_sup
  double constant = 0.0;
  double constant_refined = 0.0;
  int grid = 0;
  HolderReport report;
  bool pass = false;
};
/// Measures R f on the box [-4, 4] with `grid` intervals and again with twice as many.
GainAudit holder_gain_audit(const PotentialSpec& ps, const SemigroupSpec& sg, const FunctionField& f, double beta,
                            int grid = 256);

}  // namespace slk
