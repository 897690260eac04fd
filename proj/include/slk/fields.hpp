#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "slk/grid.hpp"

namespace slk {

using Hessian = Eigen::Matrix2d;

struct Decay {
  enum class Kind { compact_support, bounded, power_decay };
  Kind kind = Kind::bounded;
  /// Support radius for compact_support, rate for power_decay.
  double param = 0.0;

  static Decay compact(double radius) { return {Kind::compact_support, radius}; }
  static Decay bounded() { return {Kind::bounded, 0.0}; }
  static Decay power(double rate) { return {Kind::power_decay, rate}; }
};

/// Closed-form scalar field on R^d. Copies share the underlying callables.
struct FunctionField {
  std::string id;
  int dim = 1;
  std::function<double(const Point&)> eval;
  std::function<Point(const Point&)> grad;    // optional
  std::function<Hessian(const Point&)> hess;  // optional
  /// Declared Hölder exponent; infinity for smooth members.
  double regularity = std::numeric_limits<double>::infinity();
  Decay decay;
  /// Spherical average of f at infinity (the mean over a period for periodic fields).
  double far_value = 0.0;
  std::optional<double> period;

  double operator()(const Point& x) const { return eval(x); }
  bool has_grad() const { return static_cast<bool>(grad); }
  bool has_hess() const { return static_cast<bool>(hess); }
  bool smooth() const { return regularity == std::numeric_limits<double>::infinity(); }
};

/// Smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smooth_step(double t, int derivative = 0);

/// Unnormalized cutoff: 1 on B(center, r), 0 outside B(center, 2r).
class CutoffFunction {
 public:
  CutoffFunction(int dim, Point center, double radius);

  double operator()(const Point& x) const;
  Point gradient(const Point& x) const;
  Hessian hessian(const Point& x) const;
  FunctionField field() const;

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return dim_; }

 private:
  int dim_;
  Point center_;
  double radius_;
};

FunctionField constant_field(int dim, double c);
/// cos(k x_1).
FunctionField wave(int dim, double k);
/// exp(-|x - c|^2 / s^2).
FunctionField gaussian(int dim, double s, Point center = Point::Zero());
/// f_r(x) = phibar(x / r).
FunctionField bump(int dim, double r);
/// min(|x - x0|^gamma, M).
FunctionField cusp(int dim, double gamma, Point x0 = Point::Zero(), double M = 1.0);
/// tanh(x_1).
FunctionField step(int dim);
/// |x|^2 phibar(x / 2).
FunctionField quad_window(int dim);

FunctionField sum(const FunctionField& f, const FunctionField& g);
FunctionField product(const FunctionField& f, const FunctionField& g);
FunctionField scale(const FunctionField& f, double c);
/// x -> f(x + a).
FunctionField translate(const FunctionField& f, const Point& a);

/// The fixed named corpus for dimension d.
std::vector<FunctionField> corpus(int dim = 1);
/// Corpus member by id; throws InvalidArgument for unknown ids.
FunctionField corpus_member(const std::string& id, int dim = 1);

/// values[i] = f(x_i) at lattice points x_i in [0, P)^d.
SampledField sample(const FunctionField& f, const GridSpec& grid);
/// Samples f translated so that the origin of f sits at the torus center.
SampledField sample_centered(const FunctionField& f, const GridSpec& grid);

}  // namespace slk
