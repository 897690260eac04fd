#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace slk {

/// A point of R^d for d in {1, 2}; unused trailing coordinates are zero.
using Point = Eigen::Vector2d;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic lattice on the torus [0, period)^dim with n points per axis.
class GridSpec {
 public:
  GridSpec(int dim, int n, double period);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double period() const { return period_; }
  double spacing() const { return spacing_; }
  /// n^dim.
  std::size_t size() const { return size_; }

  /// Lattice point of a flat lexicographic index (axis 0 varies slowest).
  Point point(std::size_t index) const;
  /// Flat index of integer lattice coordinates, wrapped periodically.
  std::size_t index(long i0, long i1 = 0) const;
  std::size_t coord(std::size_t index, int axis) const;

  bool operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && period_ == o.period_;
  }

 private:
  int dim_;
  int n_;
  double period_;
  double spacing_;
  std::size_t size_;
};

/// Values of a field on a GridSpec lattice.
class SampledField {
 public:
  SampledField(GridSpec grid, Eigen::VectorXd values);

  const GridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  GridSpec grid_;
  Eigen::VectorXd values_;
};

}  // namespace slk
