#include "slk/grid.hpp"

#include <cmath>

namespace slk {

GridSpec::GridSpec(int dim, int n, double period) : dim_(dim), n_(n), period_(period) {
  if (dim != 1 && dim != 2) throw InvalidArgument("GridSpec: dim must be 1 or 2");
  if (n < 16 || (n & (n - 1)) != 0) throw InvalidArgument("GridSpec: n must be a power of two >= 16");
  if (!(period > 0) || !std::isfinite(period)) throw InvalidArgument("GridSpec: period must be positive");
  spacing_ = period / n;
  size_ = (dim == 1) ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

Point GridSpec::point(std::size_t index) const {
  if (dim_ == 1) return Point(static_cast<double>(index) * spacing_, 0.0);
  const std::size_t i0 = index / n_, i1 = index % n_;
  return Point(static_cast<double>(i0) * spacing_, static_cast<double>(i1) * spacing_);
}

std::size_t GridSpec::index(long i0, long i1) const {
  const long n = n_;
  const long a = ((i0 % n) + n) % n;
  if (dim_ == 1) return static_cast<std::size_t>(a);
  const long b = ((i1 % n) + n) % n;
  return static_cast<std::size_t>(a * n + b);
}

std::size_t GridSpec::coord(std::size_t index, int axis) const {
  if (dim_ == 1) return index;
  return axis == 0 ? index / n_ : index % n_;
}

SampledField::SampledField(GridSpec grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size())
    throw InvalidArgument("SampledField: value count does not match grid");
  if (!values_.allFinite()) throw NumericalFailure("SampledField: non-finite value");
}

}  // namespace slk
