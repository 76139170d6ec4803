#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "srg/vector_field.hpp"

namespace srg {

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  Point lo;
  Point hi;

  Box() = default;
  Box(Point lo_, Point hi_);
  static Box cube(std::size_t dim, double half_width);
  static Box cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return static_cast<std::size_t>(lo.size()); }
  bool contains(std::span<const double> x) const;
  /// Each side grows by `margin` in both directions.
  Box expanded(double margin) const;
  double volume() const;
};

/// Cell-centered regular grid over a box.
class Grid {
 public:
  Grid() = default;
  Grid(Box box, std::vector<int> resolution);
  Grid(Box box, int resolution_per_axis);

  const Box& box() const { return box_; }
  std::size_t dim() const { return box_.dim(); }
  const std::vector<int>& resolution() const { return res_; }
  std::size_t size() const { return size_; }
  double spacing(std::size_t axis) const { return h_[axis]; }
  double min_spacing() const;
  double cell_volume() const { return cell_volume_; }

  /// Linear index <-> multi-index, axis 0 fastest.
  std::size_t linear(std::span<const int> idx) const;
  void unravel(std::size_t lin, std::span<int> idx) const;
  void center(std::size_t lin, std::span<double> x) const;
  Point center(std::size_t lin) const;
  std::size_t stride(std::size_t axis) const { return stride_[axis]; }
  /// Cell containing x, clamped to the grid.
  std::size_t locate(std::span<const double> x) const;
  /// Continuous index coordinate of x along an axis (cell centers at k + 0.5).
  double fractional_index(std::size_t axis, double x) const;

 private:
  Box box_;
  std::vector<int> res_;
  std::vector<double> h_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Values sampled at the cell centers of a grid.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
  static GridFunction sample(const Grid& g, const std::function<double(std::span<const double>)>& f);
};

/// Smooth compactly supported test function with analytic gradient.
class TestFunction {
 public:
  virtual ~TestFunction() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
  /// Closed box outside of which the function vanishes.
  virtual Box support() const = 0;
  /// True when the function is nonnegative everywhere by construction.
  virtual bool nonnegative() const { return false; }
};

/// prod_j (1 - ((z_j - c_j)/s_j)^2)_+^2 : a C^1 polynomial bump.
class PolynomialBump final : public TestFunction {
 public:
  PolynomialBump(Point center, Point half_widths, double scale = 1.0);
  std::size_t dim() const override { return static_cast<std::size_t>(center_.size()); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  Box support() const override;
  bool nonnegative() const override { return scale_ >= 0.0; }

 private:
  Point center_, half_;
  double scale_;
};

/// exp(-1 / (1 - |(x - c)/s|^2)) : the standard C^infinity bump.
class SmoothBump final : public TestFunction {
 public:
  SmoothBump(Point center, double radius, double scale = 1.0);
  std::size_t dim() const override { return static_cast<std::size_t>(center_.size()); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  Box support() const override;
  bool nonnegative() const override { return scale_ >= 0.0; }

 private:
  Point center_;
  double radius_;
  double scale_;
};

}  // namespace srg
