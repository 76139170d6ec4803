#include "srg/grid.hpp"

#include <algorithm>
#include <cmath>

#include "srg/errors.hpp"

namespace srg {

Box::Box(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw InvalidInput("box corners disagree on dimension");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw InvalidInput("box must have positive extent on every axis");
}

Box Box::cube(std::size_t dim, double half_width) { return cube(dim, -half_width, half_width); }

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box(Point::Constant(static_cast<Eigen::Index>(dim), lo), Point::Constant(static_cast<Eigen::Index>(dim), hi));
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

Box Box::expanded(double margin) const {
  return Box(lo.array() - margin, hi.array() + margin);
}

double Box::volume() const { return (hi - lo).prod(); }

Grid::Grid(Box box, int resolution_per_axis)
    : Grid(box, std::vector<int>(box.dim(), resolution_per_axis)) {}

Grid::Grid(Box box, std::vector<int> resolution) : box_(std::move(box)), res_(std::move(resolution)) {
  if (res_.size() != box_.dim()) throw InvalidInput("grid resolution must list one entry per axis");
  h_.resize(res_.size());
  stride_.resize(res_.size());
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < res_.size(); ++a) {
    if (res_[a] < 1) throw InvalidInput("grid resolution must be positive");
    h_[a] = (box_.hi[a] - box_.lo[a]) / res_[a];
    stride_[a] = size_;
    size_ *= static_cast<std::size_t>(res_[a]);
    cell_volume_ *= h_[a];
  }
}

double Grid::min_spacing() const { return *std::min_element(h_.begin(), h_.end()); }

std::size_t Grid::linear(std::span<const int> idx) const {
  std::size_t lin = 0;
  for (std::size_t a = 0; a < res_.size(); ++a) lin += static_cast<std::size_t>(idx[a]) * stride_[a];
  return lin;
}

void Grid::unravel(std::size_t lin, std::span<int> idx) const {
  for (std::size_t a = 0; a < res_.size(); ++a) {
    idx[a] = static_cast<int>(lin % static_cast<std::size_t>(res_[a]));
    lin /= static_cast<std::size_t>(res_[a]);
  }
}

void Grid::center(std::size_t lin, std::span<double> x) const {
  for (std::size_t a = 0; a < res_.size(); ++a) {
    const auto k = lin % static_cast<std::size_t>(res_[a]);
    lin /= static_cast<std::size_t>(res_[a]);
    x[a] = box_.lo[a] + (static_cast<double>(k) + 0.5) * h_[a];
  }
}

Point Grid::center(std::size_t lin) const {
  Point x(static_cast<Eigen::Index>(dim()));
  center(lin, std::span<double>(x.data(), dim()));
  return x;
}

double Grid::fractional_index(std::size_t axis, double x) const { return (x - box_.lo[axis]) / h_[axis]; }

std::size_t Grid::locate(std::span<const double> x) const {
  std::size_t lin = 0;
  for (std::size_t a = 0; a < res_.size(); ++a) {
    int k = static_cast<int>(std::floor(fractional_index(a, x[a])));
    k = std::clamp(k, 0, res_[a] - 1);
    lin += static_cast<std::size_t>(k) * stride_[a];
  }
  return lin;
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(std::span<const double>)>& f) {
  GridFunction u(g);
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.center(i, x);
    u.values[i] = f(x);
  }
  return u;
}

PolynomialBump::PolynomialBump(Point center, Point half_widths, double scale)
    : center_(std::move(center)), half_(std::move(half_widths)), scale_(scale) {
  if (center_.size() != half_.size()) throw InvalidInput("bump center and widths disagree on dimension");
  if ((half_.array() <= 0.0).any()) throw InvalidInput("bump widths must be positive");
}

double PolynomialBump::value(std::span<const double> x) const {
  double v = scale_;
  for (Eigen::Index j = 0; j < center_.size(); ++j) {
    const double t = (x[j] - center_[j]) / half_[j];
    if (std::abs(t) >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    v *= q * q;
  }
  return v;
}

void PolynomialBump::gradient(std::span<const double> x, std::span<double> g) const {
  const auto n = center_.size();
  std::vector<double> f(static_cast<std::size_t>(n)), df(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = (x[j] - center_[j]) / half_[j];
    if (std::abs(t) >= 1.0) {
      std::fill(g.begin(), g.begin() + n, 0.0);
      return;
    }
    const double q = 1.0 - t * t;
    f[j] = q * q;
    df[j] = 2.0 * q * (-2.0 * t) / half_[j];
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double p = scale_ * df[j];
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) p *= f[k];
    g[j] = p;
  }
}

Box PolynomialBump::support() const { return Box(center_ - half_, center_ + half_); }

SmoothBump::SmoothBump(Point center, double radius, double scale)
    : center_(std::move(center)), radius_(radius), scale_(scale) {
  if (radius_ <= 0.0) throw InvalidInput("bump radius must be positive");
}

double SmoothBump::value(std::span<const double> x) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < center_.size(); ++j) {
    const double t = (x[j] - center_[j]) / radius_;
    s += t * t;
  }
  if (s >= 1.0) return 0.0;
  return scale_ * std::exp(-1.0 / (1.0 - s));
}

void SmoothBump::gradient(std::span<const double> x, std::span<double> g) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < center_.size(); ++j) {
    const double t = (x[j] - center_[j]) / radius_;
    s += t * t;
  }
  if (s >= 1.0) {
    std::fill(g.begin(), g.begin() + center_.size(), 0.0);
    return;
  }
  const double q = 1.0 - s;
  const double v = scale_ * std::exp(-1.0 / q);
  // d/dx_j exp(-1/(1-s)) = exp(.) * (-1/q^2) * ds/dx_j
  for (Eigen::Index j = 0; j < center_.size(); ++j) {
    const double dsdx = 2.0 * (x[j] - center_[j]) / (radius_ * radius_);
    g[j] = -v * dsdx / (q * q);
  }
}

Box SmoothBump::support() const {
  return Box(center_.array() - radius_, center_.array() + radius_);
}

}  // namespace srg
