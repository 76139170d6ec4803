#pragma once

#include "srg/grid.hpp"
#include "srg/kernels.hpp"

namespace srg {

/// <D_X u, phi> = -int u phi div_omega X omega - int u (X phi) omega, by
/// midpoint quadrature on the grid of u. phi's support must lie strictly
/// inside the grid box.
double pair_distributional(const PolyVectorField& X, const GridFunction& u, const TestFunction& phi,
                           const VolumeWeight& weight = std::nullopt, Exec exec = Exec::Parallel);

/// Cells of g whose centers lie in `box`, as per-axis index ranges [lo, hi).
struct CellRange {
  std::vector<int> lo, hi;
  std::size_t count() const;
  /// k-th cell of the range (axis 0 fastest) as a linear grid index.
  std::size_t linear(const Grid& g, std::size_t k) const;
};
CellRange cells_in_box(const Grid& g, const Box& box);

}  // namespace srg
