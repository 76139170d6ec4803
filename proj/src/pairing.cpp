#include "srg/pairing.hpp"

#include <cmath>

#include "srg/errors.hpp"
#include "srg/numeric.hpp"

namespace srg {

std::size_t CellRange::count() const {
  std::size_t c = 1;
  for (std::size_t a = 0; a < lo.size(); ++a) c *= static_cast<std::size_t>(std::max(0, hi[a] - lo[a]));
  return c;
}

std::size_t CellRange::linear(const Grid& g, std::size_t k) const {
  std::size_t lin = 0;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    const auto w = static_cast<std::size_t>(hi[a] - lo[a]);
    lin += (lo[a] + k % w) * g.stride(a);
    k /= w;
  }
  return lin;
}

CellRange cells_in_box(const Grid& g, const Box& box) {
  CellRange r;
  for (std::size_t a = 0; a < g.dim(); ++a) {
    // centers at lo + (k + 1/2) h
    const int lo = static_cast<int>(std::ceil(g.fractional_index(a, box.lo[a]) - 0.5));
    const int hi = static_cast<int>(std::floor(g.fractional_index(a, box.hi[a]) - 0.5)) + 1;
    r.lo.push_back(std::clamp(lo, 0, g.resolution()[a]));
    r.hi.push_back(std::clamp(hi, 0, g.resolution()[a]));
  }
  return r;
}

double pair_distributional(const PolyVectorField& X, const GridFunction& u, const TestFunction& phi,
                           const VolumeWeight& weight, Exec exec) {
  const Grid& g = u.grid;
  const std::size_t n = g.dim();
  if (X.dim() != n || phi.dim() != n) throw InvalidInput("pairing inputs disagree on dimension");
  const Box supp = phi.support();
  for (std::size_t a = 0; a < n; ++a)
    if (!(supp.lo[a] > g.box().lo[a] && supp.hi[a] < g.box().hi[a]))
      throw PreconditionError("test function support touches the grid boundary");
  const NumericFrame F(X, weight);
  const CellRange cells = cells_in_box(g, supp);
  const double dv = g.cell_volume();
  return -chunked_sum(
      cells.count(),
      [&](std::size_t k) {
        const std::size_t lin = cells.linear(g, k);
        const double uv = u.values[lin];
        if (uv == 0.0) return 0.0;
        double x[16], grad[16], v[16];
        g.center(lin, std::span<double>(x, n));
        const double p = phi.value(std::span<const double>(x, n));
        phi.gradient(std::span<const double>(x, n), std::span<double>(grad, n));
        F.eval(x, v);
        double xphi = 0.0;
        for (std::size_t j = 0; j < n; ++j) xphi += v[j] * grad[j];
        return uv * (p * F.divergence(0, x) + xphi) * F.weight(x) * dv;
      },
      exec);
}

}  // namespace srg
