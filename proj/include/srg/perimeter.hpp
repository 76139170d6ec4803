#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srg/ccdist.hpp"
#include "srg/grid.hpp"
#include "srg/kernels.hpp"
#include "srg/structure.hpp"

namespace srg {

/// E = {level < 0} inside an axis-aligned box.
struct SetRep {
  Polynomial level;
  Box box;
  int resolution = 128;
  double grad_floor = 1e-8;

  SetRep() = default;
  SetRep(Polynomial level_, Box box_, int resolution_ = 128);

  std::size_t dim() const { return level.dim(); }
  double value(std::span<const double> x) const;
  /// Returns |grad phi|.
  double gradient(std::span<const double> x, std::span<double> g) const;
  bool contains(std::span<const double> x) const { return value(x) < 0.0; }
};

/// Integration region: a box, optionally cut by a mask (e.g. a ball).
/// The mask returns +1 inside, -1 outside, 0 unknown (treated as outside and counted).
struct Region {
  Box box;
  std::function<int(std::span<const double>)> mask;

  static Region of(const Box& b) { return Region{b, {}}; }
  static Region of(const BallMask& ball);
};

enum class Estimator { Surface, Flow, Mollified };
std::string to_string(Estimator e);

struct PerimeterReport {
  Estimator estimator = Estimator::Surface;
  std::vector<double> per_field;            // D_{X_i} 1_E (region), signed
  std::vector<double> per_field_variation;  // |D_{X_i} 1_E| (region)
  double total_variation = 0.0;             // ||D 1_E|| (region)
  std::vector<int> resolution;
  std::vector<double> schedule;             // t or eps values
  std::vector<double> raw_total;            // total variation per schedule entry
  std::size_t facets = 0;
  std::size_t masked_unknown = 0;
};

/// Marching triangles (n = 2) / tetrahedra (n = 3) on the node grid of the
/// region, Gauss quadrature per facet with the exact normal at
/// Newton-projected points. n >= 4 uses a smeared delta on voxel centers.
/// Signs use the inner normal -grad phi / |grad phi|.
PerimeterReport surface_estimator(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                                  Exec exec = Exec::Parallel);

/// Visits every boundary quadrature point: (point, inner unit normal, dA * weight).
void boundary_quadrature(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                         const std::function<void(std::span<const double>, std::span<const double>, double)>& visit);

struct FlowEstimate {
  double value = 0.0;  // extrapolated |D_X 1_E| (region)
  std::vector<double> t, raw;
};

/// int_region |o(Phi_t x) - o(x)| / |t| dw, o the anti-aliased occupancy,
/// linear least-squares extrapolation to t = 0. Empty schedule: {8h, 4h, 2h}.
FlowEstimate flow_estimator(const SubRiemannianStructure& S, const SetRep& E, const PolyVectorField& X,
                            const Region& region, std::vector<double> t_schedule = {}, Exec exec = Exec::Parallel);

/// flow_estimator on every frame field. Fills per_field_variation only;
/// total_variation is NaN (per-field variations do not determine it).
PerimeterReport flow_report(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                            std::vector<double> t_schedule = {}, Exec exec = Exec::Parallel);

/// Anti-aliased indicator of E convolved with a separable C^infinity kernel of
/// radius eps, frame derivatives by central differences. Empty schedule:
/// {8h, 6h, 4h}; eps below two voxel widths is rejected.
PerimeterReport mollified_estimator(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                                    std::vector<double> eps_schedule = {}, Exec exec = Exec::Parallel);

/// Fractional occupancy of the voxel around x: clamp(1/2 - phi / (|grad phi| sum_a |n_a| h_a), 0, 1).
double occupancy(const SetRep& E, std::span<const double> x, std::span<const double> h);

/// nu*_E(x) = N/|N|, N_i = <X_i(x), -grad phi / |grad phi|>. Throws
/// CharacteristicPoint when N = 0, InvalidInput when x is not on the boundary.
Eigen::VectorXd dual_normal(const SubRiemannianStructure& S, const SetRep& E, const Point& x);

struct GeometricNormal {
  Point vector;       // sum nu*_i X_i(x)
  double G = 0.0;     // quadratic form of the vector
  bool unit = false;  // |G - 1| <= 1e-6
};
GeometricNormal geometric_normal(const SubRiemannianStructure& S, const SetRep& E, const Point& x);

/// Random boundary points: uniform samples in the box pushed onto {phi = 0}
/// by Newton steps along the gradient; points leaving the box are dropped.
std::vector<Point> sample_boundary(const SetRep& E, int count, std::uint64_t seed);

struct ReducedBoundaryScore {
  std::vector<double> radii, score, perimeter;
};
/// Mean squared oscillation of nu* around nu*(p) over B_r(p), weighted by ||D 1_E||.
ReducedBoundaryScore reduced_boundary_score(const SubRiemannianStructure& S, const SetRep& E, const Point& p,
                                            const std::vector<double>& radii, const BallMaskOptions& ball = {});

struct DensityRatio {
  double ratio = 0.0;      // ||D 1_E||(B_r) / (m(B_r) / r)
  double perimeter = 0.0;
  double measure = 0.0;
  std::size_t unknown_voxels = 0;
};
DensityRatio density_ratio(const SubRiemannianStructure& S, const SetRep& E, const Point& p, double r,
                           const BallMaskOptions& ball = {});
DensityRatio density_ratio(const SubRiemannianStructure& S, const SetRep& E, const BallMask& ball);

}  // namespace srg
