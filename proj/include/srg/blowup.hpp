#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srg/carnot.hpp"
#include "srg/perimeter.hpp"

namespace srg {

/// {phi(p + delta_r z) < 0} on `window` (default: E's box). Exact composition.
SetRep rescale_set(const SetRep& E, const Point& p, const Grading& g, const Rational& r,
                   const std::optional<Box>& window = std::nullopt);

/// Volume of the symmetric difference inside `window`: sum over voxels of
/// |o_A - o_B| with anti-aliased occupancies o.
double l1_gap(const SetRep& A, const SetRep& B, const Box& window, int resolution, Exec exec = Exec::Parallel);

/// int u div(psi X) dz for an occupancy grid u: minus the distributional
/// pairing <D_X u, psi>. Non-positive along monotone directions.
/// Throws InvalidInput unless psi is nonnegative.
double monotonicity_pairing(const GridFunction& u, const PolyVectorField& X, const TestFunction& psi,
                            Exec exec = Exec::Parallel);

/// Occupancy of E sampled on the cell centers of g.
GridFunction occupancy_grid(const SetRep& E, const Grid& g, Exec exec = Exec::Parallel);

/// B_r as delta_r B_1 for a ball of a dilation-homogeneous structure centered at 0.
BallMask dilate_ball(const BallMask& unit, const Grading& g, double r);

struct BumpSpec {
  Point center, half_widths;
};

struct BlowupOptions {
  std::vector<Rational> radii{Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 16)};
  std::optional<Box> window;  // default {|z_j| <= 1}
  int resolution = 128;
  std::vector<BumpSpec> bumps;  // default: half-width 1/2 at 0, 0.3 e_2, 0.3 e_3 (clipped to n)
  bool density = true;
  BallMaskOptions ball;
  Exec exec = Exec::Parallel;
};

struct BlowupReport {
  Point p;
  Eigen::VectorXd nu;              // dual normal at p
  VerticalHalfspace F;             // predicted limit
  Box window;
  double window_volume = 0.0;
  std::vector<double> radii;
  std::vector<double> l1_gap;
  std::vector<std::vector<double>> monotone_pairings;                 // [radius][bump]
  std::vector<std::vector<std::vector<double>>> invariance_pairings;  // [radius][direction][bump]
  std::vector<double> limit_monotone;                                 // same pairings on F
  std::vector<std::vector<double>> limit_invariance;
  std::vector<double> density_lhs;  // NaN where the radius was dropped
  double density_rhs = 0.0;
  std::vector<double> dropped_radii;
  bool homogeneous = false;  // balls obtained by dilating B_1
  std::vector<std::string> notes;
};

/// Blowup of E at p = 0 (privileged coordinates). Throws CharacteristicPoint
/// at characteristic points, InvalidInput off the boundary, and the errors of
/// truncate / group_law_from_flows when the tangent is not a step-2 group.
BlowupReport blowup_run(const SubRiemannianStructure& S, const SetRep& E, const Point& p,
                        const BlowupOptions& opts = {});

}  // namespace srg
