#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srg/grid.hpp"
#include "srg/kernels.hpp"
#include "srg/nilpotent.hpp"
#include "srg/numeric.hpp"
#include "srg/structure.hpp"

namespace srg {

/// Piecewise-constant control on N equal subintervals of [0, 1].
struct ControlPath {
  Eigen::MatrixXd controls;       // m x N
  std::vector<Point> trajectory;  // N + 1 points
  double action = 0.0;            // (1/N) sum_k |c_k|^2
  double endpoint_gap = 0.0;      // |trajectory.back() - target|

  int segments() const { return static_cast<int>(controls.cols()); }
};

struct DistanceOptions {
  int initial_segments = 16;
  int max_segments = 256;
  int substeps = 4;  // RK4 steps per control segment
  double refine_tol = 0.005;
  std::vector<double> penalties{1e2, 1e3, 1e4, 1e5};
  int restarts = 8;
  double endpoint_tol = 1e-4;
  int max_iterations = 1000;  // per penalty level
  std::uint64_t seed = 0;
  /// Optional initial controls (any segment count; resampled).
  std::optional<Eigen::MatrixXd> warm_start;
  /// Skip the Hormander check at x (callers that already ran it).
  bool skip_precondition = false;
  Exec exec = Exec::Parallel;
};

struct DistanceResult {
  double value = 0.0;  // sqrt of the action of the best path
  ControlPath path;
  int restarts_used = 0;
  bool converged = false;
  std::vector<double> refinement_values;  // value after each segment doubling
};

/// Integrates the controls from x with `substeps` RK4 steps per segment.
ControlPath integrate_controls(const NumericFrame& F, const Point& x, const Eigen::MatrixXd& controls, int substeps,
                               const Point* target = nullptr);

/// Penalised action J = action + mu |gamma(1) - y|^2 and its exact gradient
/// with respect to the controls (adjoint of the discrete RK4 scheme).
double penalized_action(const NumericFrame& F, const Point& x, const Point& y, const Eigen::MatrixXd& controls,
                        double mu, int substeps, Eigen::MatrixXd* gradient = nullptr);

/// Upper bound on the CC distance by direct control discretisation.
DistanceResult distance(const SubRiemannianStructure& S, const Point& x, const Point& y,
                        const DistanceOptions& opts = {});

/// Refines a path at fixed segment count: runs the last penalty level only.
DistanceResult polish(const NumericFrame& F, const Point& x, const Point& y, const Eigen::MatrixXd& controls,
                      const DistanceOptions& opts);

/// Resample piecewise-constant controls to N segments.
Eigen::MatrixXd resample_controls(const Eigen::MatrixXd& controls, int segments);

/// Unit control directions used by the control-graph sweep.
Eigen::MatrixXd sweep_directions(std::size_t m);

/// Breadth-first sweep over piecewise-constant unit-speed controls: each layer
/// moves every frontier state by one `step` of arc length in each direction.
/// States are pruned to one (the first) per lattice cell.
struct GraphSweepOptions {
  double step = 1.0 / 16.0;
  int max_layers = 64;
  int substeps = 2;
  Exec exec = Exec::Parallel;
};

struct GraphSweep {
  Point origin;             // lattice origin
  Point cell;               // lattice spacing per axis
  Eigen::MatrixXd dirs;     // m x D
  double step = 0.0;
  std::vector<Point> state;
  std::vector<int> layer;   // cost = layer * step
  std::vector<int> parent;  // -1 for the root
  std::vector<int> move;    // column of dirs

  double cost(std::size_t i) const { return layer[i] * step; }
  /// The tree path to state i as constant-speed controls on layer[i] segments.
  Eigen::MatrixXd controls_to(std::size_t i) const;
};

/// `bound` (optional) discards states leaving the box.
GraphSweep control_graph_sweep(const NumericFrame& F, const Point& x, const Point& origin, const Point& cell,
                               const std::optional<Box>& bound, const GraphSweepOptions& opts);

enum class VoxelState : std::uint8_t { Outside = 0, Inside = 1, Unknown = 2 };

struct BallMaskOptions {
  int resolution = 48;
  std::optional<Box> box;  // default: fitted from a coarse sweep
  DistanceOptions solver = [] {
    DistanceOptions o;
    o.initial_segments = 16;
    o.max_segments = 32;
    o.restarts = 1;
    o.skip_precondition = true;
    o.exec = Exec::Serial;
    return o;
  }();
  Exec exec = Exec::Parallel;
};

struct BallMask {
  Grid grid;
  Point center;
  double radius = 0.0;
  std::vector<VoxelState> state;
  std::vector<double> dist;  // solver value where refined, sweep cost otherwise
  std::vector<char> refined;
  std::size_t unknown_count = 0, refined_count = 0;

  std::size_t inside_count() const;
  double volume() const { return static_cast<double>(inside_count()) * grid.cell_volume(); }
  /// +1 inside, -1 outside, 0 unknown, by multilinear interpolation of
  /// (distance - radius) between voxel centers.
  int contains(std::span<const double> x) const;
  int contains(const Point& x) const { return contains(std::span<const double>(x.data(), x.size())); }
};

/// Voxels of the grid whose centers satisfy distance(p, center) < r.
BallMask ball_mask(const SubRiemannianStructure& S, const Point& p, double r, const BallMaskOptions& opts = {});

struct TangentConvergenceOptions {
  double R = 1.0;
  std::vector<Rational> eps{Rational(1, 2), Rational(1, 4), Rational(1, 8)};
  int pairs = 20;
  std::uint64_t seed = 1;
  DistanceOptions solver;
};

struct TangentConvergenceReport {
  std::vector<double> eps;
  std::vector<double> sup_gap;             // per eps, over included pairs
  std::vector<std::vector<double>> gaps;   // [eps][pair]
  std::vector<Point> xs, ys;
  std::vector<double> d_hat;
  std::vector<int> excluded;               // pairs dropped for non-convergence
  /// The sup is taken over sampled pairs: a lower bound on the true sup.
  bool sup_is_sampled = true;
};

/// sup |d_eps - d_hat| over pairs sampled in the weighted box
/// {|z_j| <= R^{w_j}}, with X^eps = eps (delta_{1/eps})_* X.
TangentConvergenceReport tangent_convergence(const SubRiemannianStructure& S, const Grading& g,
                                             const TangentConvergenceOptions& opts = {});

}  // namespace srg
