#pragma once

#include <optional>

#include "srg/grid.hpp"
#include "srg/numeric.hpp"

namespace srg {

struct FlowResult {
  Point endpoint;
  double jacobian = 1.0;  // J Phi_t at the start point, via Liouville
  int steps = 0;
};

struct FlowOptions {
  /// 0 selects the adaptive rule (see default_flow_steps).
  int steps = 0;
  std::optional<Box> safety_box;
  VolumeWeight weight;
};

/// max(64, ceil(|t| * 256)).
int default_flow_steps(double t);

/// Fixed-step RK4 flow of X from x0 for time t, with log J integrated alongside.
FlowResult flow(const PolyVectorField& X, const Point& x0, double t, int steps,
                const std::optional<Box>& safety_box = std::nullopt, const VolumeWeight& weight = std::nullopt);

/// steps == 0: start at default_flow_steps(t) and double until two successive
/// endpoints agree to 1e-9 in max norm (at most 2^20 steps).
FlowResult flow(const PolyVectorField& X, const Point& x0, double t, const FlowOptions& opts = {});

/// In-place RK4 integration of y' = sum_i c_i X_i(y) on a compiled frame.
/// Returns false if the trajectory leaves `box` (x holds the last inside
/// point and *exit_time the time reached). logjac may be null.
bool rk4_integrate(const NumericFrame& F, std::span<const double> c, double* x, double t, int steps,
                   double* logjac = nullptr, const Box* box = nullptr, double* exit_time = nullptr);

}  // namespace srg
