#pragma once

#include "srg/structure.hpp"

namespace srg {

/// G_x(v) = min { |c|^2 : sum_i c_i X_i(x) = v }, +infinity when v is not in
/// the span. The infinite case is a tag; `value` is then meaningless.
struct MetricEval {
  bool finite = false;
  double value = 0.0;
  Eigen::VectorXd controls;  // P_x(v), set only when finite
  double residual = 0.0;     // |F c - v| of the least-squares solution
};

inline constexpr double kDefaultSpanTol = 1e-8;

/// Minimum-norm least squares with singular values below 1e-12 sigma_max
/// dropped; +infinity when the residual exceeds span_tol * |v|.
MetricEval quadratic_form(const SubRiemannianStructure& S, const Point& x, const Point& v,
                          double span_tol = kDefaultSpanTol);
MetricEval quadratic_form(const Eigen::MatrixXd& frame_at_x, const Point& v, double span_tol = kDefaultSpanTol);

/// P_x(v); throws InfiniteForm when v is not in the span.
Eigen::VectorXd min_norm_controls(const SubRiemannianStructure& S, const Point& x, const Point& v,
                                  double span_tol = kDefaultSpanTol);

/// g_x(v, w) = <P_x v, P_x w>.
double scalar_product(const SubRiemannianStructure& S, const Point& x, const Point& v, const Point& w,
                      double span_tol = kDefaultSpanTol);

/// Orthonormal basis (columns) of the kernel of the frame matrix at x.
Eigen::MatrixXd frame_kernel(const SubRiemannianStructure& S, const Point& x);

}  // namespace srg
