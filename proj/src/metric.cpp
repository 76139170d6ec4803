#include "srg/metric.hpp"

#include <Eigen/SVD>

#include "srg/errors.hpp"

namespace srg {

namespace {
constexpr double kPinvCutoff = 1e-12;
}

MetricEval quadratic_form(const Eigen::MatrixXd& F, const Point& v, double span_tol) {
  if (F.rows() != v.size()) throw InvalidInput("vector has the wrong dimension");
  if (!(span_tol > 0.0)) throw InvalidInput("span tolerance must be positive");
  MetricEval r;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(F.cols());
  if (smax > 0.0) {
    const Eigen::VectorXd utv = svd.matrixU().transpose() * v;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s[k] > kPinvCutoff * smax) c += (utv[k] / s[k]) * svd.matrixV().col(k);
  }
  r.residual = (F * c - v).norm();
  r.finite = r.residual <= span_tol * v.norm();
  if (r.finite) {
    r.controls = c;
    r.value = c.squaredNorm();
  }
  return r;
}

MetricEval quadratic_form(const SubRiemannianStructure& S, const Point& x, const Point& v, double span_tol) {
  if (static_cast<std::size_t>(x.size()) != S.dim) throw InvalidInput("point has the wrong dimension");
  return quadratic_form(S.frame_matrix(x), v, span_tol);
}

Eigen::VectorXd min_norm_controls(const SubRiemannianStructure& S, const Point& x, const Point& v, double span_tol) {
  MetricEval r = quadratic_form(S, x, v, span_tol);
  if (!r.finite) throw InfiniteForm("vector is not in the span of the frame (residual " + std::to_string(r.residual) + ")");
  return r.controls;
}

double scalar_product(const SubRiemannianStructure& S, const Point& x, const Point& v, const Point& w,
                      double span_tol) {
  const Eigen::MatrixXd F = S.frame_matrix(x);
  const MetricEval a = quadratic_form(F, v, span_tol);
  const MetricEval b = quadratic_form(F, w, span_tol);
  if (!a.finite || !b.finite) throw InfiniteForm("argument is not in the span of the frame");
  return a.controls.dot(b.controls);
}

Eigen::MatrixXd frame_kernel(const SubRiemannianStructure& S, const Point& x) {
  const Eigen::MatrixXd F = S.frame_matrix(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > kPinvCutoff * smax && smax > 0.0) ++rank;
  return svd.matrixV().rightCols(F.cols() - rank);
}

}  // namespace srg
