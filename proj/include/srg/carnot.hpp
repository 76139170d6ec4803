#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srg/ccdist.hpp"
#include "srg/nilpotent.hpp"

namespace srg {

struct GroupLaw {
  std::size_t dim = 0;
  Grading grading;
  int step = 2;
  std::function<Point(const Point&, const Point&)> compose;
  std::function<Point(const Point&)> inverse;
  /// Exact polynomial forms when the law came from flows: compose_poly in
  /// variables (x_1..x_n, y_1..y_n), inverse_poly in x.
  std::optional<std::vector<Polynomial>> compose_poly, inverse_poly;
  /// Exponential coordinates of the first kind: exp_poly(a) = flow of sum a_k B_k from 0 at time 1,
  /// log_poly its inverse; basis[k] = B_k.
  std::optional<std::vector<Polynomial>> exp_poly, log_poly;
  std::vector<PolyVectorField> basis;

  Point operator()(const Point& x, const Point& y) const { return compose(x, y); }
};

/// x * y = Phi_1^W (Phi_1^V (0)) with Phi_1^V(0) = x, Phi_1^W(0) = y, flows
/// of the truncated frame integrated exactly (Picard iteration).
/// Throws IsotropyNotVerified when dim Lie{hat X} != n, PreconditionError
/// when the step exceeds 2.
GroupLaw group_law_from_flows(const NilpotentApprox& na);

/// Bilinear part of the vertical coordinates of x * y: for each weight-2
/// coordinate k, bilinear[k](i, j) is the coefficient of x_i y_j over the
/// weight-1 coordinates i, j.
struct StructureConstants {
  std::vector<int> first_layer, second_layer;
  std::vector<Eigen::MatrixXd> bilinear;
};
StructureConstants structure_constants(const GroupLaw& law);

struct InvarianceReport {
  bool pass = false;
  double max_error = 0.0;
  int witness_field = -1;
  Point witness_x, witness_y;
  std::string message;
};

/// Central-difference pushforward of hat X_i through l_x compared with
/// hat X_i(x * y) at random pairs in [-1, 1]^n.
InvarianceReport left_invariance_check(const GroupLaw& law, const NilpotentApprox& na, int pairs = 20,
                                       std::uint64_t seed = 7, double tol = 1e-6, double h = 1e-4);

/// F = {z : <z_h, w> > 0}, w the weight-1 components of sum nu_i hat X_i(0).
struct VerticalHalfspace {
  Eigen::VectorXd normal;  // nu, unit m-vector
  Point w;                 // zero on coordinates of weight >= 2
  Polynomial level;        // -<z_h, w>: F = {level < 0}

  double signed_level(std::span<const double> z) const;
  bool contains(std::span<const double> z) const { return signed_level(z) < 0.0; }
  bool contains(const Point& z) const { return contains(std::span<const double>(z.data(), z.size())); }
};

/// Throws DegenerateNormal when sum nu_i hat X_i(0) = 0, InvalidInput when |nu| != 1.
VerticalHalfspace vertical_halfspace(const Eigen::VectorXd& nu, const NilpotentApprox& na);

struct HalfspaceDensity {
  double perimeter = 0.0;  // ||D 1_F|| (hat B_1)
  double volume = 0.0;     // Leb(hat B_1)
  double ratio = 0.0;
  std::size_t unknown_samples = 0;
};

/// Surface integral over the hyperplane dF inside the ball of
/// |(<hat X_1, n>, ..., <hat X_m, n>)|, midpoint rule on a plane grid
/// (plane_resolution per axis, default 4x the ball grid).
HalfspaceDensity halfspace_perimeter_unit_ball(const VerticalHalfspace& F, const NilpotentApprox& na,
                                               const BallMask& ball, int plane_resolution = 0);
HalfspaceDensity halfspace_perimeter_unit_ball(const VerticalHalfspace& F, const NilpotentApprox& na,
                                               const BallMaskOptions& opts = {}, int plane_resolution = 0);

}  // namespace srg
