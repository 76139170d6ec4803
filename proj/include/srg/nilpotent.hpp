#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srg/structure.hpp"

namespace srg {

/// Weights w_1 = 1 <= w_2 <= ... <= w_n of privileged coordinates.
struct Grading {
  std::vector<int> weights;

  Grading() = default;
  explicit Grading(std::vector<int> w);
  std::size_t dim() const { return weights.size(); }
  int Q() const;
  int max_weight() const;
};

/// Grading read off point_flag at the origin.
Grading grading_at_origin(const SubRiemannianStructure& S, const FlagOptions& opts = {});

/// sum_k w_k alpha_k - w_j for the monomial x^alpha d_j.
int monomial_field_order(const Polynomial::Exponent& alpha, std::size_t j, const Grading& g);

/// Weighted degree sum_k w_k alpha_k of a scalar monomial.
int monomial_weight(const Polynomial::Exponent& alpha, const Grading& g);

/// Parts of X grouped by order, ascending; the zero field gives an empty list.
std::vector<std::pair<int, PolyVectorField>> homogeneous_decompose(const PolyVectorField& X, const Grading& g);

struct NilpotentApprox {
  Grading grading;
  std::vector<PolyVectorField> truncated;   // hat X_i
  std::vector<PolyVectorField> remainders;  // X_i - hat X_i
  int Q = 0;

  SubRiemannianStructure structure(const std::string& name = "nilpotent approximation") const;
};

/// Keeps the order-(-1) part of every field. Throws NotPrivileged if some
/// monomial has order below order_floor.
NilpotentApprox truncate(const SubRiemannianStructure& S, const Grading& g, int order_floor = -1);

/// (lambda^{w_1} z_1, ..., lambda^{w_n} z_n).
Point dilate(const Point& z, const Grading& g, double lambda);
double dilation_jacobian(const Grading& g, double lambda);

/// eps (delta_{1/eps})_* X: the monomial x^alpha d_j of order s is scaled by eps^{s+1}.
PolyVectorField rescale_field(const PolyVectorField& X, const Grading& g, const Rational& eps);

/// rescale_field restricted to remainders: rejects monomials of negative order.
PolyVectorField remainder_rescale(const PolyVectorField& X, const Grading& g, const Rational& r);

struct NilpotencyReport {
  bool pass = false;
  std::vector<int> witness;  // nonvanishing bracket word (frame indices), if any
  std::vector<int> growth_truncated, growth_original;
  std::string message;
};

/// Checks that every bracket of the truncated frame of length step_bound + 1
/// vanishes and, when `original` is given, that both frames have the same
/// growth vector at 0.
NilpotencyReport nilpotency_check(const NilpotentApprox& na, int step_bound,
                                  const SubRiemannianStructure* original = nullptr, const FlagOptions& opts = {});

}  // namespace srg
