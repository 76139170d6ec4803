#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "srg/expr.hpp"
#include "srg/polynomial.hpp"

namespace srg {

using Point = Eigen::VectorXd;

/// Vector field sum_j coeffs[j] * d_j on R^n with polynomial coefficients.
class PolyVectorField {
 public:
  explicit PolyVectorField(std::size_t dim = 0);
  explicit PolyVectorField(std::vector<Polynomial> coeffs);

  static PolyVectorField zero(std::size_t dim) { return PolyVectorField(dim); }
  /// The coordinate field d_{j+1}.
  static PolyVectorField coordinate(std::size_t dim, std::size_t j);

  std::size_t dim() const { return coeffs_.size(); }
  const Polynomial& operator[](std::size_t j) const { return coeffs_[j]; }
  const std::vector<Polynomial>& coeffs() const { return coeffs_; }
  bool is_zero() const;

  /// Directional derivative X f = sum_i X_i d_i f.
  Polynomial apply(const Polynomial& f) const;
  Point evaluate(std::span<const double> x) const;
  std::vector<Rational> evaluate(std::span<const Rational> x) const;

  PolyVectorField& operator+=(const PolyVectorField& o);
  PolyVectorField& operator-=(const PolyVectorField& o);
  PolyVectorField& operator*=(const Rational& c);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
  friend PolyVectorField operator*(const Rational& c, PolyVectorField a) { return a *= c; }
  /// Multiplication by a scalar polynomial.
  friend PolyVectorField operator*(const Polynomial& f, const PolyVectorField& a);
  PolyVectorField operator-() const;
  bool operator==(const PolyVectorField& o) const { return coeffs_ == o.coeffs_; }

 private:
  std::vector<Polynomial> coeffs_;
};

/// Vector field with analytic (sin/cos/polynomial) coefficients.
class AnalyticField {
 public:
  explicit AnalyticField(std::vector<Expr> coeffs) : coeffs_(std::move(coeffs)) {}
  static AnalyticField from_polynomial(const PolyVectorField& X);

  std::size_t dim() const { return coeffs_.size(); }
  const Expr& operator[](std::size_t j) const { return coeffs_[j]; }
  Expr apply(const Expr& f) const;
  Point evaluate(std::span<const double> x) const;

 private:
  std::vector<Expr> coeffs_;
};

/// A frame member: exact polynomial field or analytic field.
using FrameField = std::variant<PolyVectorField, AnalyticField>;

std::size_t field_dim(const FrameField& f);
Point evaluate(const FrameField& f, std::span<const double> x);

/// [X, Y]_j = sum_i (X_i d_i Y_j - Y_i d_i X_j).
PolyVectorField lie_bracket(const PolyVectorField& X, const PolyVectorField& Y);
AnalyticField lie_bracket(const AnalyticField& X, const AnalyticField& Y);
FrameField lie_bracket(const FrameField& X, const FrameField& Y);

/// Euclidean divergence sum_i d_i X_i.
Polynomial euclidean_divergence(const PolyVectorField& X);

/// Volume density wbar of the form omega = wbar dx; empty means wbar == 1.
using VolumeWeight = std::optional<Polynomial>;

/// div_omega X = div X + X(log wbar), evaluable anywhere wbar > 0.
class WeightedDivergence {
 public:
  WeightedDivergence(Polynomial euclidean, Polynomial weight_derivative, VolumeWeight weight);

  /// Polynomial form, available when wbar == 1.
  const std::optional<Polynomial>& polynomial() const { return exact_; }
  double operator()(std::span<const double> x) const;

 private:
  Polynomial euclidean_;
  Polynomial weight_derivative_;
  VolumeWeight weight_;
  std::optional<Polynomial> exact_;
};

struct Box;

/// Divergence of X with respect to wbar dx. A nonconstant weight is sampled on
/// `box` and rejected if it is not strictly positive there.
WeightedDivergence divergence(const PolyVectorField& X, const VolumeWeight& weight = std::nullopt,
                              const Box* box = nullptr);

double evaluate_weight(const VolumeWeight& w, std::span<const double> x);

}  // namespace srg
