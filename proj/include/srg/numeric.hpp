#pragma once

#include <span>
#include <vector>

#include "srg/vector_field.hpp"

namespace srg {

/// Double-precision copy of a Polynomial laid out for fast evaluation.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  std::size_t dim() const { return dim_; }
  int max_exponent() const { return max_exp_; }
  bool is_zero() const { return coef_.empty(); }
  /// powers[k * dim + i] must hold x_i^k for k <= max_exponent().
  double evaluate_with_powers(const double* powers) const;
  double evaluate(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  int max_exp_ = 0;
  std::vector<double> coef_;
  std::vector<unsigned char> exps_;
};

/// Frame X_1..X_m compiled for repeated evaluation at many points.
/// Thread-safe: evaluation uses caller-provided or stack scratch only.
class NumericFrame {
 public:
  NumericFrame() = default;
  explicit NumericFrame(const std::vector<FrameField>& frame, const VolumeWeight& weight = std::nullopt);
  explicit NumericFrame(const PolyVectorField& X, const VolumeWeight& weight = std::nullopt)
      : NumericFrame(std::vector<FrameField>{X}, weight) {}

  std::size_t dim() const { return n_; }
  std::size_t size() const { return m_; }

  /// F is n x m column-major: column i holds X_i(x).
  void eval(const double* x, double* F) const;
  /// Also fills dF[(i * n + j) * n + k] = d (X_i)_j / d x_k.
  void eval_with_jacobian(const double* x, double* F, double* dF) const;
  /// div_omega X_i at x.
  double divergence(std::size_t i, const double* x) const;
  double weight(const double* x) const;

  Eigen::MatrixXd matrix(const Point& x) const;

 private:
  void fill_powers(const double* x, double* powers) const;

  std::size_t n_ = 0, m_ = 0;
  int max_exp_ = 0;
  bool all_poly_ = true;
  // per (field, component): polynomial or analytic
  std::vector<CompiledPolynomial> poly_;
  std::vector<CompiledPolynomial> dpoly_;   // (field, comp, var)
  std::vector<CompiledPolynomial> divpoly_; // per field, Euclidean divergence
  std::vector<Expr> expr_, dexpr_, divexpr_;
  std::vector<char> is_poly_;               // per field
  bool has_weight_ = false;
  CompiledPolynomial w_;
  std::vector<CompiledPolynomial> dw_;
};

}  // namespace srg
