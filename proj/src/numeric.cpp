#include "srg/numeric.hpp"

#include <algorithm>

#include "srg/errors.hpp"

namespace srg {

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dim_(p.dim()) {
  for (const auto& [e, c] : p.terms()) {
    coef_.push_back(c.get_d());
    for (unsigned a : e) {
      if (a > 255) throw InvalidInput("exponent too large for compiled evaluation");
      exps_.push_back(static_cast<unsigned char>(a));
      max_exp_ = std::max(max_exp_, static_cast<int>(a));
    }
  }
}

double CompiledPolynomial::evaluate_with_powers(const double* powers) const {
  double s = 0.0;
  const unsigned char* e = exps_.data();
  for (double c : coef_) {
    double t = c;
    for (std::size_t i = 0; i < dim_; ++i, ++e)
      if (*e) t *= powers[*e * dim_ + i];
    s += t;
  }
  return s;
}

double CompiledPolynomial::evaluate(std::span<const double> x) const {
  std::vector<double> pw((max_exp_ + 1) * dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    pw[i] = 1.0;
    for (int k = 1; k <= max_exp_; ++k) pw[k * dim_ + i] = pw[(k - 1) * dim_ + i] * x[i];
  }
  return evaluate_with_powers(pw.data());
}

NumericFrame::NumericFrame(const std::vector<FrameField>& frame, const VolumeWeight& weight) : m_(frame.size()) {
  if (frame.empty()) throw InvalidInput("frame must contain at least one field");
  n_ = field_dim(frame.front());
  for (const auto& f : frame)
    if (field_dim(f) != n_) throw InvalidInput("frame fields disagree on ambient dimension");
  poly_.resize(m_ * n_);
  dpoly_.resize(m_ * n_ * n_);
  divpoly_.resize(m_);
  expr_.resize(m_ * n_);
  dexpr_.resize(m_ * n_ * n_);
  divexpr_.resize(m_);
  is_poly_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    if (const auto* p = std::get_if<PolyVectorField>(&frame[i])) {
      is_poly_[i] = 1;
      for (std::size_t j = 0; j < n_; ++j) {
        poly_[i * n_ + j] = CompiledPolynomial((*p)[j]);
        max_exp_ = std::max(max_exp_, poly_[i * n_ + j].max_exponent());
        for (std::size_t k = 0; k < n_; ++k) dpoly_[(i * n_ + j) * n_ + k] = CompiledPolynomial((*p)[j].derivative(k));
      }
      divpoly_[i] = CompiledPolynomial(euclidean_divergence(*p));
    } else {
      all_poly_ = false;
      const auto& a = std::get<AnalyticField>(frame[i]);
      Expr div;
      for (std::size_t j = 0; j < n_; ++j) {
        expr_[i * n_ + j] = a[j];
        for (std::size_t k = 0; k < n_; ++k) dexpr_[(i * n_ + j) * n_ + k] = a[j].derivative(k);
        div = div + a[j].derivative(j);
      }
      divexpr_[i] = div;
    }
  }
  if (weight && !weight->is_constant()) {
    if (weight->dim() != n_) throw InvalidInput("volume weight dimension mismatch");
    has_weight_ = true;
    w_ = CompiledPolynomial(*weight);
    for (std::size_t k = 0; k < n_; ++k) dw_.emplace_back(weight->derivative(k));
  }
}

void NumericFrame::fill_powers(const double* x, double* pw) const {
  for (std::size_t i = 0; i < n_; ++i) {
    pw[i] = 1.0;
    for (int k = 1; k <= max_exp_; ++k) pw[k * n_ + i] = pw[(k - 1) * n_ + i] * x[i];
  }
}

namespace {
constexpr std::size_t kStackPowers = 256;
}

void NumericFrame::eval(const double* x, double* F) const {
  double stack[kStackPowers];
  std::vector<double> heap;
  double* pw = stack;
  const std::size_t need = (max_exp_ + 1) * n_;
  if (need > kStackPowers) {
    heap.resize(need);
    pw = heap.data();
  }
  fill_powers(x, pw);
  const std::span<const double> xs(x, n_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      F[i * n_ + j] = is_poly_[i] ? poly_[i * n_ + j].evaluate_with_powers(pw) : expr_[i * n_ + j].evaluate(xs);
}

void NumericFrame::eval_with_jacobian(const double* x, double* F, double* dF) const {
  double stack[kStackPowers];
  std::vector<double> heap;
  double* pw = stack;
  const std::size_t need = (max_exp_ + 1) * n_;
  if (need > kStackPowers) {
    heap.resize(need);
    pw = heap.data();
  }
  fill_powers(x, pw);
  const std::span<const double> xs(x, n_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t c = i * n_ + j;
      if (is_poly_[i]) {
        F[c] = poly_[c].evaluate_with_powers(pw);
        for (std::size_t k = 0; k < n_; ++k)
          dF[c * n_ + k] = dpoly_[c * n_ + k].is_zero() ? 0.0 : dpoly_[c * n_ + k].evaluate_with_powers(pw);
      } else {
        F[c] = expr_[c].evaluate(xs);
        for (std::size_t k = 0; k < n_; ++k) dF[c * n_ + k] = dexpr_[c * n_ + k].evaluate(xs);
      }
    }
}

double NumericFrame::weight(const double* x) const {
  return has_weight_ ? w_.evaluate(std::span<const double>(x, n_)) : 1.0;
}

double NumericFrame::divergence(std::size_t i, const double* x) const {
  const std::span<const double> xs(x, n_);
  double d = is_poly_[i] ? divpoly_[i].evaluate(xs) : divexpr_[i].evaluate(xs);
  if (has_weight_) {
    std::vector<double> F(n_ * m_);
    eval(x, F.data());
    double xw = 0.0;
    for (std::size_t k = 0; k < n_; ++k) xw += F[i * n_ + k] * dw_[k].evaluate(xs);
    d += xw / w_.evaluate(xs);
  }
  return d;
}

Eigen::MatrixXd NumericFrame::matrix(const Point& x) const {
  Eigen::MatrixXd F(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(m_));
  eval(x.data(), F.data());
  return F;
}

}  // namespace srg
