#include "srg/vector_field.hpp"

#include <cmath>

#include "srg/errors.hpp"
#include "srg/grid.hpp"

namespace srg {

PolyVectorField::PolyVectorField(std::size_t dim) : coeffs_(dim, Polynomial(dim)) {}

PolyVectorField::PolyVectorField(std::vector<Polynomial> coeffs) : coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_)
    if (c.dim() != coeffs_.size()) throw InvalidInput("vector field needs n polynomial coefficients in n variables");
}

PolyVectorField PolyVectorField::coordinate(std::size_t dim, std::size_t j) {
  PolyVectorField X(dim);
  X.coeffs_.at(j) = Polynomial::constant(dim, 1);
  return X;
}

bool PolyVectorField::is_zero() const {
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

Polynomial PolyVectorField::apply(const Polynomial& f) const {
  if (f.dim() != dim()) throw InvalidInput("field and function disagree on dimension");
  Polynomial r(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    if (!coeffs_[i].is_zero()) r += coeffs_[i] * f.derivative(i);
  return r;
}

Point PolyVectorField::evaluate(std::span<const double> x) const {
  Point v(static_cast<Eigen::Index>(dim()));
  for (std::size_t j = 0; j < dim(); ++j) v[static_cast<Eigen::Index>(j)] = coeffs_[j].evaluate(x);
  return v;
}

std::vector<Rational> PolyVectorField::evaluate(std::span<const Rational> x) const {
  std::vector<Rational> v;
  v.reserve(dim());
  for (const auto& c : coeffs_) v.push_back(c.evaluate(x));
  return v;
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& o) {
  if (o.dim() != dim()) throw InvalidInput("vector field dimension mismatch");
  for (std::size_t j = 0; j < dim(); ++j) coeffs_[j] += o.coeffs_[j];
  return *this;
}

PolyVectorField& PolyVectorField::operator-=(const PolyVectorField& o) {
  if (o.dim() != dim()) throw InvalidInput("vector field dimension mismatch");
  for (std::size_t j = 0; j < dim(); ++j) coeffs_[j] -= o.coeffs_[j];
  return *this;
}

PolyVectorField& PolyVectorField::operator*=(const Rational& c) {
  for (auto& p : coeffs_) p *= c;
  return *this;
}

PolyVectorField operator*(const Polynomial& f, const PolyVectorField& a) {
  std::vector<Polynomial> c;
  c.reserve(a.dim());
  for (const auto& p : a.coeffs_) c.push_back(f * p);
  return PolyVectorField(std::move(c));
}

PolyVectorField PolyVectorField::operator-() const {
  PolyVectorField r = *this;
  r *= -1;
  return r;
}

AnalyticField AnalyticField::from_polynomial(const PolyVectorField& X) {
  std::vector<Expr> c;
  c.reserve(X.dim());
  for (const auto& p : X.coeffs()) c.push_back(Expr::from_polynomial(p));
  return AnalyticField(std::move(c));
}

Expr AnalyticField::apply(const Expr& f) const {
  Expr r;
  for (std::size_t i = 0; i < dim(); ++i) r = r + coeffs_[i] * f.derivative(i);
  return r;
}

Point AnalyticField::evaluate(std::span<const double> x) const {
  Point v(static_cast<Eigen::Index>(dim()));
  for (std::size_t j = 0; j < dim(); ++j) v[static_cast<Eigen::Index>(j)] = coeffs_[j].evaluate(x);
  return v;
}

std::size_t field_dim(const FrameField& f) {
  return std::visit([](const auto& X) { return X.dim(); }, f);
}

Point evaluate(const FrameField& f, std::span<const double> x) {
  return std::visit([&](const auto& X) { return X.evaluate(x); }, f);
}

PolyVectorField lie_bracket(const PolyVectorField& X, const PolyVectorField& Y) {
  if (X.dim() != Y.dim()) throw InvalidInput("Lie bracket of fields with different ambient dimension");
  std::vector<Polynomial> c;
  c.reserve(X.dim());
  for (std::size_t j = 0; j < X.dim(); ++j) c.push_back(X.apply(Y[j]) - Y.apply(X[j]));
  return PolyVectorField(std::move(c));
}

AnalyticField lie_bracket(const AnalyticField& X, const AnalyticField& Y) {
  if (X.dim() != Y.dim()) throw InvalidInput("Lie bracket of fields with different ambient dimension");
  std::vector<Expr> c;
  c.reserve(X.dim());
  for (std::size_t j = 0; j < X.dim(); ++j) c.push_back(X.apply(Y[j]) - Y.apply(X[j]));
  return AnalyticField(std::move(c));
}

namespace {
AnalyticField as_analytic(const FrameField& f) {
  if (const auto* p = std::get_if<PolyVectorField>(&f)) return AnalyticField::from_polynomial(*p);
  return std::get<AnalyticField>(f);
}
}  // namespace

FrameField lie_bracket(const FrameField& X, const FrameField& Y) {
  const auto* px = std::get_if<PolyVectorField>(&X);
  const auto* py = std::get_if<PolyVectorField>(&Y);
  if (px && py) return lie_bracket(*px, *py);
  return lie_bracket(as_analytic(X), as_analytic(Y));
}

Polynomial euclidean_divergence(const PolyVectorField& X) {
  Polynomial d(X.dim());
  for (std::size_t i = 0; i < X.dim(); ++i) d += X[i].derivative(i);
  return d;
}

double evaluate_weight(const VolumeWeight& w, std::span<const double> x) {
  return w ? w->evaluate(x) : 1.0;
}

WeightedDivergence::WeightedDivergence(Polynomial euclidean, Polynomial weight_derivative, VolumeWeight weight)
    : euclidean_(std::move(euclidean)), weight_derivative_(std::move(weight_derivative)), weight_(std::move(weight)) {
  if (!weight_ || weight_derivative_.is_zero()) exact_ = euclidean_;
}

double WeightedDivergence::operator()(std::span<const double> x) const {
  double v = euclidean_.evaluate(x);
  if (weight_ && !weight_derivative_.is_zero()) v += weight_derivative_.evaluate(x) / weight_->evaluate(x);
  return v;
}

WeightedDivergence divergence(const PolyVectorField& X, const VolumeWeight& weight, const Box* box) {
  Polynomial base = euclidean_divergence(X);
  if (!weight) return WeightedDivergence(std::move(base), Polynomial(X.dim()), std::nullopt);
  if (weight->dim() != X.dim()) throw InvalidInput("volume weight and field disagree on dimension");
  if (weight->is_constant()) {
    if (weight->evaluate(std::vector<double>(X.dim(), 0.0)) <= 0.0)
      throw PreconditionError("volume weight must be strictly positive");
    return WeightedDivergence(std::move(base), Polynomial(X.dim()), weight);
  }
  if (box) {
    // 9 samples per axis, including the box corners
    const Grid probe(box->expanded(0.0), 9);
    std::vector<double> x(X.dim());
    for (std::size_t i = 0; i < probe.size(); ++i) {
      std::vector<int> idx(X.dim());
      probe.unravel(i, idx);
      for (std::size_t a = 0; a < X.dim(); ++a) x[a] = box->lo[a] + (box->hi[a] - box->lo[a]) * idx[a] / 8.0;
      if (weight->evaluate(x) <= 0.0) throw PreconditionError("volume weight is not positive on the working box");
    }
  }
  return WeightedDivergence(std::move(base), X.apply(*weight), weight);
}

}  // namespace srg
