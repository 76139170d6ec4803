#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace srg {

using Rational = mpq_class;

double to_double(const Rational& q);
/// Exact rational value of a finite double.
Rational to_rational(double v);

/// Multivariate polynomial in x1..xn with exact rational coefficients.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  using Exponent = std::vector<unsigned>;
  using Terms = std::map<Exponent, Rational>;

  explicit Polynomial(std::size_t dim = 0) : dim_(dim) {}

  static Polynomial constant(std::size_t dim, const Rational& c);
  /// The coordinate function x_{i+1} (0-based index).
  static Polynomial variable(std::size_t dim, std::size_t i);
  static Polynomial monomial(const Exponent& alpha, const Rational& c);

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;
  Rational coefficient(const Exponent& alpha) const;

  void add_term(const Exponent& alpha, const Rational& c);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  /// Partial derivative with respect to x_{i+1}.
  Polynomial derivative(std::size_t i) const;

  Rational evaluate(std::span<const Rational> x) const;
  double evaluate(std::span<const double> x) const;

  /// Substitutes x_i -> subs[i]; the result lives in the dimension of subs.
  Polynomial compose(const std::vector<Polynomial>& subs) const;

 private:
  std::size_t dim_;
  Terms terms_;
};

Polynomial pow(const Polynomial& p, unsigned k);

}  // namespace srg
