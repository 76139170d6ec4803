#include "srg/polynomial.hpp"

#include <cmath>

#include "srg/errors.hpp"

namespace srg {

double to_double(const Rational& q) { return q.get_d(); }

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw InvalidInput("cannot convert non-finite value to a rational");
  Rational q(v);
  q.canonicalize();
  return q;
}

Polynomial Polynomial::constant(std::size_t dim, const Rational& c) {
  Polynomial p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t i) {
  if (i >= dim) throw InvalidInput("variable index out of range");
  Exponent e(dim, 0);
  e[i] = 1;
  return monomial(e, 1);
}

Polynomial Polynomial::monomial(const Exponent& alpha, const Rational& c) {
  Polynomial p(alpha.size());
  p.add_term(alpha, c);
  return p;
}

bool Polynomial::is_constant() const {
  for (const auto& [e, c] : terms_)
    for (unsigned a : e)
      if (a != 0) return false;
  return true;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (unsigned a : e) s += static_cast<int>(a);
    d = std::max(d, s);
  }
  return d;
}

Rational Polynomial::coefficient(const Exponent& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponent& alpha, const Rational& c) {
  if (alpha.size() != dim_) throw InvalidInput("monomial dimension mismatch");
  if (c == 0) return;
  Rational q = c;
  q.canonicalize();
  auto [it, inserted] = terms_.try_emplace(alpha, q);
  if (!inserted) {
    it->second += q;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.dim_ != dim_) throw InvalidInput("polynomial dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.dim_ != dim_) throw InvalidInput("polynomial dimension mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  Rational k = c;
  k.canonicalize();
  for (auto& [e, v] : terms_) v *= k;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.dim_ != b.dim_) throw InvalidInput("polynomial dimension mismatch");
  Polynomial r(a.dim_);
  Polynomial::Exponent e(a.dim_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::derivative(std::size_t i) const {
  if (i >= dim_) throw InvalidInput("derivative index out of range");
  Polynomial r(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponent d = e;
    d[i] -= 1;
    r.add_term(d, c * e[i]);
  }
  return r;
}

Rational Polynomial::evaluate(std::span<const Rational> x) const {
  if (x.size() != dim_) throw InvalidInput("evaluation point has wrong dimension");
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < dim_; ++i)
      for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != dim_) throw InvalidInput("evaluation point has wrong dimension");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < dim_; ++i)
      if (e[i]) t *= std::pow(x[i], static_cast<int>(e[i]));
    s += t;
  }
  return s;
}

Polynomial pow(const Polynomial& p, unsigned k) {
  Polynomial r = Polynomial::constant(p.dim(), 1);
  for (unsigned i = 0; i < k; ++i) r = r * p;
  return r;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subs) const {
  if (subs.size() != dim_) throw InvalidInput("substitution list must have one entry per variable");
  const std::size_t out_dim = subs.empty() ? 0 : subs.front().dim();
  for (const auto& s : subs)
    if (s.dim() != out_dim) throw InvalidInput("substituted polynomials disagree on dimension");
  // cache powers of each substitution
  std::vector<std::vector<Polynomial>> powers(dim_);
  Polynomial r(out_dim);
  for (const auto& [e, c] : terms_) {
    Polynomial t = Polynomial::constant(out_dim, c);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(Polynomial::constant(out_dim, 1));
      while (pw.size() <= e[i]) pw.push_back(pw.back() * subs[i]);
      t = t * pw[e[i]];
    }
    r += t;
  }
  return r;
}

}  // namespace srg
