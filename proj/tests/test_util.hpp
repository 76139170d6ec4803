#pragma once

#include <random>

#include "srg/vector_field.hpp"

namespace srg::testing {

inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n, int max_degree, int terms = 4) {
  std::uniform_int_distribution<int> coef(-5, 5), den(1, 4), deg(0, max_degree), var(0, static_cast<int>(n) - 1);
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    Polynomial::Exponent e(n, 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) ++e[var(rng)];
    p.add_term(e, Rational(coef(rng), den(rng)));
  }
  return p;
}

inline PolyVectorField random_field(std::mt19937_64& rng, std::size_t n, int max_degree) {
  std::vector<Polynomial> c;
  for (std::size_t j = 0; j < n; ++j) c.push_back(random_polynomial(rng, n, max_degree));
  return PolyVectorField(std::move(c));
}

inline Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

}  // namespace srg::testing
