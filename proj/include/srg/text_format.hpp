#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srg/vector_field.hpp"

namespace srg {

/// Named field definitions such as `X1 = d1 - 1/2*x2*d3`, one per line.
struct NamedField {
  std::string name;
  PolyVectorField field;
};

/// dim == 0 infers the dimension from the largest x/d index used.
/// Blank lines and lines starting with '#' are skipped.
std::vector<NamedField> parse_frame(std::string_view text, std::size_t dim = 0);

std::vector<PolyVectorField> fields_of(const std::vector<NamedField>& named);

/// A single field expression, e.g. `d1 + x1*d2`.
PolyVectorField parse_field(std::string_view text, std::size_t dim);
/// A scalar polynomial, e.g. `x1 + x3*x3`.
Polynomial parse_polynomial(std::string_view text, std::size_t dim);

/// Rational literal: integer, p/q or decimal ("0.25").
Rational parse_rational(std::string_view text);

/// Monomials print as repeated products (x1*x1*x2); output re-parses exactly.
std::string to_string(const Rational& q);
std::string to_string(const Polynomial& p);
std::string to_string(const PolyVectorField& X);

}  // namespace srg
