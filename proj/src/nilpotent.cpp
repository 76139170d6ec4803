#include "srg/nilpotent.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "srg/errors.hpp"
#include "srg/text_format.hpp"

namespace srg {

Grading::Grading(std::vector<int> w) : weights(std::move(w)) {
  if (weights.empty()) throw InvalidInput("grading needs at least one weight");
  if (weights.front() != 1) throw InvalidInput("grading must start with weight 1");
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (weights[i] < weights[i - 1]) throw InvalidInput("grading weights must be nondecreasing");
}

int Grading::Q() const {
  int q = 0;
  for (int w : weights) q += w;
  return q;
}

int Grading::max_weight() const { return weights.back(); }

Grading grading_at_origin(const SubRiemannianStructure& S, const FlagOptions& opts) {
  return Grading(growth_vector(S, Point::Zero(static_cast<Eigen::Index>(S.dim)), opts).weights);
}

int monomial_weight(const Polynomial::Exponent& alpha, const Grading& g) {
  int s = 0;
  for (std::size_t k = 0; k < alpha.size(); ++k) s += g.weights[k] * static_cast<int>(alpha[k]);
  return s;
}

int monomial_field_order(const Polynomial::Exponent& alpha, std::size_t j, const Grading& g) {
  if (alpha.size() > g.dim() || j >= g.dim()) throw InvalidInput("monomial and grading disagree on dimension");
  return monomial_weight(alpha, g) - g.weights[j];
}

std::vector<std::pair<int, PolyVectorField>> homogeneous_decompose(const PolyVectorField& X, const Grading& g) {
  if (X.dim() != g.dim()) throw InvalidInput("field and grading disagree on dimension");
  std::map<int, std::vector<Polynomial>> parts;
  for (std::size_t j = 0; j < X.dim(); ++j)
    for (const auto& [e, c] : X[j].terms()) {
      auto& p = parts.try_emplace(monomial_field_order(e, j, g), X.dim(), Polynomial(X.dim())).first->second;
      p[j].add_term(e, c);
    }
  std::vector<std::pair<int, PolyVectorField>> out;
  for (auto& [s, comps] : parts) out.emplace_back(s, PolyVectorField(std::move(comps)));
  return out;
}

SubRiemannianStructure NilpotentApprox::structure(const std::string& name) const {
  return SubRiemannianStructure(name, truncated);
}

NilpotentApprox truncate(const SubRiemannianStructure& S, const Grading& g, int order_floor) {
  if (S.dim != g.dim()) throw InvalidInput("structure and grading disagree on dimension");
  const auto frame = S.polynomial_frame();
  NilpotentApprox na;
  na.grading = g;
  na.Q = g.Q();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    PolyVectorField hat(S.dim), rest(S.dim);
    for (const auto& [s, part] : homogeneous_decompose(frame[i], g)) {
      if (s < order_floor) {
        for (std::size_t j = 0; j < S.dim; ++j)
          if (!part[j].is_zero()) {
            PolyVectorField mono(S.dim);
            std::vector<Polynomial> c(S.dim, Polynomial(S.dim));
            const auto& [e, q] = *part[j].terms().begin();
            c[j].add_term(e, q);
            throw NotPrivileged("field " + std::to_string(i + 1) + " has the monomial " +
                                to_string(PolyVectorField(std::move(c))) + " of order " + std::to_string(s) +
                                " < " + std::to_string(order_floor) + "; coordinates are not privileged");
          }
      }
      if (s == order_floor)
        hat += part;
      else
        rest += part;
    }
    // component j of hat X may only involve variables of smaller weight
    for (std::size_t j = 0; j < S.dim; ++j)
      for (const auto& [e, c] : hat[j].terms())
        for (std::size_t k = 0; k < e.size(); ++k)
          if (e[k] > 0 && g.weights[k] >= g.weights[j])
            throw NotPrivileged("truncated field " + std::to_string(i + 1) + " is not triangular");
    na.truncated.push_back(std::move(hat));
    na.remainders.push_back(std::move(rest));
  }
  return na;
}

Point dilate(const Point& z, const Grading& g, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("dilation factor must be positive");
  if (static_cast<std::size_t>(z.size()) != g.dim()) throw InvalidInput("point and grading disagree on dimension");
  Point out = z;
  for (std::size_t j = 0; j < g.dim(); ++j) out[static_cast<Eigen::Index>(j)] *= std::pow(lambda, g.weights[j]);
  return out;
}

double dilation_jacobian(const Grading& g, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("dilation factor must be positive");
  return std::pow(lambda, g.Q());
}

namespace {
Rational rational_pow(const Rational& q, int k) {
  Rational r = 1;
  const Rational b = k >= 0 ? q : Rational(1 / q);
  for (int i = 0; i < std::abs(k); ++i) r *= b;
  return r;
}
}  // namespace

PolyVectorField rescale_field(const PolyVectorField& X, const Grading& g, const Rational& eps) {
  if (eps <= 0) throw InvalidInput("rescaling factor must be positive");
  std::vector<Polynomial> c(X.dim(), Polynomial(X.dim()));
  for (std::size_t j = 0; j < X.dim(); ++j)
    for (const auto& [e, q] : X[j].terms()) c[j].add_term(e, q * rational_pow(eps, monomial_field_order(e, j, g) + 1));
  return PolyVectorField(std::move(c));
}

PolyVectorField remainder_rescale(const PolyVectorField& X, const Grading& g, const Rational& r) {
  for (std::size_t j = 0; j < X.dim(); ++j)
    for (const auto& [e, q] : X[j].terms())
      if (monomial_field_order(e, j, g) < 0)
        throw PreconditionError("field has a monomial of negative order; it is not a remainder");
  return rescale_field(X, g, r);
}

NilpotencyReport nilpotency_check(const NilpotentApprox& na, int step_bound, const SubRiemannianStructure* original,
                                  const FlagOptions& opts) {
  NilpotencyReport rep;
  if (step_bound < 1) throw InvalidInput("step bound must be at least 1");
  std::vector<FrameField> frame(na.truncated.begin(), na.truncated.end());
  std::vector<BracketWord> level;
  for (std::size_t i = 0; i < frame.size(); ++i)
    if (!na.truncated[i].is_zero()) level.push_back({{static_cast<int>(i)}, frame[i]});
  for (int len = 2; len <= step_bound + 1 && !level.empty(); ++len) level = bracket_level(frame, level);
  if (!level.empty()) {
    rep.witness = level.front().letters;
    rep.message = "a bracket of length " + std::to_string(step_bound + 1) + " does not vanish";
    return rep;
  }
  if (original) {
    const Point zero = Point::Zero(static_cast<Eigen::Index>(original->dim));
    rep.growth_original = growth_vector(*original, zero, opts).growth;
    rep.growth_truncated = growth_vector(na.structure(), zero, opts).growth;
    if (rep.growth_original != rep.growth_truncated) {
      rep.message = "growth vectors at 0 differ";
      return rep;
    }
  }
  rep.pass = true;
  return rep;
}

}  // namespace srg
