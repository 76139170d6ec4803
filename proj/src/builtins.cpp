#include "srg/builtins.hpp"

#include <charconv>

#include "srg/errors.hpp"

namespace srg::builtins {

namespace {

Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
PolyVectorField d(std::size_t n, std::size_t j) { return PolyVectorField::coordinate(n, j); }

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw InvalidInput("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

SubRiemannianStructure euclidean(std::size_t n) {
  if (n == 0) throw InvalidInput("euclidean structure needs n >= 1");
  std::vector<PolyVectorField> f;
  for (std::size_t j = 0; j < n; ++j) f.push_back(d(n, j));
  return SubRiemannianStructure("euclidean:" + std::to_string(n), f);
}

SubRiemannianStructure heisenberg() {
  const Rational h(1, 2);
  return SubRiemannianStructure(
      "heisenberg", std::vector<PolyVectorField>{d(3, 0) - (h * x(3, 1)) * d(3, 2), d(3, 1) + (h * x(3, 0)) * d(3, 2)});
}

SubRiemannianStructure grushin() {
  return SubRiemannianStructure("grushin", std::vector<PolyVectorField>{d(2, 0), x(2, 0) * d(2, 1)});
}

SubRiemannianStructure grushin_alpha(int alpha) {
  if (alpha < 1) throw InvalidInput("grushin_alpha needs an integer exponent >= 1");
  return SubRiemannianStructure("grushin_alpha:" + std::to_string(alpha),
                                std::vector<PolyVectorField>{d(2, 0), pow(x(2, 0), alpha) * d(2, 1)});
}

SubRiemannianStructure singruppo() {
  auto h = heisenberg().polynomial_frame();
  h.push_back(pow(x(3, 2), 2) * d(3, 2));
  return SubRiemannianStructure("singruppo", h);
}

SubRiemannianStructure rototranslation() {
  const Expr th = Expr::variable(2);
  AnalyticField X1({cos(th), sin(th), Expr()});
  AnalyticField X2({Expr(), Expr(), Expr::constant(1.0)});
  return SubRiemannianStructure("rototranslation", std::vector<FrameField>{X1, X2});
}

SubRiemannianStructure contact_corank1(int k) {
  if (k < 1) throw InvalidInput("contact structure needs k >= 1");
  const auto n = static_cast<std::size_t>(2 * k + 1);
  const Rational h(1, 2);
  std::vector<PolyVectorField> f;
  // coordinates (x_1..x_k, y_1..y_k, t)
  for (int i = 0; i < k; ++i) f.push_back(d(n, i) - (h * x(n, k + i)) * d(n, 2 * k));
  for (int i = 0; i < k; ++i) f.push_back(d(n, k + i) + (h * x(n, i)) * d(n, 2 * k));
  return SubRiemannianStructure("contact_corank1_standard:" + std::to_string(k), f);
}

SubRiemannianStructure by_name(std::string_view name) {
  const auto colon = name.find(':');
  const std::string_view base = name.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view() : name.substr(colon + 1);
  auto no_arg = [&] {
    if (!arg.empty()) throw InvalidInput("structure '" + std::string(base) + "' takes no parameter");
  };
  if (base == "euclidean") {
    if (arg.empty()) throw InvalidInput("euclidean needs a dimension, e.g. euclidean:2");
    return euclidean(static_cast<std::size_t>(parse_int(arg, "dimension")));
  }
  if (base == "heisenberg") return no_arg(), heisenberg();
  if (base == "grushin") return no_arg(), grushin();
  if (base == "grushin_alpha") return grushin_alpha(arg.empty() ? 2 : parse_int(arg, "exponent"));
  if (base == "singruppo") return no_arg(), singruppo();
  if (base == "rototranslation") return no_arg(), rototranslation();
  if (base == "contact_corank1_standard" || base == "contact")
    return contact_corank1(arg.empty() ? 2 : parse_int(arg, "contact half-dimension"));
  throw InvalidInput("unknown built-in structure '" + std::string(name) + "'");
}

std::vector<std::string> names() {
  return {"euclidean:n", "heisenberg", "grushin", "grushin_alpha:a", "singruppo", "rototranslation",
          "contact_corank1_standard:k"};
}

}  // namespace srg::builtins
