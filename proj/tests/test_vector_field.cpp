#include <gtest/gtest.h>

#include <cmath>

#include "srg/builtins.hpp"
#include "srg/errors.hpp"
#include "srg/flow.hpp"
#include "srg/pairing.hpp"
#include "srg/text_format.hpp"
#include "test_util.hpp"

using namespace srg;
using srg::testing::vec;

TEST(Polynomial, ExactArithmetic) {
  const auto x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  const Polynomial p = (x1 + x2) * (x1 - x2);
  EXPECT_EQ(p, x1 * x1 - x2 * x2);
  EXPECT_EQ((p - p).terms().size(), 0u);
  const std::vector<Rational> q{Rational(1, 3), Rational(1, 2)};
  EXPECT_EQ(p.evaluate(q), Rational(1, 9) - Rational(1, 4));
}

TEST(LieBracket, GrushinPair) {
  const auto G = builtins::grushin().polynomial_frame();
  EXPECT_EQ(lie_bracket(G[0], G[1]), PolyVectorField::coordinate(2, 1));
}

TEST(LieBracket, HeisenbergGivesVerticalField) {
  const auto H = builtins::heisenberg().polynomial_frame();
  EXPECT_EQ(lie_bracket(H[0], H[1]), PolyVectorField::coordinate(3, 2));
  EXPECT_TRUE(lie_bracket(H[0], H[0]).is_zero());
}

TEST(LieBracket, DimensionMismatchRejected) {
  EXPECT_THROW(lie_bracket(PolyVectorField::coordinate(2, 0), PolyVectorField::coordinate(3, 0)), InvalidInput);
}

TEST(LieBracket, BilinearAntisymmetricJacobi) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const auto X = srg::testing::random_field(rng, n, 3);
    const auto Y = srg::testing::random_field(rng, n, 3);
    const auto Z = srg::testing::random_field(rng, n, 3);
    EXPECT_EQ(lie_bracket(X, Y), -lie_bracket(Y, X));
    EXPECT_EQ(lie_bracket(X + Y, Z), lie_bracket(X, Z) + lie_bracket(Y, Z));
    EXPECT_EQ(lie_bracket(Rational(3, 7) * X, Z), Rational(3, 7) * lie_bracket(X, Z));
    const auto J = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y));
    EXPECT_TRUE(J.is_zero());
  }
}

TEST(LieBracket, AnalyticRototranslation) {
  const auto R = builtins::rototranslation();
  const FrameField b = lie_bracket(R.frame[1], R.frame[0]);
  const std::vector<double> x{0.3, -0.2, 0.7};
  const Point v = evaluate(b, x);
  EXPECT_NEAR(v[0], -std::sin(0.7), 1e-14);
  EXPECT_NEAR(v[1], std::cos(0.7), 1e-14);
  EXPECT_NEAR(v[2], 0.0, 1e-14);
}

TEST(Divergence, Examples) {
  EXPECT_TRUE(divergence(PolyVectorField::coordinate(2, 0)).polynomial()->is_zero());
  const auto H = builtins::heisenberg().polynomial_frame();
  EXPECT_TRUE(divergence(H[0]).polynomial()->is_zero());
  const auto x1d1 = parse_field("x1*d1", 2);
  EXPECT_EQ(*divergence(x1d1).polynomial(), Polynomial::constant(2, 1));
}

TEST(Divergence, WeightedAddsLogDerivative) {
  // wbar = 1 + x1^2, X = d1: div = 2 x1 / (1 + x1^2)
  const Polynomial w = parse_polynomial("1 + x1*x1", 2);
  const auto dv = divergence(PolyVectorField::coordinate(2, 0), w, nullptr);
  EXPECT_FALSE(dv.polynomial().has_value());
  const std::vector<double> x{0.5, 0.1};
  EXPECT_NEAR(dv(x), 1.0 / 1.25, 1e-14);
}

TEST(Divergence, NonPositiveWeightRejected) {
  const Polynomial w = parse_polynomial("x1", 2);
  const Box box = Box::cube(2, 1.0);
  EXPECT_THROW(divergence(PolyVectorField::coordinate(2, 0), w, &box), PreconditionError);
}

TEST(Flow, Translation) {
  const auto r = flow(PolyVectorField::coordinate(3, 0), vec({0, 0, 0}), 0.75);
  EXPECT_NEAR(r.endpoint[0], 0.75, 1e-14);
  EXPECT_NEAR(r.endpoint[1], 0.0, 1e-14);
  EXPECT_NEAR(r.jacobian, 1.0, 1e-14);
}

TEST(Flow, ZeroTimeIsIdentity) {
  const auto r = flow(parse_field("x1*d1 + x2*x2*d2", 2), vec({0.3, 0.4}), 0.0);
  EXPECT_EQ(r.endpoint, vec({0.3, 0.4}));
  EXPECT_EQ(r.jacobian, 1.0);
}

TEST(Flow, HeisenbergHorizontalLine) {
  const auto H = builtins::heisenberg().polynomial_frame();
  const auto r = flow(H[0], vec({0, 0, 0}), 1.0);
  EXPECT_NEAR((r.endpoint - vec({1, 0, 0})).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.jacobian, 1.0, 1e-12);
}

TEST(Flow, LinearFieldJacobian) {
  const auto X = parse_field("x1*d1", 2);
  for (double t : {-0.5, 0.3, 1.2}) {
    const auto r = flow(X, vec({1, 0}), t);
    EXPECT_NEAR(r.endpoint[0], std::exp(t), 1e-9);
    EXPECT_NEAR(r.jacobian, std::exp(t), 1e-9);
  }
}

TEST(Flow, FourthOrderConvergence) {
  const auto X = parse_field("x2*d1 - x1*x1*d2", 2);
  const Point x0 = vec({0.4, -0.3});
  const Point ref = flow(X, x0, 1.0, 4096).endpoint;
  const double e1 = (flow(X, x0, 1.0, 8).endpoint - ref).norm();
  const double e2 = (flow(X, x0, 1.0, 16).endpoint - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Flow, SafetyBoxExitCarriesTime) {
  const Box box = Box::cube(2, 1.0);
  try {
    flow(PolyVectorField::coordinate(2, 0), vec({0, 0}), 2.0, 200, box);
    FAIL() << "expected an exit";
  } catch (const FlowExit& e) {
    EXPECT_NEAR(e.exit_time(), 1.0, 0.011);
  }
}

TEST(Flow, Semigroup) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto X = srg::testing::random_field(rng, 2, 2);
    const Point x0 = vec({u(rng), u(rng)});
    const double s = 0.2 * u(rng), t = 0.2 * u(rng);
    const Point a = flow(X, flow(X, x0, s).endpoint, t).endpoint;
    const Point b = flow(X, x0, s + t).endpoint;
    EXPECT_LT((a - b).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(Flow, LiouvilleFirstOrder) {
  // |J(t) - 1 - t div X(x0)| <= C t^2 with C fitted on two smaller t
  const auto X = parse_field("x1*x2*d1 + x2*x2*d2 + d2", 2);
  const Point x0 = vec({0.3, 0.2});
  const double div0 = divergence(X)(std::vector<double>{0.3, 0.2});
  auto defect = [&](double t) { return std::abs(flow(X, x0, t).jacobian - 1.0 - t * div0); };
  const double C = std::max(defect(0.025) / (0.025 * 0.025), defect(0.05) / (0.05 * 0.05));
  for (double t : {-0.1, 0.07, 0.1}) EXPECT_LE(defect(t), 1.5 * C * t * t);
}

namespace {
Grid plane_grid(int res) { return Grid(Box::cube(2, 1.0), res); }
}  // namespace

TEST(Pairing, ConstantFunctionGivesZero) {
  const Grid g = plane_grid(200);
  GridFunction u(g);
  std::fill(u.values.begin(), u.values.end(), 1.0);
  const SmoothBump phi(vec({0.1, -0.2}), 0.6);
  const auto X = parse_field("d1 + x1*x2*d2", 2);
  EXPECT_NEAR(pair_distributional(X, u, phi), 0.0, 1e-6);
}

TEST(Pairing, SmoothFunctionMatchesDirectionalDerivative) {
  const Grid g = plane_grid(200);
  const auto u = GridFunction::sample(g, [](std::span<const double> x) { return x[0]; });
  const PolynomialBump phi(vec({0.0, 0.1}), vec({0.7, 0.6}));
  double integral = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point c = g.center(i);
    integral += phi.value(std::span<const double>(c.data(), 2)) * g.cell_volume();
  }
  EXPECT_NEAR(pair_distributional(PolyVectorField::coordinate(2, 0), u, phi), integral, 1e-3 * integral);
}

TEST(Pairing, IndicatorGivesSignedSurfaceMeasure) {
  const Grid g = plane_grid(400);
  const auto u = GridFunction::sample(g, [](std::span<const double> x) { return x[0] < 0 ? 1.0 : 0.0; });
  const SmoothBump phi(vec({0.05, 0.1}), 0.5);
  // 1D slicing oracle: -int phi(0, s) ds by Simpson's rule
  const int K = 2000;
  double line = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double s = -1.0 + 2.0 * k / K;
    const double w = (k == 0 || k == K) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const std::vector<double> p{0.0, s};
    line += w * phi.value(p);
  }
  line *= 2.0 / K / 3.0;
  EXPECT_NEAR(pair_distributional(PolyVectorField::coordinate(2, 0), u, phi), -line, 0.01 * line);
}

TEST(Pairing, LinearInBothArguments) {
  const Grid g = plane_grid(100);
  const auto u1 = GridFunction::sample(g, [](std::span<const double> x) { return x[0] * x[1]; });
  const auto u2 = GridFunction::sample(g, [](std::span<const double> x) { return x[1] < 0.2 ? 1.0 : 0.0; });
  GridFunction sum(g);
  for (std::size_t i = 0; i < g.size(); ++i) sum.values[i] = 2.0 * u1.values[i] - 3.0 * u2.values[i];
  const auto X = parse_field("x2*d1 + x1*d2", 2);
  const PolynomialBump phi(vec({0.0, 0.0}), vec({0.8, 0.8}));
  const double a = pair_distributional(X, u1, phi), b = pair_distributional(X, u2, phi);
  EXPECT_NEAR(pair_distributional(X, sum, phi), 2 * a - 3 * b, 1e-10);
  const PolynomialBump phi2(vec({0.0, 0.0}), vec({0.8, 0.8}), -2.5);
  EXPECT_NEAR(pair_distributional(X, u1, phi2), -2.5 * a, 1e-10);
}

TEST(Pairing, SupportTouchingBoundaryRejected) {
  const Grid g = plane_grid(50);
  GridFunction u(g);
  const SmoothBump phi(vec({0.8, 0.0}), 0.3);
  EXPECT_THROW(pair_distributional(PolyVectorField::coordinate(2, 0), u, phi), PreconditionError);
}

TEST(Pairing, SerialAndParallelAgreeBitwise) {
  const Grid g = plane_grid(300);
  const auto u = GridFunction::sample(g, [](std::span<const double> x) { return x[0] + x[1] < 0.1 ? 1.0 : 0.0; });
  const SmoothBump phi(vec({0.0, 0.0}), 0.7);
  const auto X = parse_field("d1 + x1*d2", 2);
  EXPECT_EQ(pair_distributional(X, u, phi, std::nullopt, Exec::Serial),
            pair_distributional(X, u, phi, std::nullopt, Exec::Parallel));
}
