#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "srg/builtins.hpp"
#include "srg/carnot.hpp"
#include "srg/errors.hpp"
#include "srg/pairing.hpp"
#include "test_util.hpp"

using namespace srg;
using srg::testing::vec;

namespace {

NilpotentApprox tangent_of(const SubRiemannianStructure& S) { return truncate(S, grading_at_origin(S)); }

// z = x + y + [x, y] / 2 with [X1, X2] = d3
Point bch_heisenberg(const Point& x, const Point& y) {
  return vec({x[0] + y[0], x[1] + y[1], x[2] + y[2] + 0.5 * (x[0] * y[1] - x[1] * y[0])});
}

Point random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  Point p(static_cast<Eigen::Index>(n));
  for (auto& v : p) v = U(rng);
  return p;
}

}  // namespace

TEST(Carnot, HeisenbergLawMatchesBch) {
  const auto law = group_law_from_flows(tangent_of(builtins::heisenberg()));
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const Point x = random_point(rng, 3), y = random_point(rng, 3);
    EXPECT_LT((law(x, y) - bch_heisenberg(x, y)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Carnot, SingruppoTangentIsHeisenberg) {
  const auto law = group_law_from_flows(tangent_of(builtins::singruppo()));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const Point x = random_point(rng, 3), y = random_point(rng, 3);
    EXPECT_LT((law(x, y) - bch_heisenberg(x, y)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Carnot, EuclideanLawIsAddition) {
  const auto law = group_law_from_flows(tangent_of(builtins::euclidean(3)));
  const Point x = vec({0.3, -1, 2}), y = vec({1, 1, -0.5});
  EXPECT_LT((law(x, y) - (x + y)).norm(), 1e-14);
  EXPECT_TRUE(structure_constants(law).second_layer.empty());
}

TEST(Carnot, GroupAxiomsHold) {
  for (const auto& S : {builtins::heisenberg(), builtins::contact_corank1(2)}) {
    const auto na = tangent_of(S);
    const auto law = group_law_from_flows(na);
    const std::size_t n = law.dim;
    std::mt19937_64 rng(2);
    const Point zero = Point::Zero(static_cast<Eigen::Index>(n));
    for (int k = 0; k < 20; ++k) {
      const Point x = random_point(rng, n), y = random_point(rng, n), z = random_point(rng, n);
      EXPECT_LT((law(zero, x) - x).norm(), 1e-8);
      EXPECT_LT((law(x, zero) - x).norm(), 1e-8);
      EXPECT_LT(law(x, law.inverse(x)).norm(), 1e-8);
      EXPECT_LT(law(law.inverse(x), x).norm(), 1e-8);
      EXPECT_LT((law(law(x, y), z) - law(x, law(y, z))).norm(), 1e-8);
      const double lam = 0.37 + k * 0.11;
      const Point lhs = dilate(law(x, y), na.grading, lam);
      const Point rhs = law(dilate(x, na.grading, lam), dilate(y, na.grading, lam));
      EXPECT_LT((lhs - rhs).norm(), 1e-8);
    }
  }
}

TEST(Carnot, ExponentialCoordinatesInvertExactly) {
  const auto law = group_law_from_flows(tangent_of(builtins::contact_corank1(2)));
  const auto& E = *law.exp_poly;
  const auto& L = *law.log_poly;
  for (std::size_t j = 0; j < law.dim; ++j) EXPECT_EQ(E[j].compose(L), Polynomial::variable(law.dim, j));
}

TEST(Carnot, HeisenbergStructureConstants) {
  const auto sc = structure_constants(group_law_from_flows(tangent_of(builtins::heisenberg())));
  ASSERT_EQ(sc.bilinear.size(), 1u);
  const auto& M = sc.bilinear[0];
  EXPECT_DOUBLE_EQ(M(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(M(1, 0), -0.5);
  EXPECT_DOUBLE_EQ(M(0, 0), 0.0);
}

TEST(Carnot, GrushinHasNoGroupLaw) {
  // [d1, x1 d2] = d2 adds a third dimension to a 2-dimensional space
  EXPECT_THROW(group_law_from_flows(tangent_of(builtins::grushin())), IsotropyNotVerified);
}

TEST(Carnot, LeftInvariancePassesAndCatchesCorruption) {
  const auto na = tangent_of(builtins::heisenberg());
  auto law = group_law_from_flows(na);
  EXPECT_TRUE(left_invariance_check(law, na).pass);
  law.compose = [](const Point& x, const Point& y) { return Point(x + y); };
  const auto bad = left_invariance_check(law, na);
  EXPECT_FALSE(bad.pass);
  EXPECT_GE(bad.witness_field, 0);
  EXPECT_GT(bad.max_error, 1e-3);

  const auto ena = tangent_of(builtins::euclidean(2));
  EXPECT_TRUE(left_invariance_check(group_law_from_flows(ena), ena).pass);
}

TEST(Carnot, VerticalHalfspaceOrientation) {
  const auto na = tangent_of(builtins::heisenberg());
  const auto F1 = vertical_halfspace(vec({1, 0}), na);
  EXPECT_TRUE(F1.contains(vec({0.2, -3, 5})));
  EXPECT_FALSE(F1.contains(vec({-0.2, 3, 5})));
  const auto F2 = vertical_halfspace(vec({0, 1}), na);
  EXPECT_TRUE(F2.contains(vec({-4, 0.1, 0})));
  // vertical translations do not matter
  for (double t : {-2.0, 0.0, 3.0}) EXPECT_EQ(F2.contains(vec({1, -0.1, t})), false);
  EXPECT_THROW(vertical_halfspace(vec({1, 1}), na), InvalidInput);
}

TEST(Carnot, DegenerateNormalRejected) {
  const auto na = tangent_of(builtins::singruppo());  // hat X3 = 0
  EXPECT_THROW(vertical_halfspace(vec({0, 0, 1}), na), DegenerateNormal);
}

TEST(Carnot, HalfspacePairingSigns) {
  // D along the normal field is a nonnegative measure; orthogonal first-layer fields see nothing
  const auto na = tangent_of(builtins::heisenberg());
  const auto F = vertical_halfspace(vec({1, 0}), na);
  const Grid g(Box::cube(3, -1.0, 1.0), 128);
  const auto u = GridFunction::sample(g, [&](std::span<const double> z) { return F.contains(z) ? 1.0 : 0.0; });
  const SmoothBump psi(vec({0.05, 0.1, -0.1}), 0.6);
  const double sup = psi.value(std::vector<double>{0.05, 0.1, -0.1});
  const double normal = pair_distributional(na.truncated[0], u, psi, std::nullopt);
  const double ortho = pair_distributional(na.truncated[1], u, psi, std::nullopt);
  EXPECT_GT(normal, 0.0);
  EXPECT_LT(std::abs(ortho), 1e-6 * sup);
}

TEST(Carnot, EuclideanHalfspaceDensityIsTwoOverPi) {
  const auto na = tangent_of(builtins::euclidean(2));
  const auto F = vertical_halfspace(vec({1, 0}), na);
  BallMaskOptions o;
  o.resolution = 64;
  const auto d = halfspace_perimeter_unit_ball(F, na, o);
  EXPECT_NEAR(d.ratio, 2.0 / std::numbers::pi, 0.02 * 2.0 / std::numbers::pi);
  EXPECT_EQ(d.unknown_samples, 0u);
}

TEST(Carnot, HeisenbergHalfspaceDensityRotationInvariant) {
  const auto na = tangent_of(builtins::heisenberg());
  BallMaskOptions o;
  o.resolution = 24;
  const auto ball = ball_mask(na.structure(), vec({0, 0, 0}), 1.0, o);
  const auto a = halfspace_perimeter_unit_ball(vertical_halfspace(vec({1, 0}), na), na, ball);
  const double c = std::cos(0.7), s = std::sin(0.7);
  const auto b = halfspace_perimeter_unit_ball(vertical_halfspace(vec({c, s}), na), na, ball);
  EXPECT_GT(a.ratio, 0.0);
  EXPECT_TRUE(std::isfinite(a.ratio));
  EXPECT_NEAR(b.ratio, a.ratio, 0.03 * a.ratio);
}
