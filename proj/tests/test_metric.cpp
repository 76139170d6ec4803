#include <gtest/gtest.h>

#include <cmath>

#include "srg/builtins.hpp"
#include "srg/errors.hpp"
#include "srg/metric.hpp"
#include "test_util.hpp"

using namespace srg;
using srg::testing::vec;

TEST(Metric, GrushinOffAxis) {
  const auto G = builtins::grushin();
  const auto r = quadratic_form(G, vec({0.5, 1.0}), vec({0.3, 0.2}));
  ASSERT_TRUE(r.finite);
  EXPECT_NEAR(r.value, 0.09 + 0.04 / 0.25, 1e-12);
}

TEST(Metric, GrushinAxisVerticalIsInfinite) {
  const auto G = builtins::grushin();
  EXPECT_FALSE(quadratic_form(G, vec({0, 0.7}), vec({0, 1})).finite);
  const auto h = quadratic_form(G, vec({0, 0.7}), vec({2, 0}));
  ASSERT_TRUE(h.finite);
  EXPECT_NEAR(h.value, 4.0, 1e-12);
  EXPECT_THROW(min_norm_controls(G, vec({0, 0.7}), vec({0, 1})), InfiniteForm);
}

TEST(Metric, GeneralizedGrushinLiftOfX) {
  // X = x1 d2 lifts to (0, x1^(1 - alpha)); its cost is x1^(2 - 2 alpha)
  for (int alpha : {2, 3}) {
    const auto G = builtins::grushin_alpha(alpha);
    const double x1 = 0.7;
    const auto c = min_norm_controls(G, vec({x1, 0.2}), vec({0, x1}));
    EXPECT_NEAR(c[0], 0.0, 1e-12);
    EXPECT_NEAR(c[1], std::pow(x1, 1 - alpha), 1e-12);
    EXPECT_NEAR(quadratic_form(G, vec({x1, 0.2}), vec({0, x1})).value, std::pow(x1, 2 - 2 * alpha), 1e-10);
  }
}

TEST(Metric, RedundantFrameSplitsEvenly) {
  const SubRiemannianStructure S("double", std::vector<PolyVectorField>{PolyVectorField::coordinate(1, 0),
                                                                       PolyVectorField::coordinate(1, 0)});
  const auto c = min_norm_controls(S, vec({0.3}), vec({1}));
  EXPECT_NEAR(c[0], 0.5, 1e-14);
  EXPECT_NEAR(c[1], 0.5, 1e-14);
}

TEST(Metric, IndependentFrameUnitVector) {
  const auto H = builtins::heisenberg();
  const Point x = vec({0.4, -1.2, 2});
  const auto c = min_norm_controls(H, x, H.frame_matrix(x).col(0));
  EXPECT_NEAR((c - vec({1, 0})).norm(), 0.0, 1e-12);
}

TEST(Metric, ScalarProductGrushin) {
  const auto G = builtins::grushin();
  const Point x = vec({-0.8, 0.1}), v = vec({0.3, -0.5}), w = vec({1.1, 0.4});
  EXPECT_NEAR(scalar_product(G, x, v, w), 0.3 * 1.1 + (-0.5 * 0.4) / 0.64, 1e-12);
  EXPECT_NEAR(scalar_product(G, x, v, Point::Zero(2)), 0.0, 1e-15);
  EXPECT_NEAR(scalar_product(G, x, v, v), quadratic_form(G, x, v).value, 1e-12);
}

TEST(Metric, ParallelogramAndKernelOrthogonality) {
  const auto S = builtins::singruppo();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 30; ++t) {
    const Point x = vec({u(rng), u(rng), t % 3 == 0 ? 0.0 : u(rng)});
    const Eigen::MatrixXd F = S.frame_matrix(x);
    const Point v = F * vec({u(rng), u(rng), u(rng)}), w = F * vec({u(rng), u(rng), u(rng)});
    const double lhs = quadratic_form(S, x, v + w).value + quadratic_form(S, x, v - w).value;
    const double rhs = 2 * quadratic_form(S, x, v).value + 2 * quadratic_form(S, x, w).value;
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, rhs));
    const Eigen::MatrixXd K = frame_kernel(S, x);
    const auto c = min_norm_controls(S, x, v);
    for (Eigen::Index k = 0; k < K.cols(); ++k) EXPECT_LE(std::abs(c.dot(K.col(k))), 1e-9);
  }
}

TEST(Metric, OrthogonalRecombinationInvariance) {
  const auto H = builtins::heisenberg();
  const auto f = H.polynomial_frame();
  const Rational a(3, 5), b(4, 5);
  const SubRiemannianStructure R("rotated", std::vector<PolyVectorField>{a * f[0] - b * f[1], b * f[0] + a * f[1]});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const Point x = vec({u(rng), u(rng), u(rng)});
    const Point v = H.frame_matrix(x) * vec({u(rng), u(rng)});
    const double g1 = quadratic_form(H, x, v).value, g2 = quadratic_form(R, x, v).value;
    EXPECT_NEAR(g1, g2, 1e-9 * g1);
  }
}
