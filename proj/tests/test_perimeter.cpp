#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "srg/builtins.hpp"
#include "srg/errors.hpp"
#include "srg/pairing.hpp"
#include "srg/perimeter.hpp"
#include "srg/text_format.hpp"
#include "test_util.hpp"

using namespace srg;
using srg::testing::vec;

namespace {

SetRep set_of(const std::string& level, std::size_t n, const Box& box, int res = 128) {
  return SetRep(parse_polynomial(level, n), box, res);
}

void expect_rel(double got, double want, double rel) { EXPECT_NEAR(got, want, rel * std::abs(want)) << got; }

}  // namespace

TEST(Perimeter, EuclideanHalfplaneAllEstimators) {
  const auto S = builtins::euclidean(2);
  const auto E = set_of("x1", 2, Box::cube(2, -1.0, 1.0));
  const auto R = Region::of(E.box);
  const auto s = surface_estimator(S, E, R);
  expect_rel(s.total_variation, 2.0, 1e-9);
  expect_rel(s.per_field[0], -2.0, 1e-9);
  EXPECT_NEAR(s.per_field[1], 0.0, 1e-12);
  expect_rel(flow_estimator(S, E, S.polynomial_frame()[0], R).value, 2.0, 0.01);
  EXPECT_NEAR(flow_estimator(S, E, S.polynomial_frame()[1], R).value, 0.0, 1e-12);
  const auto mo = mollified_estimator(S, E, R);
  expect_rel(mo.total_variation, 2.0, 0.01);
  expect_rel(mo.per_field[0], -2.0, 0.01);
}

TEST(Perimeter, GrushinExamples) {
  const auto S = builtins::grushin();
  const Box unit(vec({0, 0}), vec({1, 1}));
  const auto vertical = set_of("x1 - 1/2", 2, unit);
  expect_rel(surface_estimator(S, vertical, Region::of(unit)).total_variation, 1.0, 1e-9);
  const auto horizontal = set_of("x2 - 1/2", 2, unit);
  const auto s = surface_estimator(S, horizontal, Region::of(unit));
  expect_rel(s.total_variation, 0.5, 1e-6);
  expect_rel(mollified_estimator(S, horizontal, Region::of(unit)).total_variation, 0.5, 0.05);
  expect_rel(flow_estimator(S, horizontal, S.polynomial_frame()[1], Region::of(unit)).value, 0.5, 0.05);
}

TEST(Perimeter, EmptySetAndConstantIndicator) {
  const auto S = builtins::heisenberg();
  const auto E = set_of("1 + x1*x1", 3, Box::cube(3, -1.0, 1.0), 32);
  const auto s = surface_estimator(S, E, Region::of(E.box));
  EXPECT_EQ(s.total_variation, 0.0);
  EXPECT_EQ(s.facets, 0u);
  const auto full = set_of("-1 - x1*x1", 3, Box::cube(3, -1.0, 1.0), 32);
  EXPECT_NEAR(mollified_estimator(S, full, Region::of(full.box)).total_variation, 0.0, 1e-12);
}

TEST(Perimeter, SurfaceEstimatorCircle) {
  // unit circle: perimeter 2 pi, per-field signed values vanish by symmetry
  const auto S = builtins::euclidean(2);
  const auto E = set_of("x1*x1 + x2*x2 - 1", 2, Box::cube(2, -1.5, 1.5), 64);
  const auto s = surface_estimator(S, E, Region::of(E.box));
  // facets are chords: O(h^2) deficit
  expect_rel(s.total_variation, 2 * std::numbers::pi, 1e-3);
  EXPECT_NEAR(s.per_field[0], 0.0, 1e-9);
  // sphere area 4 pi
  const auto S3 = builtins::euclidean(3);
  const auto B = set_of("x1*x1 + x2*x2 + x3*x3 - 1", 3, Box::cube(3, -1.5, 1.5), 48);
  expect_rel(surface_estimator(S3, B, Region::of(B.box)).total_variation, 4 * std::numbers::pi, 3e-3);
}

TEST(Perimeter, SmearedDeltaInFourDimensions) {
  const auto S = builtins::euclidean(4);
  const auto E = set_of("x1", 4, Box::cube(4, -1.0, 1.0), 24);
  expect_rel(surface_estimator(S, E, Region::of(E.box)).total_variation, 8.0, 0.02);
}

TEST(Perimeter, VariationBoundsAndSuperadditivity) {
  const auto S = builtins::heisenberg();
  const auto E = set_of("x1 + x2*x3 - 1/4*x3*x3", 3, Box::cube(3, -1.0, 1.0), 64);
  const auto whole = surface_estimator(S, E, Region::of(E.box));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(std::abs(whole.per_field[i]), whole.total_variation);
  const auto left = surface_estimator(S, E, Region::of(Box(vec({-1, -1, -1}), vec({1, 0, 1}))));
  const auto right = surface_estimator(S, E, Region::of(Box(vec({-1, 0, -1}), vec({1, 1, 1}))));
  expect_rel(left.total_variation + right.total_variation, whole.total_variation, 0.02);
}

TEST(Perimeter, OrthogonalRecombinationInvariance) {
  const auto H = builtins::heisenberg();
  const auto f = H.polynomial_frame();
  const Rational c(3, 5), s(4, 5);
  const SubRiemannianStructure R("rotated", std::vector<PolyVectorField>{c * f[0] + s * f[1], c * f[1] - s * f[0]});
  const auto E = set_of("x1*x1 + x2*x2 + 4*x3*x3 - 1/2", 3, Box::cube(3, -1.0, 1.0), 64);
  expect_rel(surface_estimator(R, E, Region::of(E.box)).total_variation,
             surface_estimator(H, E, Region::of(E.box)).total_variation, 0.02);
}

TEST(Perimeter, DualNormalSigns) {
  const auto S = builtins::euclidean(2);
  const auto E = set_of("x1", 2, Box::cube(2, -1.0, 1.0));
  const auto nu = dual_normal(S, E, vec({0, 0.3}));
  EXPECT_NEAR(nu[0], -1.0, 1e-14);
  EXPECT_NEAR(nu[1], 0.0, 1e-14);
  const auto G = builtins::grushin();
  const auto Eg = set_of("x2", 2, Box::cube(2, -3.0, 3.0));
  const auto ng = dual_normal(G, Eg, vec({0.7, 0}));
  EXPECT_NEAR(ng[0], 0.0, 1e-14);
  EXPECT_NEAR(ng[1], -1.0, 1e-14);
  EXPECT_THROW(dual_normal(G, Eg, vec({0, 0})), CharacteristicPoint);
  EXPECT_THROW(dual_normal(G, Eg, vec({1, 0.5})), InvalidInput);
}

TEST(Perimeter, GeometricNormalIsUnit) {
  const auto G = builtins::grushin();
  const auto Eg = set_of("x2", 2, Box::cube(2, -3.0, 3.0));
  const auto g = geometric_normal(G, Eg, vec({2, 0}));
  EXPECT_NEAR(g.vector[0], 0.0, 1e-14);
  EXPECT_NEAR(g.vector[1], -2.0, 1e-14);
  EXPECT_NEAR(g.G, 1.0, 1e-12);

  const auto H = builtins::heisenberg();
  const auto blob = set_of("x1*x1 + 2*x2*x2 + 3*x3*x3 + x1*x3 - 1/2", 3, Box::cube(3, -1.5, 1.5));
  const auto pts = sample_boundary(blob, 50, 9);
  ASSERT_EQ(pts.size(), 50u);
  for (const auto& p : pts) {
    try {
      EXPECT_TRUE(geometric_normal(H, blob, p).unit);
    } catch (const CharacteristicPoint&) {
    }
  }
}

TEST(Perimeter, DualNormalMatchesPairing) {
  // <D_{X_i} 1_E, phi> against the surface integral of nu*_i phi d||D 1_E||
  const auto H = builtins::heisenberg();
  const auto frame = H.polynomial_frame();
  const auto E = set_of("x1 + x3*x3 + 1/2*x2*x2 - 1/10", 3, Box::cube(3, -1.0, 1.0), 96);
  const Grid g(E.box, 96);
  const auto u = GridFunction::sample(g, [&](std::span<const double> x) { return occupancy(E, x, std::vector<double>(3, 2.0 / 96)); });
  const PolynomialBump phi(vec({0.1, 0.05, -0.1}), vec({0.45, 0.45, 0.45}));
  std::vector<double> surf(2, 0.0);
  const NumericFrame F(H.frame);
  boundary_quadrature(H, E, Region::of(E.box), [&](std::span<const double> q, std::span<const double> nin, double w) {
    double Fx[6];
    F.eval(q.data(), Fx);
    for (int i = 0; i < 2; ++i) surf[i] += (Fx[i * 3] * nin[0] + Fx[i * 3 + 1] * nin[1] + Fx[i * 3 + 2] * nin[2]) * phi.value(q) * w;
  });
  for (int i = 0; i < 2; ++i) {
    const double pair = pair_distributional(frame[i], u, phi, std::nullopt);
    EXPECT_NEAR(pair, surf[i], 0.05 * std::abs(surf[0]) + 1e-9) << i;
  }
  EXPECT_LT(surf[0], 0.0);
}

TEST(Perimeter, SerialMatchesParallel) {
  const auto H = builtins::heisenberg();
  const auto E = set_of("x1 + x3*x3", 3, Box::cube(3, -1.0, 1.0), 48);
  const auto a = surface_estimator(H, E, Region::of(E.box), Exec::Parallel);
  const auto b = surface_estimator(H, E, Region::of(E.box), Exec::Serial);
  EXPECT_EQ(a.total_variation, b.total_variation);
  const auto c = mollified_estimator(H, E, Region::of(E.box), {}, Exec::Parallel);
  const auto d = mollified_estimator(H, E, Region::of(E.box), {}, Exec::Serial);
  EXPECT_EQ(c.total_variation, d.total_variation);
}

TEST(Perimeter, EuclideanDensityRatio) {
  const auto S = builtins::euclidean(2);
  const auto E = set_of("x1", 2, Box::cube(2, -1.0, 1.0));
  for (double r : {0.5, 0.125}) {
    BallMaskOptions o;
    o.resolution = 64;
    expect_rel(density_ratio(S, E, vec({0, 0}), r, o).ratio, 2.0 / std::numbers::pi, 0.03);
  }
}

TEST(Perimeter, ReducedBoundaryScores) {
  const auto H = builtins::heisenberg();
  BallMaskOptions o;
  o.resolution = 16;
  const auto plane = set_of("x1", 3, Box::cube(3, -1.0, 1.0), 32);
  const auto flat = reduced_boundary_score(H, plane, vec({0, 0, 0}), {0.5, 0.25}, o);
  for (double v : flat.score) EXPECT_NEAR(v, 0.0, 1e-12);

  const auto S = builtins::euclidean(2);
  const auto disk = set_of("x1*x1 + x2*x2 - 1", 2, Box::cube(2, -2.0, 2.0), 256);
  const auto sc = reduced_boundary_score(S, disk, vec({1, 0}), {0.5, 0.125}, o);
  EXPECT_LT(sc.score[1], sc.score[0]);
}
