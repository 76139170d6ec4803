// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "srg/blowup.hpp"
#include "srg/builtins.hpp"
#include "srg/carnot.hpp"
#include "srg/ccdist.hpp"
#include "srg/errors.hpp"
#include "srg/nilpotent.hpp"
#include "srg/pairing.hpp"
#include "srg/perimeter.hpp"
#include "srg/text_format.hpp"
#include "test_util.hpp"

using namespace srg;
using srg::testing::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = t <= budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  fmt::print("{} {:>2} {:<34} {:>8.2f} s / {:>5.0f} s  {}{}\n", pass ? "PASS" : "FAIL", id, name, t, budget_s, o.detail,
             in_time ? "" : "  [over time budget]");
  std::fflush(stdout);
}

void check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    o.detail += "[" + what + "] ";
  }
}

Point origin(std::size_t n) { return Point::Zero(static_cast<Eigen::Index>(n)); }

// step-2 BCH for [X1, X2] = d3
Point bch_heisenberg(const Point& x, const Point& y) {
  return vec({x[0] + y[0], x[1] + y[1], x[2] + y[2] + 0.5 * (x[0] * y[1] - x[1] * y[0])});
}

Point uniform_point(std::mt19937_64& rng, std::size_t n, double a) {
  std::uniform_real_distribution<double> U(-a, a);
  Point p(static_cast<Eigen::Index>(n));
  for (auto& v : p) v = U(rng);
  return p;
}

SetRep blob(std::size_t n) {
  // ellipsoid-like smooth set around the origin, sheared so no axis is special
  Polynomial p = Polynomial::constant(n, Rational(-1, 2));
  for (std::size_t j = 0; j < n; ++j)
    p += Rational(static_cast<long>(j % 3) + 1) * Polynomial::variable(n, j) * Polynomial::variable(n, j);
  if (n > 1) p += Rational(1, 2) * Polynomial::variable(n, 0) * Polynomial::variable(n, n - 1);
  return SetRep(p, Box::cube(n, 1.5), 64);
}

Outcome symbolic() {
  Outcome o;
  const auto H = builtins::heisenberg().polynomial_frame();
  check(o, lie_bracket(H[0], H[1]) == PolyVectorField::coordinate(3, 2), "heisenberg [X1,X2] = d3");
  const auto G = builtins::grushin().polynomial_frame();
  check(o, lie_bracket(G[0], G[1]) == PolyVectorField::coordinate(2, 1), "grushin [d1, x1 d2] = d2");
  std::mt19937_64 rng(2024);
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    const auto X = srg::testing::random_field(rng, n, 3);
    const auto Y = srg::testing::random_field(rng, n, 3);
    const auto Z = srg::testing::random_field(rng, n, 3);
    const auto J = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y));
    if (!J.is_zero()) ++bad;
  }
  check(o, bad == 0, fmt::format("jacobi failures {}", bad));
  o.detail += "100 random Jacobi triples exact";
  return o;
}

Outcome flags() {
  Outcome o;
  using V = std::vector<int>;
  for (std::size_t n : {2u, 3u, 5u}) {
    const auto f = growth_vector(builtins::euclidean(n), origin(n));
    check(o, f.growth == V{static_cast<int>(n)} && f.Q == static_cast<int>(n), fmt::format("euclidean:{}", n));
  }
  const auto h = growth_vector(builtins::heisenberg(), vec({0.3, -0.2, 0.7}));
  check(o, h.growth == V({2, 3}) && h.weights == V({1, 1, 2}) && h.Q == 4, "heisenberg (2,3)/(1,1,2)/4");
  const auto G = builtins::grushin();
  check(o, growth_vector(G, vec({0, 0.4})).growth == V({1, 2}), "grushin on axis (1,2)");
  check(o, growth_vector(G, vec({0.5, 0.4})).growth == V({2}), "grushin off axis (2)");
  const auto Sg = builtins::singruppo();
  check(o, growth_vector(Sg, vec({0.2, -0.1, 0})).growth == V({2, 3}), "singruppo on Sigma (2,3)");
  check(o, growth_vector(Sg, vec({0.2, -0.1, 0.5})).growth == V({3}), "singruppo off Sigma (3)");
  for (int k : {1, 2, 3}) {
    const std::size_t n = static_cast<std::size_t>(2 * k + 1);
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    const auto f = growth_vector(builtins::contact_corank1(k), uniform_point(rng, n, 1.0));
    check(o, f.growth == V({static_cast<int>(n) - 1, static_cast<int>(n)}), fmt::format("contact n={}", n));
  }
  o.detail += "euclidean, heisenberg, grushin, singruppo, contact";
  return o;
}

Outcome nilpotent() {
  Outcome o;
  const auto S = builtins::singruppo();
  const auto na = truncate(S, grading_at_origin(S));
  const auto H = builtins::heisenberg().polynomial_frame();
  check(o, na.truncated.size() == 3 && na.truncated[0] == H[0] && na.truncated[1] == H[1] && na.truncated[2].is_zero(),
        "singruppo truncation = heisenberg + 0");
  const auto G = builtins::grushin();
  const auto ng = truncate(G, grading_at_origin(G));
  check(o, ng.truncated == G.polynomial_frame(), "grushin truncation identity");
  const auto R = parse_field("x3^2*d3", 3);
  for (const Rational r : {Rational(1, 2), Rational(1, 3), Rational(2, 7)})
    check(o, remainder_rescale(R, Grading({1, 1, 2}), r) == (r * r * r) * R, "remainder r^3 scaling");
  o.detail += "exact";
  return o;
}

Outcome distances() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst_e = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Point a = uniform_point(rng, 3, 1.0), b = uniform_point(rng, 3, 1.0);
    const double d = distance(builtins::euclidean(3), a, b).value;
    worst_e = std::max(worst_e, std::abs(d - (a - b).norm()) / (a - b).norm());
  }
  check(o, worst_e <= 0.01, fmt::format("euclidean rel err {:.2e}", worst_e));

  const auto H = builtins::heisenberg();
  const double d1 = distance(H, origin(3), vec({1, 0, 0})).value;
  check(o, std::abs(d1 - 1.0) <= 0.01, fmt::format("d(0,e1) = {:.5f}", d1));

  const Grading g({1, 1, 2});
  double worst_h = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Point z = uniform_point(rng, 3, 0.6);
    const double dz = distance(H, origin(3), z).value;
    const double d2 = distance(H, origin(3), dilate(z, g, 2.0)).value;
    worst_h = std::max(worst_h, std::abs(d2 - 2 * dz) / (2 * dz));
  }
  check(o, worst_h <= 0.02, fmt::format("homogeneity {:.2e}", worst_h));

  double worst_t = -1.0;
  for (int k = 0; k < 30; ++k) {
    const Point a = uniform_point(rng, 3, 0.6), b = uniform_point(rng, 3, 0.6), c = uniform_point(rng, 3, 0.6);
    const double ac = distance(H, a, c).value, ab = distance(H, a, b).value, bc = distance(H, b, c).value;
    worst_t = std::max(worst_t, (ac - ab - bc) / ac);
  }
  check(o, worst_t <= 0.03, fmt::format("triangle excess {:.2e}", worst_t));

  // the graph sweep is an independent upper bound on d(0, state)
  const NumericFrame F(H.frame);
  GraphSweepOptions go;
  go.max_layers = 16;
  const auto sweep = control_graph_sweep(F, origin(3), origin(3), Point::Constant(3, 1.0 / 32), std::nullopt, go);
  std::uniform_int_distribution<std::size_t> pick(1, sweep.state.size() - 1);
  double worst_g = -1.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = pick(rng);
    const double d = distance(H, origin(3), sweep.state[i]).value;
    worst_g = std::max(worst_g, (d - sweep.cost(i)) / sweep.cost(i));
  }
  // solver slack: the penalized endpoint leaves at most 1% on the value
  check(o, worst_g <= 0.01, fmt::format("solver above graph bound by {:.2e}", worst_g));
  o.detail += fmt::format("eucl {:.1e}, d(0,e1)-1 {:.1e}, homog {:.1e}, triangle {:.1e}, graph {:.1e}", worst_e,
                          d1 - 1.0, worst_h, worst_t, worst_g);
  return o;
}

Outcome tangent() {
  Outcome o;
  const auto S = builtins::singruppo();
  const auto rep = tangent_convergence(S, grading_at_origin(S), {});
  const auto& s = rep.sup_gap;
  bool decreasing = s.size() == 3;
  for (std::size_t k = 1; k < s.size(); ++k) decreasing = decreasing && s[k] < s[k - 1];
  check(o, decreasing, "strictly decreasing");
  check(o, s.back() < 0.1 * s.front(), "final < 0.1 initial");
  check(o, rep.excluded.empty(), fmt::format("{} pairs excluded", rep.excluded.size()));
  o.detail += fmt::format("sup gaps {:.3e} {:.3e} {:.3e} over 20 pairs", s[0], s[1], s[2]);
  return o;
}

Outcome group() {
  Outcome o;
  const auto na = truncate(builtins::heisenberg(), Grading({1, 1, 2}));
  const auto law = group_law_from_flows(na);
  std::mt19937_64 rng(6);
  double bch = 0.0, ax = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Point x = uniform_point(rng, 3, 2.0), y = uniform_point(rng, 3, 2.0), z = uniform_point(rng, 3, 2.0);
    bch = std::max(bch, (law(x, y) - bch_heisenberg(x, y)).norm());
    ax = std::max(ax, (law(origin(3), x) - x).norm());
    ax = std::max(ax, (law(x, origin(3)) - x).norm());
    ax = std::max(ax, law(x, law.inverse(x)).norm());
    ax = std::max(ax, (law(law(x, y), z) - law(x, law(y, z))).norm());
    const double lam = 0.3 + 0.1 * k;
    ax = std::max(ax, (dilate(law(x, y), na.grading, lam) - law(dilate(x, na.grading, lam), dilate(y, na.grading, lam))).norm());
  }
  check(o, bch <= 1e-8, "BCH");
  check(o, ax <= 1e-8, "axioms");
  o.detail += fmt::format("BCH {:.1e}, axioms {:.1e}", bch, ax);
  return o;
}

Outcome perimeters() {
  Outcome o;
  struct Case {
    const char* name;
    SubRiemannianStructure S;
    std::string level;
    Box box;
    double truth;
  };
  std::vector<Case> cases{
      {"euclid", builtins::euclidean(2), "x1", Box::cube(2, -1.0, 1.0), 2.0},
      {"grushin", builtins::grushin(), "x2 - 1/2", Box::cube(2, 0.0, 1.0), 0.5},
      // int over the face {x1 = 0} of [-1,1]^3 of |<X1, e1>| = 1
      {"heis", builtins::heisenberg(), "x1", Box::cube(3, -1.0, 1.0), 4.0},
  };
  for (const auto& c : cases) {
    const SetRep E(parse_polynomial(c.level, c.S.dim), c.box, 128);
    const Region R = Region::of(E.box);
    const auto s = surface_estimator(c.S, E, R);
    const auto f = flow_report(c.S, E, R);
    const auto m = mollified_estimator(c.S, E, R);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); };
    double worst = std::max({rel(s.total_variation, c.truth), rel(m.total_variation, s.total_variation)});
    for (std::size_t i = 0; i < s.per_field_variation.size(); ++i) {
      const double a = s.per_field_variation[i], b = f.per_field_variation[i];
      worst = std::max(worst, std::abs(a - b) / std::max(s.total_variation, 1e-12));
    }
    check(o, worst <= 0.05, c.name);
    o.detail += fmt::format("{}: S {:.4f} F {:.4f} M {:.4f} (dev {:.1e}); ", c.name, s.total_variation,
                            f.per_field_variation[0] + (f.per_field_variation.size() > 1 ? f.per_field_variation[1] : 0.0),
                            m.total_variation, worst);
  }
  return o;
}

Outcome normals() {
  Outcome o;
  std::vector<SubRiemannianStructure> all{builtins::euclidean(2),   builtins::euclidean(3), builtins::heisenberg(),
                                          builtins::grushin(),      builtins::grushin_alpha(2), builtins::singruppo(),
                                          builtins::rototranslation(), builtins::contact_corank1(2)};
  double worst = 0.0;
  int used = 0;
  for (const auto& S : all) {
    const SetRep E = blob(S.dim);
    const auto pts = sample_boundary(E, 50, 77);
    check(o, pts.size() == 50, S.name + " samples");
    for (const auto& p : pts) {
      try {
        const auto g = geometric_normal(S, E, p);
        worst = std::max(worst, std::abs(g.G - 1.0));
        ++used;
      } catch (const CharacteristicPoint&) {
      }
    }
  }
  check(o, worst <= 1e-6, "G(nu_E) = 1");

  // <D_{X_i} 1_E, phi> against int nu*_i phi d||D 1_E|| with nu* from dual_normal
  const auto H = builtins::heisenberg();
  const auto frame = H.polynomial_frame();
  const SetRep E(parse_polynomial("x1 + x3^2 + 1/2*x2^2 - 1/10", 3), Box::cube(3, 1.0), 128);
  const Grid g(E.box, 128);
  const std::vector<double> h(3, 2.0 / 128);
  const auto u = GridFunction::sample(g, [&](std::span<const double> x) { return occupancy(E, x, h); });
  const PolynomialBump phi(vec({0.1, 0.05, -0.1}), vec({0.45, 0.45, 0.45}));
  const NumericFrame F(H.frame);
  std::vector<double> surf(2, 0.0);
  boundary_quadrature(H, E, Region::of(E.box), [&](std::span<const double> q, std::span<const double>, double w) {
    const double ph = phi.value(q);
    if (ph == 0.0) return;
    const Point qp = Eigen::Map<const Point>(q.data(), 3);
    double Fx[6], grad[3];
    F.eval(q.data(), Fx);
    const double gn = E.gradient(q, grad);
    double N2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double Ni = -(Fx[i * 3] * grad[0] + Fx[i * 3 + 1] * grad[1] + Fx[i * 3 + 2] * grad[2]) / gn;
      N2 += Ni * Ni;
    }
    try {
      const auto nu = dual_normal(H, E, qp);
      for (int i = 0; i < 2; ++i) surf[i] += nu[i] * std::sqrt(N2) * ph * w;
    } catch (const CharacteristicPoint&) {
    }
  });
  double dev = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double pair = pair_distributional(frame[i], u, phi, std::nullopt);
    dev = std::max(dev, std::abs(pair - surf[i]) / std::abs(surf[0]));
    check(o, pair * surf[i] >= 0.0 || std::abs(surf[i]) < 1e-3 * std::abs(surf[0]), fmt::format("sign X{}", i + 1));
  }
  check(o, dev <= 0.05, "pairing consistency");
  o.detail += fmt::format("{} points, max |G-1| {:.1e}; pairing dev {:.1e}", used, worst, dev);
  return o;
}

Outcome blowup() {
  Outcome o;
  const auto S = builtins::heisenberg();
  const SetRep E(parse_polynomial("x1 + x3^2", 3), Box::cube(3, 1.0), 128);
  const auto rep = blowup_run(S, E, origin(3), {});
  const std::size_t K = rep.radii.size();
  bool dec = K == 4;
  for (std::size_t k = 1; k < K; ++k) dec = dec && rep.l1_gap[k] < rep.l1_gap[k - 1];
  check(o, dec, "l1 gap decreasing");
  check(o, rep.l1_gap.back() < 0.05 * rep.window_volume, "final gap < 5% window");
  for (double gval : rep.l1_gap) check(o, gval >= 0.0, "gap >= 0");

  // quadrature tolerance: the largest pairing on the limit set that vanishes in the continuum
  double tol = 0.0;
  for (const auto& row : rep.limit_invariance)
    for (double v : row) tol = std::max(tol, std::abs(v));
  double mono = -1e300;
  for (const auto& row : rep.monotone_pairings)
    for (double v : row) mono = std::max(mono, v);
  check(o, mono <= tol, "monotone pairings <= tolerance");

  std::vector<double> excess(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < rep.invariance_pairings[k].size(); ++j)
      for (std::size_t b = 0; b < rep.invariance_pairings[k][j].size(); ++b)
        excess[k] = std::max(excess[k], std::abs(rep.invariance_pairings[k][j][b] - rep.limit_invariance[j][b]));
  bool inv_dec = true;
  double rmin = 1e300, rmax = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0) inv_dec = inv_dec && excess[k] < excess[k - 1];
    const double ratio = excess[k] / rep.l1_gap[k];
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  check(o, inv_dec, "invariance pairings decreasing");
  check(o, rmax <= 10.0 * rmin, "invariance proportional to gap");

  const double lhs = rep.density_lhs.back();
  check(o, std::isfinite(lhs) && lhs > 0.0 && rep.density_rhs > 0.0, "densities positive");
  check(o, std::abs(lhs - rep.density_rhs) <= 0.10 * rep.density_rhs, "density lhs within 10% of rhs");

  // slab between z1 = 0 and z1 = -r^3 z3^2 over [-1,1]^3
  const double oracle = 4.0 / 3.0 * std::pow(rep.radii.back(), 3);
  o.detail += fmt::format("gaps {:.2e}..{:.2e} (slab {:.2e}), mono max {:.2e} tol {:.1e}, inv/gap {:.1e}..{:.1e}, "
                          "density {:.4f} vs {:.4f}",
                          rep.l1_gap.front(), rep.l1_gap.back(), oracle, mono, tol, rmin, rmax, lhs, rep.density_rhs);
  return o;
}

Outcome honesty() {
  Outcome o;
  bool refused = false;
  try {
    const SetRep E(parse_polynomial("x3", 3), Box::cube(3, 1.0), 32);
    BlowupOptions b;
    b.density = false;
    blowup_run(builtins::heisenberg(), E, origin(3), b);
  } catch (const CharacteristicPoint& e) {
    refused = !std::string(e.what()).empty() && e.point().size() == 3;
  }
  check(o, refused, "characteristic refusal");
  bool hormander = false;
  try {
    growth_vector(SubRiemannianStructure("line", std::vector<PolyVectorField>{PolyVectorField::coordinate(2, 0)}),
                  origin(2));
  } catch (const HormanderViolation& e) {
    hormander = e.achieved_dim() == 1;
  }
  check(o, hormander, "hormander violation");
  o.detail += "characteristic point refused; d1 in R^2 rejected";
  return o;
}

}  // namespace

int main() {
  criterion(1, "symbolic exactness", 1, symbolic);
  criterion(2, "flags", 5, flags);
  criterion(3, "nilpotent approximation", 1, nilpotent);
  criterion(4, "distance solver", 600, distances);
  criterion(5, "tangent convergence (singruppo)", 900, tangent);
  criterion(6, "group law", 5, group);
  criterion(7, "perimeter cross-validation", 300, perimeters);
  criterion(8, "riesz / normals", 120, normals);
  criterion(9, "blowup (heisenberg)", 1800, blowup);
  criterion(10, "degenerate-input honesty", 1, honesty);
  fmt::print("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
