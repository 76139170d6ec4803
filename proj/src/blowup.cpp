#include "srg/blowup.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "srg/errors.hpp"
#include "srg/pairing.hpp"

namespace srg {

namespace {

// voxels with unknown state beyond this fraction of the inside count drop a radius
constexpr double kUnknownBudget = 0.01;

Rational power(const Rational& r, int k) {
  Rational out(1);
  for (int i = 0; i < k; ++i) out *= r;
  return out;
}

Box default_window(const Grading& g) { return Box::cube(g.dim(), 1.0); }

std::vector<BumpSpec> default_bumps(std::size_t n) {
  std::vector<BumpSpec> out;
  const Point half = Point::Constant(static_cast<Eigen::Index>(n), 0.5);
  out.push_back({Point::Zero(static_cast<Eigen::Index>(n)), half});
  for (std::size_t a : {std::size_t{1}, std::size_t{2}}) {
    if (a >= n) continue;
    Point c = Point::Zero(static_cast<Eigen::Index>(n));
    c[static_cast<Eigen::Index>(a)] = 0.3;
    out.push_back({c, half});
  }
  return out;
}

bool is_homogeneous(const SubRiemannianStructure& S, const NilpotentApprox& na) {
  if (S.weight || !S.is_polynomial()) return false;
  for (const auto& R : na.remainders)
    if (!R.is_zero()) return false;
  return true;
}

PolyVectorField combine(const std::vector<PolyVectorField>& X, const Eigen::VectorXd& c) {
  PolyVectorField out = Rational(0) * X[0];
  for (std::size_t i = 0; i < X.size(); ++i) out += to_rational(c[static_cast<Eigen::Index>(i)]) * X[i];
  return out;
}

}  // namespace

SetRep rescale_set(const SetRep& E, const Point& p, const Grading& g, const Rational& r,
                   const std::optional<Box>& window) {
  const std::size_t n = E.dim();
  if (g.dim() != n || static_cast<std::size_t>(p.size()) != n)
    throw InvalidInput("rescale_set: dimension mismatch");
  std::vector<Polynomial> subs;
  for (std::size_t j = 0; j < n; ++j)
    subs.push_back(Polynomial::constant(n, to_rational(p[static_cast<Eigen::Index>(j)])) +
                   power(r, g.weights[j]) * Polynomial::variable(n, j));
  return SetRep(E.level.compose(subs), window ? *window : E.box, E.resolution);
}

GridFunction occupancy_grid(const SetRep& E, const Grid& g, Exec exec) {
  GridFunction u(g);
  const std::size_t n = g.dim();
  std::vector<double> h(n);
  for (std::size_t a = 0; a < n; ++a) h[a] = g.spacing(a);
  for_each_index(
      g.size(),
      [&](std::size_t v) {
        double x[16];
        g.center(v, std::span<double>(x, n));
        u.values[v] = occupancy(E, std::span<const double>(x, n), h);
      },
      exec);
  return u;
}

double l1_gap(const SetRep& A, const SetRep& B, const Box& window, int resolution, Exec exec) {
  if (A.dim() != B.dim() || window.dim() != A.dim()) throw InvalidInput("l1_gap: dimension mismatch");
  const Grid g(window, resolution);
  const std::size_t n = g.dim();
  std::vector<double> h(n);
  for (std::size_t a = 0; a < n; ++a) h[a] = g.spacing(a);
  return chunked_sum(
             g.size(),
             [&](std::size_t v) {
               double x[16];
               g.center(v, std::span<double>(x, n));
               const std::span<const double> xs(x, n);
               return std::abs(occupancy(A, xs, h) - occupancy(B, xs, h));
             },
             exec) *
         g.cell_volume();
}

double monotonicity_pairing(const GridFunction& u, const PolyVectorField& X, const TestFunction& psi, Exec exec) {
  if (!psi.nonnegative()) throw InvalidInput("monotonicity pairing needs a nonnegative test function");
  return -pair_distributional(X, u, psi, std::nullopt, exec);
}

BallMask dilate_ball(const BallMask& unit, const Grading& g, double r) {
  if (unit.center.norm() != 0.0) throw InvalidInput("dilate_ball: ball must be centered at the origin");
  BallMask out = unit;
  const double s = r / unit.radius;
  const Box& b = unit.grid.box();
  out.grid = Grid(Box(dilate(b.lo, g, s), dilate(b.hi, g, s)), unit.grid.resolution());
  out.radius = r;
  for (double& d : out.dist) d *= s;
  return out;
}

BlowupReport blowup_run(const SubRiemannianStructure& S, const SetRep& E, const Point& p, const BlowupOptions& opts) {
  const std::size_t n = S.dim;
  if (E.dim() != n || static_cast<std::size_t>(p.size()) != n) throw InvalidInput("blowup: dimension mismatch");
  if (p.norm() != 0.0)
    throw PreconditionError("blowup expects privileged coordinates centered at p; translate p to the origin");
  if (opts.radii.empty()) throw InvalidInput("blowup: empty radii schedule");

  BlowupReport rep;
  rep.p = p;
  // refuses at characteristic points before any tangent work
  rep.nu = dual_normal(S, E, p);

  const NilpotentApprox na = truncate(S, grading_at_origin(S));
  const GroupLaw law = group_law_from_flows(na);
  (void)law;
  rep.F = vertical_halfspace(rep.nu, na);
  rep.window = opts.window ? *opts.window : default_window(na.grading);
  rep.window_volume = rep.window.volume();
  rep.homogeneous = is_homogeneous(S, na);

  const std::size_t m = na.truncated.size();
  const PolyVectorField normal_field = combine(na.truncated, rep.nu);
  std::vector<PolyVectorField> ortho;
  if (m > 1) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(rep.nu);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                                             static_cast<Eigen::Index>(m));
    for (std::size_t j = 1; j < m; ++j) {
      const Eigen::VectorXd c = Q.col(static_cast<Eigen::Index>(j));
      ortho.push_back(combine(na.truncated, c));
    }
  }
  const auto specs = opts.bumps.empty() ? default_bumps(n) : opts.bumps;
  std::vector<PolynomialBump> bumps;
  for (const auto& b : specs) bumps.emplace_back(b.center, b.half_widths);

  const Grid grid(rep.window, opts.resolution);
  const SetRep Fset(rep.F.level, rep.window, opts.resolution);

  auto pairings = [&](const GridFunction& u, std::vector<double>& mono, std::vector<std::vector<double>>& inv) {
    mono.clear();
    inv.assign(ortho.size(), {});
    for (const auto& psi : bumps) {
      mono.push_back(monotonicity_pairing(u, normal_field, psi, opts.exec));
      for (std::size_t j = 0; j < ortho.size(); ++j)
        inv[j].push_back(monotonicity_pairing(u, ortho[j], psi, opts.exec));
    }
  };
  pairings(occupancy_grid(Fset, grid, opts.exec), rep.limit_monotone, rep.limit_invariance);

  for (const auto& r : opts.radii) {
    const double rd = to_double(r);
    rep.radii.push_back(rd);
    SetRep Er = rescale_set(E, p, na.grading, r, rep.window);
    Er.resolution = opts.resolution;
    rep.l1_gap.push_back(l1_gap(Er, Fset, rep.window, opts.resolution, opts.exec));
    rep.monotone_pairings.emplace_back();
    rep.invariance_pairings.emplace_back();
    pairings(occupancy_grid(Er, grid, opts.exec), rep.monotone_pairings.back(), rep.invariance_pairings.back());
  }

  if (!opts.density) return rep;

  const SubRiemannianStructure tangent = na.structure("tangent");
  const Point origin = Point::Zero(static_cast<Eigen::Index>(n));
  const BallMask unit = ball_mask(rep.homogeneous ? S : tangent, origin, 1.0, opts.ball);
  rep.density_rhs = halfspace_perimeter_unit_ball(rep.F, na, unit).ratio;
  if (rep.homogeneous) rep.notes.push_back("structure equals its tangent: B_r computed as delta_r B_1");

  for (double rd : rep.radii) {
    const BallMask ball = rep.homogeneous ? dilate_ball(unit, na.grading, rd) : ball_mask(S, origin, rd, opts.ball);
    const double inside = static_cast<double>(std::max<std::size_t>(ball.inside_count(), 1));
    if (static_cast<double>(ball.unknown_count) > kUnknownBudget * inside) {
      rep.density_lhs.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.dropped_radii.push_back(rd);
      rep.notes.push_back(fmt::format("r = {}: {} unknown ball voxels, radius dropped", rd, ball.unknown_count));
      continue;
    }
    rep.density_lhs.push_back(density_ratio(S, E, ball).ratio);
  }
  return rep;
}

}  // namespace srg
