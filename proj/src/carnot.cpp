#include "srg/carnot.hpp"

#include <cmath>
#include <map>
#include <random>

#include "srg/errors.hpp"
#include "srg/numeric.hpp"

namespace srg {

namespace {

using RMatrix = std::vector<std::vector<Rational>>;

Polynomial lift_var(std::size_t dim, std::size_t i) { return Polynomial::variable(dim, i); }

// Rename variables: x_i -> x_{offset + i} in dimension dim.
Polynomial shift(const Polynomial& p, std::size_t dim, std::size_t offset) {
  std::vector<Polynomial> subs;
  for (std::size_t i = 0; i < p.dim(); ++i) subs.push_back(lift_var(dim, offset + i));
  return p.compose(subs);
}

// int_0^t p ds in the variable t
Polynomial integrate(const Polynomial& p, std::size_t t) {
  Polynomial out(p.dim());
  for (const auto& [e, c] : p.terms()) {
    auto f = e;
    ++f[t];
    out.add_term(f, c / Rational(f[t]));
  }
  return out;
}

// Incremental row reduction of fields flattened to (component, exponent) keys.
class ExactSpan {
 public:
  using Key = std::pair<std::size_t, Polynomial::Exponent>;
  using Row = std::map<Key, Rational>;

  static Row flatten(const PolyVectorField& X) {
    Row r;
    for (std::size_t j = 0; j < X.dim(); ++j)
      for (const auto& [e, c] : X[j].terms()) r[{j, e}] = c;
    return r;
  }

  // true when X is independent of the rows kept so far (and keeps it)
  bool insert(const PolyVectorField& X) {
    Row r = flatten(X);
    for (const auto& piv : rows_) {
      auto it = r.find(piv.begin()->first);
      if (it == r.end()) continue;
      const Rational f = it->second / piv.begin()->second;
      for (const auto& [k, c] : piv) {
        Rational& v = r[k];
        v -= f * c;
        v.canonicalize();
        if (v == 0) r.erase(k);
      }
    }
    if (r.empty()) return false;
    rows_.push_back(std::move(r));
    return true;
  }
  std::size_t rank() const { return rows_.size(); }

 private:
  std::vector<Row> rows_;
};

RMatrix inverse(RMatrix a) {
  const std::size_t n = a.size();
  RMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw PreconditionError("layer matrix is singular");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const Rational d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  for (auto& row : inv)
    for (auto& q : row) q.canonicalize();
  return inv;
}

// Flow of sum_k b_k B_k from x0 up to time t, as polynomials in (x0, b, t).
std::vector<Polynomial> picard_flow(const std::vector<PolyVectorField>& basis, std::size_t n) {
  const std::size_t D = 2 * n + 1, t = 2 * n;
  std::vector<Polynomial> X;
  for (std::size_t j = 0; j < n; ++j) X.push_back(lift_var(D, j));
  for (int it = 0; it < 32; ++it) {
    std::vector<Polynomial> next;
    for (std::size_t j = 0; j < n; ++j) {
      Polynomial v(D);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const Polynomial& c = basis[k][j];
        if (c.is_zero()) continue;
        v += lift_var(D, n + k) * c.compose(X);
      }
      next.push_back(lift_var(D, j) + integrate(v, t));
    }
    if (next == X) return X;
    X = std::move(next);
  }
  throw PreconditionError("flow of the truncated frame is not polynomial");
}

std::function<Point(std::span<const double>)> compile(const std::vector<Polynomial>& ps) {
  std::vector<CompiledPolynomial> c;
  for (const auto& p : ps) c.emplace_back(p);
  return [c](std::span<const double> x) {
    Point out(static_cast<Eigen::Index>(c.size()));
    for (std::size_t j = 0; j < c.size(); ++j) out[static_cast<Eigen::Index>(j)] = c[j].evaluate(x);
    return out;
  };
}

}  // namespace

GroupLaw group_law_from_flows(const NilpotentApprox& na) {
  const Grading& g = na.grading;
  const std::size_t n = g.dim();
  if (g.max_weight() > 2) throw PreconditionError("group law needs step <= 2; weights reach " +
                                                  std::to_string(g.max_weight()));
  const NilpotencyReport nil = nilpotency_check(na, 2);
  if (!nil.pass) throw PreconditionError("truncated frame is not nilpotent of step 2: " + nil.message);

  std::vector<int> H, V;
  for (std::size_t j = 0; j < n; ++j) (g.weights[j] == 1 ? H : V).push_back(static_cast<int>(j));

  ExactSpan span;
  std::vector<PolyVectorField> basis;
  for (const auto& X : na.truncated)
    if (!X.is_zero() && span.insert(X)) basis.push_back(X);
  const std::size_t n1 = basis.size();
  bool extra = false;
  for (std::size_t i = 0; i < na.truncated.size(); ++i)
    for (std::size_t j = i + 1; j < na.truncated.size(); ++j) {
      const PolyVectorField B = lie_bracket(na.truncated[i], na.truncated[j]);
      if (B.is_zero() || !span.insert(B)) continue;
      if (basis.size() < n) basis.push_back(B);
      else extra = true;
    }
  if (basis.size() != n || extra)
    throw IsotropyNotVerified("dim Lie{hat X} = " + std::to_string(span.rank()) + ", expected " + std::to_string(n));
  if (n1 != H.size()) throw IsotropyNotVerified("first layer of the Lie algebra does not match the weight-1 coordinates");

  RMatrix A(H.size(), std::vector<Rational>(H.size())), B(V.size(), std::vector<Rational>(V.size()));
  const std::vector<Rational> origin(n, Rational(0));
  for (std::size_t c = 0; c < n; ++c) {
    const auto at0 = basis[c].evaluate(std::span<const Rational>(origin));
    if (c < n1) {
      for (std::size_t r = 0; r < H.size(); ++r) A[r][c] = at0[H[r]];
    } else {
      for (std::size_t r = 0; r < H.size(); ++r)
        if (!basis[c][H[r]].is_zero()) throw PreconditionError("bracket field has a first-layer component");
      for (std::size_t r = 0; r < V.size(); ++r) {
        if (!basis[c][V[r]].is_constant()) throw PreconditionError("bracket field is not constant");
        B[r][c - n1] = at0[V[r]];
      }
    }
  }
  const RMatrix Ainv = inverse(A), Binv = V.empty() ? RMatrix{} : inverse(B);

  const std::vector<Polynomial> flow = picard_flow(basis, n);
  // exp: x0 = 0, b = a, t = 1
  std::vector<Polynomial> to_exp, to_law;
  for (std::size_t j = 0; j < n; ++j) to_exp.push_back(Polynomial(n));
  for (std::size_t k = 0; k < n; ++k) to_exp.push_back(lift_var(n, k));
  to_exp.push_back(Polynomial::constant(n, 1));
  std::vector<Polynomial> E;
  for (const auto& p : flow) E.push_back(p.compose(to_exp));

  // log by layers: a_h = A^{-1} x_h, a_v = B^{-1} (x_v - E_v(a_h, 0))
  std::vector<Polynomial> log(n, Polynomial(n));
  for (std::size_t k = 0; k < n1; ++k)
    for (std::size_t r = 0; r < H.size(); ++r)
      if (Ainv[k][r] != 0) log[k] += Ainv[k][r] * lift_var(n, static_cast<std::size_t>(H[r]));
  std::vector<Polynomial> ah(log.begin(), log.end());
  for (std::size_t k = n1; k < n; ++k) ah[k] = Polynomial(n);
  for (std::size_t c = 0; c < V.size(); ++c)
    for (std::size_t r = 0; r < V.size(); ++r) {
      if (Binv[c][r] == 0) continue;
      const Polynomial rhs = lift_var(n, static_cast<std::size_t>(V[r])) - E[V[r]].compose(ah);
      log[n1 + c] += Binv[c][r] * rhs;
    }
  for (std::size_t j = 0; j < n; ++j)
    if (!(E[j].compose(log) == lift_var(n, j)))
      throw PreconditionError("exponential coordinates could not be inverted exactly");

  // x * y = flow from x along log(y)
  const std::size_t D = 2 * n;
  for (std::size_t j = 0; j < n; ++j) to_law.push_back(lift_var(D, j));
  for (std::size_t k = 0; k < n; ++k) to_law.push_back(shift(log[k], D, n));
  to_law.push_back(Polynomial::constant(D, 1));
  std::vector<Polynomial> C, I;
  for (const auto& p : flow) C.push_back(p.compose(to_law));
  std::vector<Polynomial> neg_log;
  for (const auto& p : log) neg_log.push_back(-p);
  for (const auto& p : E) I.push_back(p.compose(neg_log));

  GroupLaw law;
  law.dim = n;
  law.grading = g;
  law.basis = basis;
  auto cc = compile(C);
  law.compose = [cc, n](const Point& x, const Point& y) {
    std::vector<double> xy(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
      xy[j] = x[static_cast<Eigen::Index>(j)];
      xy[n + j] = y[static_cast<Eigen::Index>(j)];
    }
    return cc(xy);
  };
  auto ci = compile(I);
  law.inverse = [ci](const Point& x) { return ci(std::span<const double>(x.data(), x.size())); };
  law.compose_poly = std::move(C);
  law.inverse_poly = std::move(I);
  law.exp_poly = std::move(E);
  law.log_poly = std::move(log);
  return law;
}

StructureConstants structure_constants(const GroupLaw& law) {
  if (!law.compose_poly) throw PreconditionError("structure constants need the polynomial form of the law");
  const std::size_t n = law.dim;
  StructureConstants sc;
  for (std::size_t j = 0; j < n; ++j)
    (law.grading.weights[j] == 1 ? sc.first_layer : sc.second_layer).push_back(static_cast<int>(j));
  const std::size_t n1 = sc.first_layer.size();
  for (int k : sc.second_layer) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n1));
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n1; ++b) {
        Polynomial::Exponent e(2 * n, 0);
        e[sc.first_layer[a]] = 1;
        e[n + sc.first_layer[b]] = 1;
        M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            to_double((*law.compose_poly)[k].coefficient(e));
      }
    sc.bilinear.push_back(M);
  }
  return sc;
}

InvarianceReport left_invariance_check(const GroupLaw& law, const NilpotentApprox& na, int pairs,
                                       std::uint64_t seed, double tol, double h) {
  const std::size_t n = law.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  InvarianceReport rep;
  for (int p = 0; p < pairs; ++p) {
    Point x(n), y(n);
    for (auto& v : x) v = U(rng);
    for (auto& v : y) v = U(rng);
    const Point xy = law.compose(x, y);
    for (std::size_t i = 0; i < na.truncated.size(); ++i) {
      const Point X = na.truncated[i].evaluate(std::span<const double>(y.data(), n));
      const Point push = (law.compose(x, y + h * X) - law.compose(x, y - h * X)) / (2 * h);
      const Point target = na.truncated[i].evaluate(std::span<const double>(xy.data(), n));
      const double err = (push - target).lpNorm<Eigen::Infinity>();
      if (err > rep.max_error) {
        rep.max_error = err;
        rep.witness_field = static_cast<int>(i);
        rep.witness_x = x;
        rep.witness_y = y;
      }
    }
  }
  rep.pass = rep.max_error <= tol;
  rep.message = rep.pass ? "left translations preserve the truncated frame"
                         : "pushforward of field " + std::to_string(rep.witness_field + 1) +
                               " differs by " + std::to_string(rep.max_error);
  return rep;
}

double VerticalHalfspace::signed_level(std::span<const double> z) const { return level.evaluate(z); }

VerticalHalfspace vertical_halfspace(const Eigen::VectorXd& nu, const NilpotentApprox& na) {
  const std::size_t n = na.grading.dim(), m = na.truncated.size();
  if (static_cast<std::size_t>(nu.size()) != m) throw InvalidInput("normal has the wrong number of components");
  if (std::abs(nu.norm() - 1.0) > 1e-9) throw InvalidInput("normal must be a unit vector");
  const std::vector<double> origin(n, 0.0);
  Point s = Point::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) s += nu[static_cast<Eigen::Index>(i)] * na.truncated[i].evaluate(origin);
  VerticalHalfspace F;
  F.normal = nu;
  F.w = Point::Zero(static_cast<Eigen::Index>(n));
  F.level = Polynomial(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (na.grading.weights[j] != 1) continue;
    F.w[static_cast<Eigen::Index>(j)] = s[static_cast<Eigen::Index>(j)];
    F.level -= to_rational(s[static_cast<Eigen::Index>(j)]) * Polynomial::variable(n, j);
  }
  if (F.w.norm() < 1e-14) throw DegenerateNormal("sum nu_i hat X_i(0) has no first-layer component");
  return F;
}

HalfspaceDensity halfspace_perimeter_unit_ball(const VerticalHalfspace& F, const NilpotentApprox& na,
                                               const BallMask& ball, int plane_resolution) {
  const std::size_t n = na.grading.dim();
  const NumericFrame frame(na.structure().frame);
  const std::size_t m = frame.size();
  int res = plane_resolution;
  if (res <= 0) res = 8 * *std::max_element(ball.grid.resolution().begin(), ball.grid.resolution().end());

  const Point unit = F.w.normalized();
  // orthonormal basis of the hyperplane
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(unit);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                                           static_cast<Eigen::Index>(n));
  const std::size_t k = n - 1;
  const Box& box = ball.grid.box();
  std::vector<double> R(k);
  for (std::size_t a = 0; a < k; ++a) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      r += std::abs(Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a + 1))) *
           std::max(std::abs(box.lo[static_cast<Eigen::Index>(j)]), std::abs(box.hi[static_cast<Eigen::Index>(j)]));
    R[a] = r;
  }
  double dA = 1.0;
  for (double r : R) dA *= 2.0 * r / res;
  std::size_t total = 1;
  for (std::size_t a = 0; a < k; ++a) total *= static_cast<std::size_t>(res);

  std::vector<double> F_(n * m);
  double sum = 0.0;
  std::size_t unknown = 0;
  std::vector<int> idx(k);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    Point z = Point::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < k; ++a) {
      const int i = static_cast<int>(rem % static_cast<std::size_t>(res));
      rem /= static_cast<std::size_t>(res);
      const double s = -R[a] + (i + 0.5) * 2.0 * R[a] / res;
      z += s * Q.col(static_cast<Eigen::Index>(a + 1));
    }
    const int in = ball.contains(z);
    if (in == 0) {
      ++unknown;
      continue;
    }
    if (in < 0) continue;
    frame.eval(z.data(), F_.data());
    double q = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j) d += F_[i * n + j] * unit[static_cast<Eigen::Index>(j)];
      q += d * d;
    }
    sum += std::sqrt(q);
  }
  HalfspaceDensity out;
  out.perimeter = sum * dA;
  out.volume = ball.volume();
  out.ratio = out.perimeter / out.volume;
  out.unknown_samples = unknown;
  return out;
}

HalfspaceDensity halfspace_perimeter_unit_ball(const VerticalHalfspace& F, const NilpotentApprox& na,
                                               const BallMaskOptions& opts, int plane_resolution) {
  const auto S = na.structure("tangent");
  const BallMask ball = ball_mask(S, Point::Zero(static_cast<Eigen::Index>(na.grading.dim())), 1.0, opts);
  return halfspace_perimeter_unit_ball(F, na, ball, plane_resolution);
}

}  // namespace srg
