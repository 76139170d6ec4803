#include "srg/ccdist.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_map>

#include "srg/errors.hpp"
#include "srg/flow.hpp"
#include "srg/metric.hpp"

namespace srg {

ControlPath integrate_controls(const NumericFrame& F, const Point& x, const Eigen::MatrixXd& controls, int substeps,
                               const Point* target) {
  const std::size_t n = F.dim();
  const int N = static_cast<int>(controls.cols());
  ControlPath p;
  p.controls = controls;
  p.trajectory.reserve(N + 1);
  p.trajectory.push_back(x);
  Point y = x;
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXd c = controls.col(k);
    rk4_integrate(F, std::span<const double>(c.data(), c.size()), y.data(), 1.0 / N, substeps, nullptr, nullptr,
                  nullptr);
    p.trajectory.push_back(y);
  }
  p.action = controls.squaredNorm() / N;
  p.endpoint_gap = target ? (y - *target).norm() : 0.0;
  (void)n;
  return p;
}

double penalized_action(const NumericFrame& F, const Point& x, const Point& y, const Eigen::MatrixXd& controls,
                        double mu, int substeps, Eigen::MatrixXd* gradient) {
  const std::size_t n = F.dim(), m = F.size();
  const int N = static_cast<int>(controls.cols());
  const double h = 1.0 / (static_cast<double>(N) * substeps);
  const std::size_t steps = static_cast<std::size_t>(N) * substeps;

  std::vector<double> G(n * m), dG(m * n * n), stage(gradient ? steps * 4 * n : 0);
  std::vector<double> yv(x.data(), x.data() + n), k(4 * n), tmp(n);

  auto vel = [&](const double* pt, const double* c, double* out) {
    F.eval(pt, G.data());
    for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) out[j] += c[i] * G[i * n + j];
  };

  std::size_t s = 0;
  for (int seg = 0; seg < N; ++seg) {
    const double* c = controls.col(seg).data();
    for (int sub = 0; sub < substeps; ++sub, ++s) {
      double *k1 = k.data(), *k2 = k1 + n, *k3 = k2 + n, *k4 = k3 + n;
      double* st = gradient ? stage.data() + s * 4 * n : nullptr;
      if (st) std::copy(yv.begin(), yv.end(), st);
      vel(yv.data(), c, k1);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = yv[j] + 0.5 * h * k1[j];
      if (st) std::copy(tmp.begin(), tmp.end(), st + n);
      vel(tmp.data(), c, k2);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = yv[j] + 0.5 * h * k2[j];
      if (st) std::copy(tmp.begin(), tmp.end(), st + 2 * n);
      vel(tmp.data(), c, k3);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = yv[j] + h * k3[j];
      if (st) std::copy(tmp.begin(), tmp.end(), st + 3 * n);
      vel(tmp.data(), c, k4);
      for (std::size_t j = 0; j < n; ++j) yv[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
  }

  double gap2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) gap2 += (yv[j] - y[j]) * (yv[j] - y[j]);
  const double J = controls.squaredNorm() / N + mu * gap2;
  if (!gradient) return J;

  // reverse sweep through the stages
  gradient->setZero(m, N);
  std::vector<double> yb(n), kb(4 * n), sb(n);
  for (std::size_t j = 0; j < n; ++j) yb[j] = 2.0 * mu * (yv[j] - y[j]);

  // kbar_stage -> cbar += G^T kbar, returns A^T kbar in sb
  auto back_stage = [&](const double* pt, const double* c, const double* kb_, double* cb) {
    F.eval_with_jacobian(pt, G.data(), dG.data());
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += G[i * n + j] * kb_[j];
      cb[i] += acc;
    }
    for (std::size_t q = 0; q < n; ++q) sb[q] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (c[i] == 0.0) continue;
      const double* Ji = dG.data() + i * n * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = c[i] * kb_[j];
        if (w == 0.0) continue;
        for (std::size_t q = 0; q < n; ++q) sb[q] += w * Ji[j * n + q];
      }
    }
  };

  s = steps;
  for (int seg = N - 1; seg >= 0; --seg) {
    const double* c = controls.col(seg).data();
    std::vector<double> cb(m, 0.0);
    for (int sub = substeps - 1; sub >= 0; --sub) {
      --s;
      const double* st = stage.data() + s * 4 * n;
      double *kb1 = kb.data(), *kb2 = kb1 + n, *kb3 = kb2 + n, *kb4 = kb3 + n;
      for (std::size_t j = 0; j < n; ++j) {
        kb1[j] = kb4[j] = h / 6.0 * yb[j];
        kb2[j] = kb3[j] = h / 3.0 * yb[j];
      }
      back_stage(st + 3 * n, c, kb4, cb.data());
      for (std::size_t j = 0; j < n; ++j) {
        yb[j] += sb[j];
        kb3[j] += h * sb[j];
      }
      back_stage(st + 2 * n, c, kb3, cb.data());
      for (std::size_t j = 0; j < n; ++j) {
        yb[j] += sb[j];
        kb2[j] += 0.5 * h * sb[j];
      }
      back_stage(st + n, c, kb2, cb.data());
      for (std::size_t j = 0; j < n; ++j) {
        yb[j] += sb[j];
        kb1[j] += 0.5 * h * sb[j];
      }
      back_stage(st, c, kb1, cb.data());
      for (std::size_t j = 0; j < n; ++j) yb[j] += sb[j];
    }
    for (std::size_t i = 0; i < m; ++i) (*gradient)(i, seg) = cb[i] + 2.0 * c[i] / N;
  }
  return J;
}

Eigen::MatrixXd resample_controls(const Eigen::MatrixXd& controls, int segments) {
  const int N0 = static_cast<int>(controls.cols());
  if (N0 == segments) return controls;
  Eigen::MatrixXd out(controls.rows(), segments);
  for (int k = 0; k < segments; ++k) {
    // midpoint of segment k in the old partition
    const double t = (k + 0.5) / segments;
    const int j = std::min(N0 - 1, static_cast<int>(t * N0));
    out.col(k) = controls.col(j);
  }
  return out;
}

namespace {

// variables u = c / sqrt(N), so the action is |u|^2
class PenaltyCost final : public ceres::FirstOrderFunction {
 public:
  PenaltyCost(const NumericFrame& F, const Point& x, const Point& y, int m, int N, double mu, int substeps)
      : F_(F), x_(x), y_(y), m_(m), N_(N), mu_(mu), sub_(substeps) {}

  bool Evaluate(const double* u, double* cost, double* grad) const override {
    const double sq = std::sqrt(static_cast<double>(N_));
    Eigen::MatrixXd c = Eigen::Map<const Eigen::MatrixXd>(u, m_, N_) * sq;
    if (!c.allFinite()) return false;
    if (grad) {
      Eigen::MatrixXd g;
      *cost = penalized_action(F_, x_, y_, c, mu_, sub_, &g);
      Eigen::Map<Eigen::MatrixXd>(grad, m_, N_) = g * sq;
    } else {
      *cost = penalized_action(F_, x_, y_, c, mu_, sub_, nullptr);
    }
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return m_ * N_; }

 private:
  const NumericFrame& F_;
  const Point& x_;
  const Point& y_;
  int m_, N_;
  double mu_;
  int sub_;
};

Eigen::MatrixXd minimize_at(const NumericFrame& F, const Point& x, const Point& y, Eigen::MatrixXd c, double mu,
                            const DistanceOptions& opts) {
  const int m = static_cast<int>(c.rows()), N = static_cast<int>(c.cols());
  Eigen::MatrixXd u = c / std::sqrt(static_cast<double>(N));
  ceres::GradientProblem problem(new PenaltyCost(F, x, y, m, N, mu, opts.substeps));
  ceres::GradientProblemSolver::Options o;
  o.line_search_direction_type = ceres::LBFGS;
  o.max_num_iterations = opts.max_iterations;
  o.function_tolerance = 1e-13;
  o.gradient_tolerance = 1e-11;
  o.parameter_tolerance = 1e-13;
  o.logging_type = ceres::SILENT;
  o.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(o, problem, u.data(), &summary);
  return u * std::sqrt(static_cast<double>(N));
}

Eigen::MatrixXd continuation(const NumericFrame& F, const Point& x, const Point& y, Eigen::MatrixXd c,
                             const std::vector<double>& mus, const DistanceOptions& opts) {
  for (double mu : mus) c = minimize_at(F, x, y, std::move(c), mu, opts);
  return c;
}

Eigen::MatrixXd initial_controls(const NumericFrame& F, const Point& x, const Point& y, int N, int restart,
                                 std::uint64_t seed) {
  const std::size_t m = F.size();
  const Eigen::MatrixXd Fx = F.matrix(x);
  const Eigen::VectorXd v = y - x;
  // minimum-norm lift of the chord, ignoring the part outside the span
  Eigen::VectorXd c0 = Fx.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(v);
  if (!c0.allFinite()) c0.setZero(m);
  Eigen::MatrixXd c = c0.replicate(1, N);
  if (restart == 0) return c;
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(restart));
  std::normal_distribution<double> nd(0.0, 1.0);
  const double sigma = std::max({c0.norm(), 2.0 * std::sqrt(v.lpNorm<Eigen::Infinity>()), 1e-3});
  for (std::size_t i = 0; i < m; ++i)
    for (int f = 1; f <= 2; ++f) {
      const double a = nd(rng) * sigma / f, b = nd(rng) * sigma / f;
      for (int k = 0; k < N; ++k) {
        const double t = (k + 0.5) / N;
        c(static_cast<Eigen::Index>(i), k) +=
            a * std::cos(2 * std::numbers::pi * f * t) + b * std::sin(2 * std::numbers::pi * f * t);
      }
    }
  return c;
}

DistanceResult finish(const NumericFrame& F, const Point& x, const Point& y, const Eigen::MatrixXd& c,
                      const DistanceOptions& opts) {
  DistanceResult r;
  r.path = integrate_controls(F, x, c, opts.substeps, &y);
  r.value = std::sqrt(r.path.action);
  r.converged = r.path.endpoint_gap <= opts.endpoint_tol;
  return r;
}

DistanceResult solve(const NumericFrame& F, const Point& x, const Point& y, const DistanceOptions& opts) {
  const int N0 = std::max(1, opts.initial_segments);
  const int Nmax = std::max(N0, opts.max_segments);
  const std::size_t m = F.size();
  if ((x - y).norm() == 0.0) {
    DistanceResult r = finish(F, x, y, Eigen::MatrixXd::Zero(m, N0), opts);
    r.converged = true;
    r.refinement_values.push_back(0.0);
    return r;
  }
  const int R = std::max(1, opts.restarts);
  std::vector<Eigen::MatrixXd> cand(R);
  std::vector<double> score(R, std::numeric_limits<double>::infinity());
  const double mu_last = opts.penalties.back();
  auto run = [&](std::size_t r) {
    Eigen::MatrixXd c0;
    if (r == 0 && opts.warm_start) {
      c0 = resample_controls(*opts.warm_start, N0);
    } else {
      const int idx = static_cast<int>(r) - (opts.warm_start ? 1 : 0);
      c0 = initial_controls(F, x, y, N0, idx < 0 ? 0 : idx, opts.seed);
    }
    cand[r] = continuation(F, x, y, std::move(c0), opts.penalties, opts);
    score[r] = penalized_action(F, x, y, cand[r], mu_last, opts.substeps);
  };
  for_each_index(static_cast<std::size_t>(R), run, opts.exec);
  std::size_t best = 0;
  for (std::size_t r = 1; r < static_cast<std::size_t>(R); ++r)
    if (score[r] < score[best]) best = r;

  DistanceResult res = finish(F, x, y, cand[best], opts);
  res.restarts_used = R;
  res.refinement_values.push_back(res.value);
  if (N0 >= Nmax) return res;

  Eigen::MatrixXd c = cand[best];
  bool settled = false;
  for (int N = 2 * N0; N <= Nmax; N *= 2) {
    c = continuation(F, x, y, resample_controls(c, N), {mu_last}, opts);
    DistanceResult next = finish(F, x, y, c, opts);
    const double prev = res.refinement_values.back();
    next.refinement_values = std::move(res.refinement_values);
    next.refinement_values.push_back(next.value);
    next.restarts_used = R;
    res = std::move(next);
    settled = std::abs(res.value - prev) <= opts.refine_tol * std::max(prev, 1e-300);
    if (settled) break;
  }
  res.converged = res.converged && settled;
  return res;
}

}  // namespace

DistanceResult polish(const NumericFrame& F, const Point& x, const Point& y, const Eigen::MatrixXd& controls,
                      const DistanceOptions& opts) {
  Eigen::MatrixXd c = continuation(F, x, y, controls, {opts.penalties.back()}, opts);
  DistanceResult r = finish(F, x, y, c, opts);
  r.refinement_values.push_back(r.value);
  r.restarts_used = 1;
  return r;
}

DistanceResult distance(const SubRiemannianStructure& S, const Point& x, const Point& y,
                        const DistanceOptions& opts) {
  if (static_cast<std::size_t>(x.size()) != S.dim || static_cast<std::size_t>(y.size()) != S.dim)
    throw InvalidInput("distance: point dimension does not match the structure");
  if (opts.penalties.empty()) throw InvalidInput("distance: no penalty levels");
  if (!opts.skip_precondition) growth_vector(S, x);  // throws HormanderViolation
  const NumericFrame F(S.frame);
  return solve(F, x, y, opts);
}

// ---------------------------------------------------------------------------
// control-graph sweep

Eigen::MatrixXd sweep_directions(std::size_t m) {
  std::vector<Eigen::VectorXd> d;
  if (m == 1) {
    d = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
  } else if (m == 2) {
    for (int k = 0; k < 16; ++k) {
      const double a = 2 * std::numbers::pi * k / 16;
      Eigen::VectorXd v(2);
      v << std::cos(a), std::sin(a);
      d.push_back(v);
    }
  } else if (m == 3) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (!a && !b && !c) continue;
          Eigen::VectorXd v(3);
          v << a, b, c;
          d.push_back(v.normalized());
        }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (int s : {1, -1}) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        v[i] = s;
        d.push_back(v);
      }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (int s : {1, -1})
          for (int t : {1, -1}) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
            v[i] = s / std::sqrt(2.0);
            v[j] = t / std::sqrt(2.0);
            d.push_back(v);
          }
  }
  Eigen::MatrixXd out(m, d.size());
  for (std::size_t k = 0; k < d.size(); ++k) out.col(k) = d[k];
  return out;
}

Eigen::MatrixXd GraphSweep::controls_to(std::size_t i) const {
  const int L = layer[i];
  if (L == 0) return Eigen::MatrixXd::Zero(dirs.rows(), 1);
  Eigen::MatrixXd c(dirs.rows(), L);
  int k = L - 1;
  for (int s = static_cast<int>(i); parent[s] >= 0; s = parent[s], --k) c.col(k) = dirs.col(move[s]) * (L * step);
  return c;
}

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

GraphSweep control_graph_sweep(const NumericFrame& F, const Point& x, const Point& origin, const Point& cell,
                               const std::optional<Box>& bound, const GraphSweepOptions& opts) {
  const std::size_t n = F.dim();
  GraphSweep g;
  g.origin = origin;
  g.cell = cell;
  g.dirs = sweep_directions(F.size());
  g.step = opts.step;
  const auto D = static_cast<std::size_t>(g.dirs.cols());

  auto key = [&](const double* p) {
    std::vector<std::int64_t> k(n);
    for (std::size_t j = 0; j < n; ++j) k[j] = static_cast<std::int64_t>(std::floor((p[j] - origin[j]) / cell[j]));
    return k;
  };
  std::unordered_map<std::vector<std::int64_t>, int, KeyHash> seen;
  g.state.push_back(x);
  g.layer.push_back(0);
  g.parent.push_back(-1);
  g.move.push_back(-1);
  seen.emplace(key(x.data()), 0);

  std::size_t lo = 0, hi = 1;
  for (int L = 1; L <= opts.max_layers && lo < hi; ++L) {
    const std::size_t count = hi - lo;
    std::vector<double> pos(count * D * n);
    std::vector<char> ok(count * D, 0);
    for_each_index(
        count,
        [&](std::size_t f) {
          for (std::size_t d = 0; d < D; ++d) {
            double* p = pos.data() + (f * D + d) * n;
            const Point& s = g.state[lo + f];
            std::copy(s.data(), s.data() + n, p);
            Eigen::VectorXd c = g.dirs.col(static_cast<Eigen::Index>(d));
            rk4_integrate(F, std::span<const double>(c.data(), c.size()), p, opts.step, opts.substeps, nullptr,
                          nullptr, nullptr);
            bool good = true;
            for (std::size_t j = 0; j < n; ++j) good = good && std::isfinite(p[j]);
            if (good && bound) good = bound->contains(std::span<const double>(p, n));
            ok[f * D + d] = good;
          }
        },
        opts.exec);
    for (std::size_t f = 0; f < count; ++f)
      for (std::size_t d = 0; d < D; ++d) {
        if (!ok[f * D + d]) continue;
        const double* p = pos.data() + (f * D + d) * n;
        auto [it, inserted] = seen.emplace(key(p), static_cast<int>(g.state.size()));
        if (!inserted) continue;
        g.state.emplace_back(Eigen::Map<const Eigen::VectorXd>(p, static_cast<Eigen::Index>(n)));
        g.layer.push_back(L);
        g.parent.push_back(static_cast<int>(lo + f));
        g.move.push_back(static_cast<int>(d));
      }
    lo = hi;
    hi = g.state.size();
  }
  return g;
}

// ---------------------------------------------------------------------------
// balls

std::size_t BallMask::inside_count() const {
  return static_cast<std::size_t>(std::count(state.begin(), state.end(), VoxelState::Inside));
}

int BallMask::contains(std::span<const double> x) const {
  const std::size_t n = grid.dim();
  if (!grid.box().contains(x)) return -1;
  std::vector<int> base(n);
  std::vector<double> frac(n);
  const auto& res = grid.resolution();
  for (std::size_t a = 0; a < n; ++a) {
    const double fi = grid.fractional_index(a, x[a]) - 0.5;
    int i0 = static_cast<int>(std::floor(fi));
    double t = fi - i0;
    if (i0 < 0) {
      i0 = 0;
      t = 0.0;
    }
    if (i0 >= res[a] - 1) {
      i0 = std::max(0, res[a] - 2);
      t = res[a] == 1 ? 0.0 : 1.0;
    }
    base[a] = i0;
    frac[a] = t;
  }
  double f = 0.0;
  std::vector<int> idx(n);
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    double w = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      const bool up = (corner >> a) & 1;
      idx[a] = std::min(base[a] + (up ? 1 : 0), res[a] - 1);
      w *= up ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const std::size_t v = grid.linear(idx);
    if (state[v] == VoxelState::Unknown) return 0;
    const double d = std::isfinite(dist[v]) ? std::min(dist[v], 2.0 * radius) : 2.0 * radius;
    f += w * (d - radius);
  }
  return f < 0.0 ? 1 : -1;
}

BallMask ball_mask(const SubRiemannianStructure& S, const Point& p, double r, const BallMaskOptions& opts) {
  if (!(r > 0.0)) throw InvalidInput("ball radius must be positive");
  const std::size_t n = S.dim;
  if (static_cast<std::size_t>(p.size()) != n) throw InvalidInput("ball center has the wrong dimension");
  const PointFlag flag = growth_vector(S, p);
  const NumericFrame F(S.frame);

  Box box;
  if (opts.box) {
    box = *opts.box;
  } else {
    // coarse sweep on a lattice scaled like the ball-box estimate
    const double s = r / 16.0;
    Point cell(n);
    for (std::size_t j = 0; j < n; ++j) cell[j] = std::pow(s, flag.weights[j]);
    GraphSweepOptions go;
    go.step = s;
    go.max_layers = 20;
    go.exec = opts.exec;
    const GraphSweep g = control_graph_sweep(F, p, p, cell, std::nullopt, go);
    Point ext = Point::Zero(n);
    for (std::size_t i = 0; i < g.state.size(); ++i) {
      if (g.cost(i) > r * (1.0 + 1e-12)) continue;
      ext = ext.cwiseMax((g.state[i] - p).cwiseAbs());
    }
    for (std::size_t j = 0; j < n; ++j) ext[j] = std::max(1.25 * ext[j] + cell[j], 2.0 * cell[j]);
    box = Box(p - ext, p + ext);
  }

  BallMask B;
  B.grid = Grid(box, opts.resolution);
  B.center = p;
  B.radius = r;
  const Grid& grid = B.grid;
  const std::size_t V = grid.size();

  double hmax = 0.0;
  Point cell(n);
  for (std::size_t j = 0; j < n; ++j) {
    cell[j] = grid.spacing(j);
    hmax = std::max(hmax, cell[j]);
  }
  GraphSweepOptions go;
  go.step = 1.5 * hmax;
  go.max_layers = static_cast<int>(std::ceil(1.3 * r / go.step)) + 1;
  go.exec = opts.exec;
  const GraphSweep g = control_graph_sweep(F, p, box.lo, cell, box, go);

  std::vector<int> rep(V, -1);
  B.dist.assign(V, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < g.state.size(); ++i) {
    const std::size_t v = grid.locate(std::span<const double>(g.state[i].data(), n));
    if (rep[v] < 0) {
      rep[v] = static_cast<int>(i);
      B.dist[v] = g.cost(i);
    }
  }
  B.state.assign(V, VoxelState::Outside);
  for (std::size_t v = 0; v < V; ++v)
    if (B.dist[v] < r) B.state[v] = VoxelState::Inside;
  B.refined.assign(V, 0);

  const auto& res = grid.resolution();
  auto neighbours = [&](std::size_t v, auto&& f) {
    std::vector<int> idx(n);
    grid.unravel(v, idx);
    for (std::size_t a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        const int k = idx[a] + s;
        if (k < 0 || k >= res[a]) continue;
        f(s > 0 ? v + grid.stride(a) : v - grid.stride(a));
      }
  };
  auto inside = [&](std::size_t v) { return B.state[v] == VoxelState::Inside; };

  std::vector<char> queued(V, 0);
  std::vector<std::size_t> wave;
  for (std::size_t v = 0; v < V; ++v) {
    bool edge = false;
    neighbours(v, [&](std::size_t u) { edge = edge || inside(u) != inside(v); });
    if (edge) {
      wave.push_back(v);
      queued[v] = 1;
    }
  }

  while (!wave.empty()) {
    std::vector<DistanceResult> out(wave.size());
    for_each_index(
        wave.size(),
        [&](std::size_t w) {
          const std::size_t v = wave[w];
          DistanceOptions o = opts.solver;
          o.skip_precondition = true;
          o.exec = Exec::Serial;
          int src = rep[v];
          if (src < 0) neighbours(v, [&](std::size_t u) {
              if (src < 0 && rep[u] >= 0) src = rep[u];
            });
          if (src >= 0) o.warm_start = g.controls_to(static_cast<std::size_t>(src));
          out[w] = solve(F, p, grid.center(v), o);
        },
        opts.exec);
    std::vector<std::size_t> next;
    for (std::size_t w = 0; w < wave.size(); ++w) {
      const std::size_t v = wave[w];
      B.refined[v] = 1;
      B.dist[v] = out[w].value;
      if (!out[w].converged) {
        B.state[v] = VoxelState::Unknown;
        continue;
      }
      B.state[v] = out[w].value < r ? VoxelState::Inside : VoxelState::Outside;
    }
    for (std::size_t v : wave) {
      if (B.state[v] == VoxelState::Unknown) continue;
      neighbours(v, [&](std::size_t u) {
        if (queued[u] || B.state[u] == VoxelState::Unknown) return;
        if (inside(u) != inside(v)) {
          queued[u] = 1;
          next.push_back(u);
        }
      });
    }
    std::sort(next.begin(), next.end());
    wave = std::move(next);
  }
  for (std::size_t v = 0; v < V; ++v) {
    B.refined_count += B.refined[v] ? 1 : 0;
    B.unknown_count += B.state[v] == VoxelState::Unknown ? 1 : 0;
  }
  return B;
}

// ---------------------------------------------------------------------------
// tangent cone convergence

TangentConvergenceReport tangent_convergence(const SubRiemannianStructure& S, const Grading& g,
                                             const TangentConvergenceOptions& opts) {
  const std::size_t n = S.dim;
  if (g.weights.size() != n) throw InvalidInput("grading dimension does not match the structure");
  const auto frame = S.polynomial_frame();
  const NilpotentApprox na = truncate(S, g);
  const NumericFrame Fhat(na.structure("tangent").frame);

  TangentConvergenceReport rep;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < opts.pairs; ++k) {
    Point x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = U(rng) * std::pow(opts.R, g.weights[j]);
    for (std::size_t j = 0; j < n; ++j) y[j] = U(rng) * std::pow(opts.R, g.weights[j]);
    rep.xs.push_back(x);
    rep.ys.push_back(y);
  }

  DistanceOptions so = opts.solver;
  so.skip_precondition = true;
  const std::size_t P = rep.xs.size();
  std::vector<DistanceResult> hat(P);
  for (std::size_t k = 0; k < P; ++k) {
    DistanceResult first = solve(Fhat, rep.xs[k], rep.ys[k], so);
    // re-polish so d_hat and d_eps stop under identical optimizer conditions
    DistanceResult again = polish(Fhat, rep.xs[k], rep.ys[k], first.path.controls, so);
    again.converged = first.converged && again.converged;
    hat[k] = std::move(again);
    rep.d_hat.push_back(hat[k].value);
  }

  std::vector<char> bad(P, 0);
  for (std::size_t k = 0; k < P; ++k) bad[k] = !hat[k].converged;
  for (const Rational& e : opts.eps) {
    std::vector<PolyVectorField> scaled;
    for (const auto& X : frame) scaled.push_back(rescale_field(X, g, e));
    const NumericFrame Fe(std::vector<FrameField>(scaled.begin(), scaled.end()));
    std::vector<double> gaps(P, std::numeric_limits<double>::quiet_NaN());
    double sup = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      if (bad[k]) continue;
      DistanceResult de = polish(Fe, rep.xs[k], rep.ys[k], hat[k].path.controls, so);
      if (!de.converged) {
        bad[k] = 1;
        continue;
      }
      gaps[k] = de.value - hat[k].value;
    }
    rep.eps.push_back(e.get_d());
    rep.gaps.push_back(std::move(gaps));
    (void)sup;
  }
  for (std::size_t k = 0; k < P; ++k)
    if (bad[k]) rep.excluded.push_back(static_cast<int>(k));
  for (const auto& gaps : rep.gaps) {
    double sup = 0.0;
    for (std::size_t k = 0; k < P; ++k)
      if (!bad[k]) sup = std::max(sup, std::abs(gaps[k]));
    rep.sup_gap.push_back(sup);
  }
  return rep;
}

}  // namespace srg
