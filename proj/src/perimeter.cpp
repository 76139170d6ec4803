#include "srg/perimeter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <random>

#include "srg/errors.hpp"
#include "srg/flow.hpp"
#include "srg/metric.hpp"
#include "srg/numeric.hpp"

namespace srg {

namespace {

struct CompiledLevel {
  CompiledPolynomial phi;
  std::vector<CompiledPolynomial> grad;
};

std::shared_ptr<const CompiledLevel> compile_level(const Polynomial& p) {
  auto c = std::make_shared<CompiledLevel>();
  c->phi = CompiledPolynomial(p);
  for (std::size_t i = 0; i < p.dim(); ++i) c->grad.emplace_back(p.derivative(i));
  return c;
}

double eval_grad(const CompiledLevel& c, std::span<const double> x, std::span<double> g) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.grad.size(); ++i) {
    g[i] = c.grad[i].evaluate(x);
    s += g[i] * g[i];
  }
  return std::sqrt(s);
}

Box clip(const Box& a, const Box& b) {
  Point lo = a.lo.cwiseMax(b.lo), hi = a.hi.cwiseMin(b.hi);
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw InvalidInput("region does not meet the set's box");
  return Box(lo, hi);
}

// first error raised inside a parallel loop, rethrown afterwards
struct ErrorSlot {
  std::atomic<bool> set{false};
  std::mutex mu;
  std::exception_ptr err;
  void capture() {
    std::lock_guard<std::mutex> lock(mu);
    if (!set) {
      err = std::current_exception();
      set = true;
    }
  }
  void rethrow() {
    if (set) std::rethrow_exception(err);
  }
};

// Boundary quadrature on one cell of the node grid.
class Marcher {
 public:
  Marcher(const SetRep& E, const Box& box, int res, Exec exec)
      : n_(E.dim()), res_(res), box_(box), lvl_(compile_level(E.level)), floor_(E.grad_floor) {
    h_.resize(n_);
    for (std::size_t a = 0; a < n_; ++a) h_[a] = (box.hi[a] - box.lo[a]) / res;
    nodes_ = 1;
    cells_ = 1;
    for (std::size_t a = 0; a < n_; ++a) {
      nstride_.push_back(nodes_);
      nodes_ *= static_cast<std::size_t>(res + 1);
      cells_ *= static_cast<std::size_t>(res);
    }
    if (n_ <= 3) {
      val_.resize(nodes_);
      for_each_index(
          nodes_,
          [&](std::size_t k) {
            double x[3];
            std::size_t r = k;
            for (std::size_t a = 0; a < n_; ++a) {
              x[a] = box_.lo[a] + static_cast<double>(r % (res_ + 1)) * h_[a];
              r /= static_cast<std::size_t>(res_ + 1);
            }
            val_[k] = lvl_->phi.evaluate(std::span<const double>(x, n_));
          },
          exec);
    }
  }

  std::size_t cells() const { return cells_; }
  const std::vector<double>& spacing() const { return h_; }

  // emit(point, inner normal, dA); returns the number of facets
  template <class Emit>
  int cell(std::size_t c, Emit&& emit) const {
    if (n_ > 3) return smeared(c, emit);
    int idx[3] = {0, 0, 0};
    std::size_t r = c;
    for (std::size_t a = 0; a < n_; ++a) {
      idx[a] = static_cast<int>(r % static_cast<std::size_t>(res_));
      r /= static_cast<std::size_t>(res_);
    }
    const int corners = 1 << n_;
    double f[8], p[8][3];
    bool any_in = false, any_out = false;
    for (int k = 0; k < corners; ++k) {
      std::size_t lin = 0;
      for (std::size_t a = 0; a < n_; ++a) {
        const int i = idx[a] + ((k >> a) & 1);
        lin += static_cast<std::size_t>(i) * nstride_[a];
        p[k][a] = box_.lo[a] + i * h_[a];
      }
      f[k] = val_[lin];
      (f[k] < 0.0 ? any_in : any_out) = true;
    }
    if (!(any_in && any_out)) return 0;
    int facets = 0;
    if (n_ == 2) {
      static const int tri[2][3] = {{0, 1, 3}, {0, 2, 3}};
      for (const auto& t : tri) facets += triangle(f, p, t, emit);
    } else if (n_ == 3) {
      static const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& s : perm) {
        const int v[4] = {0, 1 << s[0], (1 << s[0]) | (1 << s[1]), 7};
        facets += tetra(f, p, v, emit);
      }
    } else {
      // n == 1: the crossing point itself
      const double t = f[0] / (f[0] - f[1]);
      double q[1] = {p[0][0] + t * (p[1][0] - p[0][0])};
      facets += point_facet(q, 1.0, emit);
    }
    return facets;
  }

 private:
  void crossing(const double* f, const double (*p)[3], int a, int b, double* out) const {
    const double t = f[a] / (f[a] - f[b]);
    for (std::size_t k = 0; k < n_; ++k) out[k] = p[a][k] + t * (p[b][k] - p[a][k]);
  }

  template <class Emit>
  int point_facet(double* q, double w, Emit&& emit) const {
    double g[8];
    const std::span<double> gs(g, n_);
    for (int it = 0; it < 2; ++it) {
      const double phi = lvl_->phi.evaluate(std::span<const double>(q, n_));
      const double gn = eval_grad(*lvl_, std::span<const double>(q, n_), gs);
      if (gn < floor_) throw DegenerateLevelSet("level set gradient vanishes", std::vector<double>(q, q + n_));
      for (std::size_t k = 0; k < n_; ++k) q[k] -= phi * g[k] / (gn * gn);
    }
    const double gn = eval_grad(*lvl_, std::span<const double>(q, n_), gs);
    if (gn < floor_) throw DegenerateLevelSet("level set gradient vanishes", std::vector<double>(q, q + n_));
    for (std::size_t k = 0; k < n_; ++k) g[k] = -g[k] / gn;
    emit(std::span<const double>(q, n_), std::span<const double>(g, n_), w);
    return 1;
  }

  template <class Emit>
  int segment(const double* a, const double* b, Emit&& emit) const {
    const double L = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (L == 0.0) return 0;
    static const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    for (double s : gp) {
      double q[2] = {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
      point_facet(q, 0.5 * L, emit);
    }
    return 1;
  }

  template <class Emit>
  int tri3(const double* a, const double* b, const double* c, Emit&& emit) const {
    const Eigen::Vector3d A(a[0], a[1], a[2]), B(b[0], b[1], b[2]), C(c[0], c[1], c[2]);
    const double area = 0.5 * (B - A).cross(C - A).norm();
    if (area == 0.0) return 0;
    static const double bc[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
    for (const auto& l : bc) {
      double q[3];
      for (int k = 0; k < 3; ++k) q[k] = l[0] * a[k] + l[1] * b[k] + l[2] * c[k];
      point_facet(q, area / 3.0, emit);
    }
    return 1;
  }

  template <class Emit>
  int triangle(const double* f, const double (*p)[3], const int* t, Emit&& emit) const {
    double pts[2][3];
    int k = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      if ((f[a] < 0.0) != (f[b] < 0.0)) crossing(f, p, a, b, pts[k++]);
    }
    return k == 2 ? segment(pts[0], pts[1], emit) : 0;
  }

  template <class Emit>
  int tetra(const double* f, const double (*p)[3], const int* v, Emit&& emit) const {
    int in[4], out[4], ni = 0, no = 0;
    for (int k = 0; k < 4; ++k) (f[v[k]] < 0.0 ? in[ni++] : out[no++]) = v[k];
    if (ni == 0 || no == 0) return 0;
    double q[4][3];
    if (ni == 1 || no == 1) {
      const int apex = ni == 1 ? in[0] : out[0];
      const int* rest = ni == 1 ? out : in;
      for (int k = 0; k < 3; ++k) crossing(f, p, apex, rest[k], q[k]);
      return tri3(q[0], q[1], q[2], emit);
    }
    crossing(f, p, in[0], out[0], q[0]);
    crossing(f, p, in[0], out[1], q[1]);
    crossing(f, p, in[1], out[1], q[2]);
    crossing(f, p, in[1], out[0], q[3]);
    return tri3(q[0], q[1], q[2], emit) + tri3(q[0], q[2], q[3], emit);
  }

  // n >= 4: hat-function delta of half-width 2 h_max in the signed distance
  template <class Emit>
  int smeared(std::size_t c, Emit&& emit) const {
    std::vector<double> x(n_), g(n_);
    std::size_t r = c;
    double hmax = 0.0, dv = 1.0;
    for (std::size_t a = 0; a < n_; ++a) {
      x[a] = box_.lo[a] + (static_cast<double>(r % static_cast<std::size_t>(res_)) + 0.5) * h_[a];
      r /= static_cast<std::size_t>(res_);
      hmax = std::max(hmax, h_[a]);
      dv *= h_[a];
    }
    const double eps = 2.0 * hmax;
    const double phi = lvl_->phi.evaluate(x);
    const double gn = eval_grad(*lvl_, x, g);
    if (gn < floor_) {
      if (std::abs(phi) < eps * 1e3 * floor_) throw DegenerateLevelSet("level set gradient vanishes", x);
      return 0;
    }
    const double s = std::abs(phi) / gn;
    if (s >= eps) return 0;
    for (auto& v : g) v = -v / gn;
    emit(std::span<const double>(x), std::span<const double>(g), (1.0 - s / eps) / eps * dv);
    return 1;
  }

  std::size_t n_;
  int res_;
  Box box_;
  std::shared_ptr<const CompiledLevel> lvl_;
  double floor_;
  std::vector<double> h_;
  std::vector<std::size_t> nstride_;
  std::size_t nodes_ = 0, cells_ = 0;
  std::vector<double> val_;
};

std::vector<int> res_vector(std::size_t n, int r) { return std::vector<int>(n, r); }

// least-squares line through (s, v); value at s = 0
double extrapolate(const std::vector<double>& s, const std::vector<double>& v) {
  const std::size_t k = s.size();
  if (k == 1) return v[0];
  double ms = 0, mv = 0;
  for (std::size_t i = 0; i < k; ++i) {
    ms += s[i];
    mv += v[i];
  }
  ms /= k;
  mv /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (s[i] - ms) * (v[i] - mv);
    sxx += (s[i] - ms) * (s[i] - ms);
  }
  if (sxx == 0.0) return mv;
  return mv - sxy / sxx * ms;
}

// voxel centers of a res^n grid over box
struct VoxelGrid {
  Grid grid;
  std::vector<double> h;
  VoxelGrid(const Box& b, int res) : grid(b, res) {
    for (std::size_t a = 0; a < b.dim(); ++a) h.push_back(grid.spacing(a));
  }
};

}  // namespace

SetRep::SetRep(Polynomial level_, Box box_, int resolution_)
    : level(std::move(level_)), box(std::move(box_)), resolution(resolution_) {
  if (level.dim() != box.dim()) throw InvalidInput("level function and box disagree on dimension");
  if (resolution < 2) throw InvalidInput("resolution must be at least 2");
}

double SetRep::value(std::span<const double> x) const { return level.evaluate(x); }

double SetRep::gradient(std::span<const double> x, std::span<double> g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    g[i] = level.derivative(i).evaluate(x);
    s += g[i] * g[i];
  }
  return std::sqrt(s);
}

Region Region::of(const BallMask& ball) {
  auto b = std::make_shared<const BallMask>(ball);
  return Region{ball.grid.box(), [b](std::span<const double> x) { return b->contains(x); }};
}

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Surface: return "surface";
    case Estimator::Flow: return "flow";
    case Estimator::Mollified: return "mollified";
  }
  return "?";
}

double occupancy(const SetRep& E, std::span<const double> x, std::span<const double> h) {
  const std::size_t n = E.dim();
  std::vector<double> g(n);
  const double phi = E.value(x);
  const double gn = E.gradient(x, g);
  if (gn == 0.0) return phi < 0.0 ? 1.0 : 0.0;
  double w = 0.0;
  for (std::size_t a = 0; a < n; ++a) w += std::abs(g[a]) / gn * h[a];
  return std::clamp(0.5 - phi / (gn * w), 0.0, 1.0);
}

PerimeterReport surface_estimator(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                                  Exec exec) {
  const std::size_t n = S.dim, m = S.size();
  if (E.dim() != n) throw InvalidInput("set and structure disagree on dimension");
  const Box box = clip(region.box, E.box);
  const Marcher M(E, box, E.resolution, exec);
  const NumericFrame F(S.frame, S.weight);
  ErrorSlot err;
  // accumulators: per_field m, variation m, total, facets, unknown
  const std::size_t K = 2 * m + 3;
  const auto acc = chunked_sums(
      M.cells(), K,
      [&](std::size_t c, double* a) {
        if (err.set) return;
        try {
          std::vector<double> Fx(n * m);
          a[2 * m + 1] += M.cell(c, [&](std::span<const double> q, std::span<const double> nin, double dA) {
            if (region.mask) {
              const int in = region.mask(q);
              if (in == 0) a[2 * m + 2] += 1;
              if (in <= 0) return;
            }
            F.eval(q.data(), Fx.data());
            const double w = F.weight(q.data()) * dA;
            double tot = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
              double d = 0.0;
              for (std::size_t j = 0; j < n; ++j) d += Fx[i * n + j] * nin[j];
              a[i] += d * w;
              a[m + i] += std::abs(d) * w;
              tot += d * d;
            }
            a[2 * m] += std::sqrt(tot) * w;
          });
        } catch (...) {
          err.capture();
        }
      },
      exec);
  err.rethrow();
  PerimeterReport r;
  r.estimator = Estimator::Surface;
  r.per_field.assign(acc.begin(), acc.begin() + static_cast<long>(m));
  r.per_field_variation.assign(acc.begin() + static_cast<long>(m), acc.begin() + static_cast<long>(2 * m));
  r.total_variation = acc[2 * m];
  r.facets = static_cast<std::size_t>(acc[2 * m + 1]);
  r.masked_unknown = static_cast<std::size_t>(acc[2 * m + 2]);
  r.resolution = res_vector(n, E.resolution);
  r.raw_total = {r.total_variation};
  return r;
}

void boundary_quadrature(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                         const std::function<void(std::span<const double>, std::span<const double>, double)>& visit) {
  const Box box = clip(region.box, E.box);
  const Marcher M(E, box, E.resolution, Exec::Parallel);
  const NumericFrame F(S.frame, S.weight);
  for (std::size_t c = 0; c < M.cells(); ++c)
    M.cell(c, [&](std::span<const double> q, std::span<const double> nin, double dA) {
      if (region.mask && region.mask(q) <= 0) return;
      visit(q, nin, dA * F.weight(q.data()));
    });
}

FlowEstimate flow_estimator(const SubRiemannianStructure& S, const SetRep& E, const PolyVectorField& X,
                            const Region& region, std::vector<double> t_schedule, Exec exec) {
  const std::size_t n = S.dim;
  if (E.dim() != n || X.dim() != n) throw InvalidInput("set, field and structure disagree on dimension");
  const Box box = clip(region.box, E.box);
  const VoxelGrid V(box, E.resolution);
  const double hmax = *std::max_element(V.h.begin(), V.h.end());
  if (t_schedule.empty()) t_schedule = {8 * hmax, 4 * hmax, 2 * hmax};
  const NumericFrame Fx(X);
  const NumericFrame W(S.frame, S.weight);
  const auto lvl = compile_level(E.level);
  const double dv = V.grid.cell_volume();

  auto occ = [&](const double* x) {
    double g[16];
    const double phi = lvl->phi.evaluate(std::span<const double>(x, n));
    const double gn = eval_grad(*lvl, std::span<const double>(x, n), std::span<double>(g, n));
    if (gn == 0.0) return phi < 0.0 ? 1.0 : 0.0;
    double w = 0.0;
    for (std::size_t a = 0; a < n; ++a) w += std::abs(g[a]) / gn * V.h[a];
    return std::clamp(0.5 - phi / (gn * w), 0.0, 1.0);
  };

  FlowEstimate out;
  const double one = 1.0;
  for (double t : t_schedule) {
    if (t == 0.0) throw InvalidInput("flow time must be nonzero");
    const double s = chunked_sum(
        V.grid.size(),
        [&](std::size_t v) {
          double x[16], y[16];
          V.grid.center(v, std::span<double>(x, n));
          if (region.mask && region.mask(std::span<const double>(x, n)) <= 0) return 0.0;
          std::copy(x, x + n, y);
          rk4_integrate(Fx, std::span<const double>(&one, 1), y, t, 4, nullptr, nullptr, nullptr);
          return std::abs(occ(y) - occ(x)) * W.weight(x);
        },
        exec);
    out.t.push_back(t);
    out.raw.push_back(s * dv / std::abs(t));
  }
  out.value = extrapolate(out.t, out.raw);
  return out;
}

PerimeterReport flow_report(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                            std::vector<double> t_schedule, Exec exec) {
  const auto frame = S.polynomial_frame();
  PerimeterReport r;
  r.estimator = Estimator::Flow;
  r.resolution = res_vector(S.dim, E.resolution);
  for (const auto& X : frame) {
    const FlowEstimate f = flow_estimator(S, E, X, region, t_schedule, exec);
    r.per_field_variation.push_back(f.value);
    if (!f.t.empty()) r.schedule = f.t;
  }
  r.total_variation = std::numeric_limits<double>::quiet_NaN();
  return r;
}

PerimeterReport mollified_estimator(const SubRiemannianStructure& S, const SetRep& E, const Region& region,
                                    std::vector<double> eps_schedule, Exec exec) {
  const std::size_t n = S.dim, m = S.size();
  if (E.dim() != n) throw InvalidInput("set and structure disagree on dimension");
  const Box box = clip(region.box, E.box);
  const VoxelGrid V(box, E.resolution);
  const double hmax = *std::max_element(V.h.begin(), V.h.end());
  if (eps_schedule.empty()) eps_schedule = {8 * hmax, 6 * hmax, 4 * hmax};
  for (double e : eps_schedule)
    if (!(e >= 2.0 * hmax - 1e-15)) throw InvalidInput("mollifier radius below two voxel widths");
  const double emax = *std::max_element(eps_schedule.begin(), eps_schedule.end());

  // extended grid with the same spacing
  std::vector<int> pad(n), res(n);
  Point lo(n), hi(n);
  for (std::size_t a = 0; a < n; ++a) {
    pad[a] = static_cast<int>(std::ceil(emax / V.h[a])) + 2;
    res[a] = E.resolution + 2 * pad[a];
    lo[a] = box.lo[a] - pad[a] * V.h[a];
    hi[a] = box.hi[a] + pad[a] * V.h[a];
  }
  const Grid X(Box(lo, hi), res);
  std::vector<double> occ(X.size());
  for_each_index(
      X.size(),
      [&](std::size_t v) {
        double x[16];
        X.center(v, std::span<double>(x, n));
        occ[v] = occupancy(E, std::span<const double>(x, n), V.h);
      },
      exec);

  const NumericFrame F(S.frame, S.weight);
  const double dv = V.grid.cell_volume();
  PerimeterReport r;
  r.estimator = Estimator::Mollified;
  r.resolution = res_vector(n, E.resolution);
  std::vector<std::vector<double>> pf(m), pv(m);
  std::vector<double> tv;

  for (double eps : eps_schedule) {
    std::vector<double> u = occ, tmp(X.size());
    for (std::size_t a = 0; a < n; ++a) {
      const int R = static_cast<int>(std::floor(eps / V.h[a]));
      std::vector<double> k(2 * R + 1);
      double ks = 0.0;
      for (int j = -R; j <= R; ++j) {
        const double s = j * V.h[a] / eps;
        k[j + R] = std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
        ks += k[j + R];
      }
      for (auto& v : k) v /= ks;
      const std::size_t st = X.stride(a);
      const int N = res[a];
      for_each_index(
          X.size(),
          [&](std::size_t v) {
            const int i = static_cast<int>((v / st) % static_cast<std::size_t>(N));
            double s = 0.0;
            for (int j = -R; j <= R; ++j) {
              const int ii = std::clamp(i + j, 0, N - 1);
              s += k[j + R] * u[v + (static_cast<long>(ii) - i) * static_cast<long>(st)];
            }
            tmp[v] = s;
          },
          exec);
      std::swap(u, tmp);
    }
    const auto acc = chunked_sums(
        V.grid.size(), 2 * m + 1,
        [&](std::size_t v, double* a) {
          double x[16], Fx[256], du[16];
          int idx[16];
          V.grid.center(v, std::span<double>(x, n));
          if (region.mask && region.mask(std::span<const double>(x, n)) <= 0) return;
          V.grid.unravel(v, std::span<int>(idx, n));
          for (std::size_t b = 0; b < n; ++b) idx[b] += pad[b];
          const std::size_t c = X.linear(std::span<const int>(idx, n));
          for (std::size_t b = 0; b < n; ++b)
            du[b] = (u[c + X.stride(b)] - u[c - X.stride(b)]) / (2.0 * V.h[b]);
          F.eval(x, Fx);
          const double w = F.weight(x) * dv;
          double tot = 0.0;
          for (std::size_t i = 0; i < m; ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < n; ++j) d += Fx[i * n + j] * du[j];
            a[i] += d * w;
            a[m + i] += std::abs(d) * w;
            tot += d * d;
          }
          a[2 * m] += std::sqrt(tot) * w;
        },
        exec);
    for (std::size_t i = 0; i < m; ++i) {
      pf[i].push_back(acc[i]);
      pv[i].push_back(acc[m + i]);
    }
    tv.push_back(acc[2 * m]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    r.per_field.push_back(extrapolate(eps_schedule, pf[i]));
    r.per_field_variation.push_back(extrapolate(eps_schedule, pv[i]));
  }
  r.total_variation = extrapolate(eps_schedule, tv);
  r.schedule = eps_schedule;
  r.raw_total = tv;
  return r;
}

Eigen::VectorXd dual_normal(const SubRiemannianStructure& S, const SetRep& E, const Point& x) {
  const std::size_t n = S.dim;
  std::vector<double> g(n);
  const std::span<const double> xs(x.data(), n);
  const double phi = E.value(xs);
  const double gn = E.gradient(xs, g);
  if (gn < E.grad_floor) throw DegenerateLevelSet("level set gradient vanishes", std::vector<double>(xs.begin(), xs.end()));
  if (std::abs(phi) / gn > 1e-6) throw InvalidInput("point is not on the boundary");
  const Eigen::MatrixXd Fx = S.frame_matrix(x);
  const Eigen::Map<const Eigen::VectorXd> grad(g.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd N = Fx.transpose() * (-grad / gn);
  const double scale = std::max(1.0, Fx.norm());
  if (N.norm() <= 1e-12 * scale)
    throw CharacteristicPoint("every frame field is tangent to the boundary", std::vector<double>(xs.begin(), xs.end()));
  return N / N.norm();
}

GeometricNormal geometric_normal(const SubRiemannianStructure& S, const SetRep& E, const Point& x) {
  const Eigen::VectorXd nu = dual_normal(S, E, x);
  GeometricNormal out;
  out.vector = S.frame_matrix(x) * nu;
  const MetricEval q = quadratic_form(S, x, out.vector);
  out.G = q.finite ? q.value : std::numeric_limits<double>::infinity();
  out.unit = std::abs(out.G - 1.0) <= 1e-6;
  return out;
}

std::vector<Point> sample_boundary(const SetRep& E, int count, std::uint64_t seed) {
  const std::size_t n = E.dim();
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> U;
  for (std::size_t a = 0; a < n; ++a) U.emplace_back(E.box.lo[a], E.box.hi[a]);
  std::vector<Point> out;
  std::vector<double> g(n);
  for (int tries = 0; static_cast<int>(out.size()) < count && tries < 100 * count; ++tries) {
    Point x(n);
    for (std::size_t a = 0; a < n; ++a) x[a] = U[a](rng);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const std::span<const double> xs(x.data(), n);
      const double phi = E.value(xs);
      const double gn = E.gradient(xs, g);
      if (gn < E.grad_floor) break;
      if (std::abs(phi) / gn < 1e-13) {
        ok = true;
        break;
      }
      for (std::size_t a = 0; a < n; ++a) x[a] -= phi * g[a] / (gn * gn);
    }
    if (ok && E.box.contains(std::span<const double>(x.data(), n))) out.push_back(x);
  }
  return out;
}

ReducedBoundaryScore reduced_boundary_score(const SubRiemannianStructure& S, const SetRep& E, const Point& p,
                                            const std::vector<double>& radii, const BallMaskOptions& opts) {
  const std::size_t n = S.dim, m = S.size();
  const Eigen::VectorXd nu_p = dual_normal(S, E, p);
  const NumericFrame F(S.frame);
  ReducedBoundaryScore out;
  for (double r : radii) {
    const BallMask ball = ball_mask(S, p, r, opts);
    double mass = 0.0, osc = 0.0;
    std::vector<double> Fx(n * m);
    boundary_quadrature(S, E, Region::of(ball), [&](std::span<const double> q, std::span<const double> nin, double w) {
      F.eval(q.data(), Fx.data());
      Eigen::VectorXd N(m);
      for (std::size_t i = 0; i < m; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += Fx[i * n + j] * nin[j];
        N[static_cast<Eigen::Index>(i)] = d;
      }
      const double a = N.norm();
      if (a == 0.0) return;
      mass += a * w;
      osc += (N / a - nu_p).squaredNorm() * a * w;
    });
    out.radii.push_back(r);
    out.perimeter.push_back(mass);
    out.score.push_back(mass > 0.0 ? osc / mass : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

DensityRatio density_ratio(const SubRiemannianStructure& S, const SetRep& E, const BallMask& ball) {
  const NumericFrame F(S.frame, S.weight);
  DensityRatio d;
  d.perimeter = surface_estimator(S, E, Region::of(ball)).total_variation;
  for (std::size_t v = 0; v < ball.grid.size(); ++v) {
    if (ball.state[v] == VoxelState::Unknown) ++d.unknown_voxels;
    if (ball.state[v] != VoxelState::Inside) continue;
    const Point c = ball.grid.center(v);
    d.measure += F.weight(c.data()) * ball.grid.cell_volume();
  }
  d.ratio = d.perimeter / (d.measure / ball.radius);
  return d;
}

DensityRatio density_ratio(const SubRiemannianStructure& S, const SetRep& E, const Point& p, double r,
                           const BallMaskOptions& opts) {
  return density_ratio(S, E, ball_mask(S, p, r, opts));
}

}  // namespace srg
