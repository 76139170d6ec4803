#include "srg/flow.hpp"

#include <cmath>

#include "srg/errors.hpp"

namespace srg {

int default_flow_steps(double t) {
  return std::max(64, static_cast<int>(std::ceil(std::abs(t) * 256.0)));
}

namespace {

// velocity v = sum_i c_i X_i(y); optionally the weighted divergence of that field
void velocity(const NumericFrame& F, std::span<const double> c, const double* y, double* v, double* div,
              double* scratch) {
  const std::size_t n = F.dim(), m = F.size();
  F.eval(y, scratch);
  for (std::size_t j = 0; j < n; ++j) v[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (c[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) v[j] += c[i] * scratch[i * n + j];
  }
  if (div) {
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (c[i] != 0.0) d += c[i] * F.divergence(i, y);
    *div = d;
  }
}

}  // namespace

bool rk4_integrate(const NumericFrame& F, std::span<const double> c, double* x, double t, int steps,
                   double* logjac, const Box* box, double* exit_time) {
  const std::size_t n = F.dim();
  const double h = t / steps;
  std::vector<double> buf(7 * n + n * F.size());
  double *k1 = buf.data(), *k2 = k1 + n, *k3 = k2 + n, *k4 = k3 + n, *tmp = k4 + n, *prev = tmp + n;
  double* scratch = prev + 2 * n;
  double d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  double* pd1 = logjac ? &d1 : nullptr;
  double* pd2 = logjac ? &d2 : nullptr;
  double* pd3 = logjac ? &d3 : nullptr;
  double* pd4 = logjac ? &d4 : nullptr;
  for (int s = 0; s < steps; ++s) {
    for (std::size_t j = 0; j < n; ++j) prev[j] = x[j];
    velocity(F, c, x, k1, pd1, scratch);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
    velocity(F, c, tmp, k2, pd2, scratch);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
    velocity(F, c, tmp, k3, pd3, scratch);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * k3[j];
    velocity(F, c, tmp, k4, pd4, scratch);
    for (std::size_t j = 0; j < n; ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (logjac) *logjac += h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    if (box && !box->contains(std::span<const double>(x, n))) {
      for (std::size_t j = 0; j < n; ++j) x[j] = prev[j];
      if (exit_time) *exit_time = (s + 1) * h;
      return false;
    }
  }
  return true;
}

FlowResult flow(const PolyVectorField& X, const Point& x0, double t, int steps, const std::optional<Box>& safety_box,
                const VolumeWeight& weight) {
  if (steps < 1) throw InvalidInput("flow needs at least one step");
  if (static_cast<std::size_t>(x0.size()) != X.dim()) throw InvalidInput("start point has the wrong dimension");
  if (safety_box && !safety_box->contains(std::span<const double>(x0.data(), X.dim())))
    throw FlowExit("start point outside the safety box", 0.0);
  FlowResult r{x0, 1.0, steps};
  if (t == 0.0) return r;
  const NumericFrame F(X, weight);
  const double one = 1.0;
  double logj = 0.0, exit_t = 0.0;
  if (!rk4_integrate(F, std::span<const double>(&one, 1), r.endpoint.data(), t, steps, &logj,
                     safety_box ? &*safety_box : nullptr, &exit_t))
    throw FlowExit("trajectory left the safety box", exit_t);
  r.jacobian = std::exp(logj);
  return r;
}

FlowResult flow(const PolyVectorField& X, const Point& x0, double t, const FlowOptions& opts) {
  if (opts.steps > 0) return flow(X, x0, t, opts.steps, opts.safety_box, opts.weight);
  constexpr int kMaxSteps = 1 << 20;
  int steps = default_flow_steps(t);
  FlowResult prev = flow(X, x0, t, steps, opts.safety_box, opts.weight);
  while (steps < kMaxSteps) {
    steps *= 2;
    FlowResult next = flow(X, x0, t, steps, opts.safety_box, opts.weight);
    const double diff = (next.endpoint - prev.endpoint).lpNorm<Eigen::Infinity>();
    prev = std::move(next);
    if (diff < 1e-9) break;
  }
  return prev;
}

}  // namespace srg
