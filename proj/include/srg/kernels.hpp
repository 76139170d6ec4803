#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace srg {

/// Every grid kernel has a serial reference path and an OpenMP path. Both
/// use the same fixed chunking, so reductions are bitwise identical.
enum class Exec { Serial, Parallel };

inline constexpr std::size_t kChunk = 4096;

template <class F>
void for_each_index(std::size_t count, F&& f, Exec exec = Exec::Parallel) {
  const auto n = static_cast<long long>(count);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (long long i = 0; i < n; ++i) f(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < n; ++i) f(static_cast<std::size_t>(i));
  }
}

/// Sum of f(i) over [0, count): partial sums per chunk of kChunk indices,
/// then an in-order sum of the partials.
template <class F>
double chunked_sum(std::size_t count, F&& f, Exec exec = Exec::Parallel) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> part(chunks, 0.0);
  auto body = [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(count, lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    part[c] = s;
  };
  const auto nc = static_cast<long long>(chunks);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long c = 0; c < nc; ++c) body(static_cast<std::size_t>(c));
  } else {
    for (long long c = 0; c < nc; ++c) body(static_cast<std::size_t>(c));
  }
  double s = 0.0;
  for (double p : part) s += p;
  return s;
}

/// chunked_sum for K accumulators: f(i, acc) adds into acc[0..K).
template <class F>
std::vector<double> chunked_sums(std::size_t count, std::size_t K, F&& f, Exec exec = Exec::Parallel) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> part(chunks * K, 0.0);
  auto body = [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(count, lo + kChunk);
    double* acc = part.data() + c * K;
    for (std::size_t i = lo; i < hi; ++i) f(i, acc);
  };
  const auto nc = static_cast<long long>(chunks);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long c = 0; c < nc; ++c) body(static_cast<std::size_t>(c));
  } else {
    for (long long c = 0; c < nc; ++c) body(static_cast<std::size_t>(c));
  }
  std::vector<double> s(K, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t k = 0; k < K; ++k) s[k] += part[c * K + k];
  return s;
}

}  // namespace srg
