#pragma once

// Deterministic parallel reductions. Work is cut into fixed-size blocks that
// never depend on the thread count; each block is reduced serially and the
// block partials are combined in index order, so results are bit-identical
// for any number of workers.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <omp.h>

namespace flowlab {

inline constexpr std::size_t kBlockSize = 4096;

/// Sets the OpenMP worker count used by every parallel kernel; 0 keeps the default.
void set_workers(int workers);
int workers();

/// splitmix64 finalizer; used to derive per-index streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from 53 high bits.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11U) * 0x1.0p-53;
}

/// Sum of `body(i)` over i < n with fixed blocking. `Acc` must be default
/// constructible to zero and support `+=`.
template <class Acc, class Body>
Acc blocked_sum(std::size_t n, Body&& body) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Acc> partial(blocks, Acc{});
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t b = 0; b < blocks; ++b) {
    Acc acc{};
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) acc += body(i);
    partial[b] = acc;
  }
  Acc total{};
  for (const auto& p : partial) total += p;
  return total;
}

/// Fills out[i] = body(i) in parallel.
template <class T, class Body>
void parallel_fill(std::vector<T>& out, Body&& body) {
  const std::size_t n = out.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = body(i);
}

}  // namespace flowlab
