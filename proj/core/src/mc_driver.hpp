#pragma once

// Chunked Monte Carlo driver shared by the tree and semilinear estimators.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "bseries/errors.hpp"
#include "bseries/sampler.hpp"

namespace bseries::detail {

inline constexpr std::size_t kChunkSize = 4096;

struct ChunkStats {
  std::uint64_t count = 0;
  Vector mean;
  Vector m2;
  double square_mean = 0.0;
  std::vector<std::uint64_t> histogram;

  ChunkStats(std::size_t dim, std::size_t bins) : mean(dim, 0.0), m2(dim, 0.0), histogram(bins, 0) {}

  void add(const Vector& x, std::size_t size) {
    ++count;
    const double inv = 1.0 / static_cast<double>(count);
    double sq = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta * inv;
      m2[i] += delta * (x[i] - mean[i]);
      sq += x[i] * x[i];
    }
    square_mean += (sq - square_mean) * inv;
    if (size < histogram.size()) ++histogram[size];
  }

  // Chan et al. pairwise update.
  static ChunkStats merge(const ChunkStats& a, const ChunkStats& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    ChunkStats out(a.mean.size(), a.histogram.size());
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double n = na + nb;
    out.count = a.count + b.count;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
      const double delta = b.mean[i] - a.mean[i];
      out.mean[i] = a.mean[i] + delta * (nb / n);
      out.m2[i] = a.m2[i] + b.m2[i] + delta * delta * (na * nb / n);
    }
    out.square_mean = a.square_mean + (b.square_mean - a.square_mean) * (nb / n);
    for (std::size_t i = 0; i < out.histogram.size(); ++i) out.histogram[i] = a.histogram[i] + b.histogram[i];
    return out;
  }
};

inline ChunkStats merge_range(const std::vector<ChunkStats>& chunks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return chunks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return ChunkStats::merge(merge_range(chunks, lo, mid), merge_range(chunks, mid, hi));
}

inline std::size_t resolve_workers(std::size_t requested, std::size_t chunks) {
  std::size_t w = requested;
  if (w == 0) w = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, chunks));
}

// `make_state()` builds per-worker scratch; `draw(k, state, out)` fills the
// payoff of sample k and returns the tree order for the histogram. Errors are
// reported for the lowest failing sample index.
template <class MakeState, class Draw>
McEstimate run_chunked(std::size_t samples, std::uint64_t seed, std::size_t workers, std::size_t dim,
                       std::size_t bins, MakeState make_state, Draw draw) {
  if (samples < 2) throw ConfigError("at least 2 samples are required");
  const std::size_t chunk_count = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkStats> chunks(chunk_count, ChunkStats(dim, bins));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto worker = [&] {
    auto state = make_state();
    Vector out(dim);
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunk_count) return;
      const std::size_t begin = c * kChunkSize;
      const std::size_t end = std::min(samples, begin + kChunkSize);
      for (std::size_t k = begin; k < end; ++k) {
        try {
          const std::size_t size = draw(static_cast<std::uint64_t>(k), state, out);
          chunks[c].add(out, size);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (k < error_index) {
            error_index = k;
            error = std::current_exception();
          }
          stop = true;
          return;
        }
      }
    }
  };

  const std::size_t n_workers = resolve_workers(workers, chunk_count);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  const ChunkStats total = merge_range(chunks, 0, chunk_count);
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mean = total.mean;
  est.std_error.resize(dim);
  const double n = static_cast<double>(total.count);
  for (std::size_t i = 0; i < dim; ++i) est.std_error[i] = std::sqrt(total.m2[i] / (n - 1.0) / n);
  est.size_histogram = total.histogram;
  est.mean_square = total.square_mean;
  return est;
}

}  // namespace bseries::detail
