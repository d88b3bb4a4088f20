#pragma once

// Monte Carlo auction simulation by inverse-quantile sampling.
//
// Samples are drawn in fixed-size chunks; chunk c uses a Mersenne Twister
// seeded from (seed, c), and chunk statistics are merged in chunk order, so
// an estimate depends only on (seed, n) and never on the thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "scalerobust/mechanisms.hpp"
#include "scalerobust/parallel.hpp"
#include "scalerobust/revcurve.hpp"

namespace scalerobust {

inline constexpr std::size_t kMcChunk = std::size_t{1} << 16;
inline constexpr double kMinSampleQuantile = 1e-300;

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

/// Inverse-transform draw: the value at quantile u.
inline Value sample_value(const RevenueCurve& c, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("sample_value: u outside [0,1]");
  if (!std::isfinite(c.support_top())) throw std::domain_error("sample_value: unbounded support");
  return c.price(std::max(u, kMinSampleQuantile));
}

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on (0, 1] from 53 random bits.
inline double unit_open_closed(std::mt19937_64& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

namespace detail {

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }
};

}  // namespace detail

/// Monte Carlo revenue of an ex-post rule on two i.i.d. draws from c.
template <ExPostRule Rule>
McEstimate mc_revenue(const Rule& rule, const RevenueCurve& c, std::uint64_t n, std::uint64_t seed,
                      unsigned threads = default_threads()) {
  if (n < 1000) throw std::invalid_argument("mc_revenue: need n >= 1000");
  const std::size_t chunks = static_cast<std::size_t>((n + kMcChunk - 1) / kMcChunk);
  std::vector<detail::Moments> parts(chunks);
  parallel_for(
      chunks,
      [&](std::size_t k) {
        std::mt19937_64 eng = chunk_engine(seed, k);
        const std::uint64_t begin = static_cast<std::uint64_t>(k) * kMcChunk;
        const std::uint64_t end = std::min<std::uint64_t>(n, begin + kMcChunk);
        detail::Moments m;
        for (std::uint64_t i = begin; i < end; ++i) {
          const Value v1 = sample_value(c, unit_open_closed(eng));
          const Value v2 = sample_value(c, unit_open_closed(eng));
          m.add(rule(v1, v2).revenue());
        }
        parts[k] = m;
      },
      threads);
  detail::Moments total;
  for (const auto& p : parts) total.merge(p);
  McEstimate est;
  est.mean = total.mean;
  est.std_err = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  est.n = n;
  est.seed = seed;
  return est;
}

}  // namespace scalerobust
