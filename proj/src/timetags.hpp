#pragma once

// Time-tag helpers shared by the pair and Franson simulators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <vector>

namespace wgpair::detail {

inline constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

inline std::mt19937_64 shard_engine(std::uint64_t seed, int shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), 0x5eedu};
  return std::mt19937_64(seq);
}

// Per-detector jitter so that the difference of two tags has FWHM t_res.
inline double detector_sigma_ps(double t_res_ps) { return t_res_ps * kFwhmToSigma / std::sqrt(2.0); }

inline void add_dark_counts(std::vector<double>& tags, double rate_hz, double duration_ps,
                            std::mt19937_64& rng) {
  if (rate_hz <= 0.0) return;
  std::poisson_distribution<std::uint64_t> n(rate_hz * duration_ps * 1e-12);
  std::uniform_real_distribution<double> at(0.0, duration_ps);
  const std::uint64_t count = n(rng);
  for (std::uint64_t k = 0; k < count; ++k) tags.push_back(at(rng));
}

// Uniform bins of `width` with bin 0 centred on zero delay.
struct DelayBins {
  double width = 0.0;
  int half = 0;  // bins on each side of the central one

  int count() const { return 2 * half + 1; }
  double lo() const { return -(half + 0.5) * width; }
  double hi() const { return (half + 0.5) * width; }
  std::vector<double> edges() const {
    std::vector<double> e(count() + 1);
    for (int k = 0; k <= count(); ++k) e[k] = lo() + k * width;
    return e;
  }
};

struct CorrelationCounts {
  std::uint64_t in_window = 0;
  std::vector<std::uint64_t> histogram;
};

// Counts tag pairs with t2 - t1 inside [center - w, center + w] for each
// centre, and fills the delay histogram. Both inputs must be sorted.
inline CorrelationCounts correlate(const std::vector<double>& t1, const std::vector<double>& t2,
                                   const std::vector<double>& centers, double half_window,
                                   const DelayBins& bins, std::vector<std::uint64_t>* per_center) {
  CorrelationCounts out;
  out.histogram.assign(bins.count(), 0);
  if (per_center) per_center->assign(centers.size(), 0);
  double reach = std::max(std::abs(bins.lo()), bins.hi());
  for (double c : centers) reach = std::max(reach, std::abs(c) + half_window);
  std::size_t start = 0;
  for (double a : t1) {
    while (start < t2.size() && t2[start] < a - reach) ++start;
    for (std::size_t k = start; k < t2.size() && t2[k] <= a + reach; ++k) {
      const double d = t2[k] - a;
      if (d >= bins.lo() && d < bins.hi()) {
        const int b = static_cast<int>(std::floor((d - bins.lo()) / bins.width));
        if (b >= 0 && b < bins.count()) ++out.histogram[b];
      }
      for (std::size_t c = 0; c < centers.size(); ++c) {
        if (std::abs(d - centers[c]) <= half_window) {
          if (c == 0) ++out.in_window;
          if (per_center) ++(*per_center)[c];
        }
      }
    }
  }
  return out;
}

// Runs fn(shard) for every shard, `threads` at a time, collecting results in
// shard order.
template <class Fn>
auto run_shards(int shards, int threads, Fn fn) {
  using R = decltype(fn(0));
  std::vector<R> results(shards);
  threads = std::clamp(threads, 1, std::max(1, shards));
  if (threads == 1) {
    for (int s = 0; s < shards; ++s) results[s] = fn(s);
    return results;
  }
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < threads; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (int s = t; s < shards; s += threads) results[s] = fn(s);
    }));
  }
  for (auto& j : jobs) j.get();
  return results;
}

}  // namespace wgpair::detail
