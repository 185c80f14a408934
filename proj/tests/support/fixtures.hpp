#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "pixelaudit/histogram.hpp"
#include "pixelaudit/random.hpp"

namespace fixtures {

inline pixelaudit::Histogram256 to_histogram(const oracle::Counts& c) {
  pixelaudit::Histogram256 h;
  h.counts = c;
  h.total = 0;
  for (auto v : c) h.total += v;
  return h;
}

// Mix of shapes: sparse random bins, sums of Gaussian lobes, and a few spikes.
// Always at least two occupied bins.
inline oracle::Counts random_counts(pixelaudit::Rng& rng) {
  oracle::Counts c{};
  switch (rng.below(3)) {
    case 0: {
      const double density = rng.uniform(0.02, 1.0);
      for (auto& v : c)
        if (rng.uniform() < density) v = static_cast<std::int64_t>(rng.below(1000));
      break;
    }
    case 1: {
      const int lobes = 1 + static_cast<int>(rng.below(4));
      for (int l = 0; l < lobes; ++l) {
        const double mu = rng.uniform(0, 255), sd = rng.uniform(1, 40);
        const double mass = rng.uniform(100, 5000);
        for (int k = 0; k < 256; ++k) {
          const double z = (k - mu) / sd;
          c[k] += static_cast<std::int64_t>(std::floor(mass * std::exp(-0.5 * z * z) / sd));
        }
      }
      break;
    }
    default: {
      const int spikes = 2 + static_cast<int>(rng.below(6));
      for (int s = 0; s < spikes; ++s) c[rng.below(256)] += 1 + static_cast<std::int64_t>(rng.below(500));
      break;
    }
  }
  int occupied = 0;
  for (auto v : c) occupied += v > 0;
  if (occupied < 2) {
    c[rng.below(128)] += 1;
    c[128 + rng.below(128)] += 1;
  }
  return c;
}

// Hash sets with planted near-duplicate families so every cutoff produces
// non-trivial structure.
inline std::vector<std::uint64_t> random_hashes(pixelaudit::Rng& rng, std::size_t n) {
  std::vector<std::uint64_t> out;
  while (out.size() < n) {
    std::uint64_t base = rng.next();
    const std::size_t family = 1 + rng.below(5);
    for (std::size_t f = 0; f < family && out.size() < n; ++f) {
      std::uint64_t h = base;
      const int flips = static_cast<int>(rng.below(16));
      for (int b = 0; b < flips; ++b) h ^= std::uint64_t{1} << rng.below(64);
      out.push_back(h);
      if (rng.uniform() < 0.5) base = h;  // chains
    }
  }
  return out;
}

}  // namespace fixtures
