#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace pixelaudit {

inline constexpr int kBins = 256;

// 256 equal-width bins over [lo, hi]; the last bin is closed on the right.
struct Histogram256 {
  std::array<std::int64_t, kBins> counts{};
  double lo = 0.0;
  double hi = 1.0;
  std::int64_t total = 0;

  double bin_width() const { return (hi - lo) / kBins; }
  double lower_edge(int bin) const { return lo + bin * bin_width(); }
  double upper_edge(int bin) const { return bin == kBins - 1 ? hi : lo + (bin + 1) * bin_width(); }
  double center(int bin) const { return lo + (bin + 0.5) * bin_width(); }

  // Bin index for a value, clamped into range.
  int bin_of(double value) const;
  void add(double value, std::int64_t weight = 1);
  int nonzero_bins() const;
};

Histogram256 make_histogram(std::span<const double> values, double lo, double hi);

}  // namespace pixelaudit
