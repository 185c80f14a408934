#include "pixelaudit/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pixelaudit {

int Histogram256::bin_of(double value) const {
  if (!(value > lo)) return 0;  // also catches NaN
  if (value >= hi) return kBins - 1;
  const int bin = static_cast<int>(std::floor((value - lo) / (hi - lo) * kBins));
  return std::clamp(bin, 0, kBins - 1);
}

void Histogram256::add(double value, std::int64_t weight) {
  counts[bin_of(value)] += weight;
  total += weight;
}

int Histogram256::nonzero_bins() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                        [](std::int64_t c) { return c > 0; }));
}

Histogram256 make_histogram(std::span<const double> values, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("histogram range must satisfy lo < hi");
  Histogram256 hist;
  hist.lo = lo;
  hist.hi = hi;
  for (double v : values) hist.add(v);
  return hist;
}

}  // namespace pixelaudit
