#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pixelaudit/imaging.hpp"

namespace pixelaudit::detail {

inline std::uint8_t to_sample(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Reflect-101 index ("reflect without repeating the edge").
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Interleaved multi-channel planes of doubles.
std::vector<double> resample(const std::vector<double>& src, int width, int height,
                             int channels, int new_width, int new_height,
                             ResizeMethod method);

}  // namespace pixelaudit::detail
