#include "detail/resample.hpp"

#include <cmath>

namespace pixelaudit::detail {
namespace {

struct Tap {
  int first = 0;
  std::vector<double> weights;
};

std::vector<Tap> taps_for(int src_len, int dst_len, ResizeMethod method) {
  std::vector<Tap> taps(dst_len);
  const double scale = static_cast<double>(src_len) / dst_len;
  if (method == ResizeMethod::kNearest) {
    for (int i = 0; i < dst_len; ++i) {
      const int src = std::min(static_cast<int>(std::floor((i + 0.5) * scale)), src_len - 1);
      taps[i] = Tap{src, {1.0}};
    }
    return taps;
  }
  const double support = std::max(scale, 1.0);
  for (int i = 0; i < dst_len; ++i) {
    const double center = (i + 0.5) * scale;
    const int lo = std::max(0, static_cast<int>(std::floor(center - support)));
    const int hi = std::min(src_len - 1, static_cast<int>(std::ceil(center + support)));
    Tap tap;
    tap.first = lo;
    double total = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double w = std::max(0.0, 1.0 - std::abs((j + 0.5 - center) / support));
      tap.weights.push_back(w);
      total += w;
    }
    for (double& w : tap.weights) w /= total;
    taps[i] = std::move(tap);
  }
  return taps;
}

}  // namespace

std::vector<double> resample(const std::vector<double>& src, int width, int height,
                             int channels, int new_width, int new_height,
                             ResizeMethod method) {
  const auto xtaps = taps_for(width, new_width, method);
  const auto ytaps = taps_for(height, new_height, method);

  // Horizontal pass, then vertical; intermediate stays real-valued.
  std::vector<double> tmp(static_cast<std::size_t>(new_width) * height * channels, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < new_width; ++x) {
      const Tap& tap = xtaps[x];
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < tap.weights.size(); ++k) {
          acc += tap.weights[k] *
                 src[(static_cast<std::size_t>(y) * width + tap.first + k) * channels + c];
        }
        tmp[(static_cast<std::size_t>(y) * new_width + x) * channels + c] = acc;
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(new_width) * new_height * channels, 0.0);
  for (int y = 0; y < new_height; ++y) {
    const Tap& tap = ytaps[y];
    for (int x = 0; x < new_width; ++x) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < tap.weights.size(); ++k) {
          acc += tap.weights[k] *
                 tmp[((tap.first + k) * new_width + x) * channels + c];
        }
        out[(static_cast<std::size_t>(y) * new_width + x) * channels + c] = acc;
      }
    }
  }
  return out;
}

}  // namespace pixelaudit::detail
