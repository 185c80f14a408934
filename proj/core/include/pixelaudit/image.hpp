#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pixelaudit {

enum class ColorMode { kRgb, kLuma };

inline int channels(ColorMode mode) { return mode == ColorMode::kRgb ? 3 : 1; }

// A decoded 8-bit raster. Samples are row-major and interleaved (RGBRGB...).
struct ImageRecord {
  std::string id;
  int width = 0;
  int height = 0;
  ColorMode mode = ColorMode::kRgb;
  std::vector<std::uint8_t> pixels;
  std::string source_path;

  int channel_count() const { return channels(mode); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channel_count() + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channel_count() + c];
  }

  static ImageRecord blank(std::string id, int width, int height, ColorMode mode,
                           std::uint8_t fill = 0);
};

// Checks the pixel-buffer length invariant; throws std::invalid_argument.
void validate(const ImageRecord& image);

// Real-valued single-channel plane, values in [0, 255].
struct LumaPlane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

enum class LumaFormula { kHsp, kBt709, kBt601, kBt601Rms, kChannelMean };

std::string to_string(LumaFormula formula);
LumaFormula parse_luma_formula(const std::string& text);

}  // namespace pixelaudit
