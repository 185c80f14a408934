#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pixelaudit/histogram.hpp"
#include "pixelaudit/image.hpp"

namespace pixelaudit {

// Decodes PNG, JPEG or BMP bytes. Images with three or more channels become
// RGB (alpha dropped); one- or two-channel images become Luma.
ImageRecord decode_image(std::span<const std::uint8_t> bytes, const std::string& id);
ImageRecord load_image(const std::string& path, const std::string& id);

std::vector<std::uint8_t> encode_png(const ImageRecord& image);
std::vector<std::uint8_t> encode_bmp(const ImageRecord& image);
void save_png(const ImageRecord& image, const std::string& path);

double luma_of(double r, double g, double b, LumaFormula formula);
LumaPlane to_luma(const ImageRecord& image, LumaFormula formula = LumaFormula::kHsp);

struct BrightnessStats {
  std::map<int, double> percentiles;  // rank -> normalized luma
  double mean = 0.0;

  double at(int rank) const;
};

// Percentiles use linear interpolation between order statistics.
BrightnessStats brightness_stats(const LumaPlane& luma, std::span<const int> ranks);

// Linear-interpolated percentile of unsorted values, q in [0, 100].
double percentile(std::vector<double> values, double q);
double percentile_sorted(std::span<const double> sorted, double q);

// 4-neighbour Laplacian with reflect-101 borders; population variance of the
// response. Throws TooSmall below 3x3.
double laplacian_variance(const LumaPlane& luma);

enum class ResizeMethod { kNearest, kBilinear };

// Bilinear uses a triangle filter whose support widens with the downscale
// factor, so shrinking averages over the source footprint.
ImageRecord resize(const ImageRecord& image, int new_width, int new_height,
                   ResizeMethod method = ResizeMethod::kBilinear);
LumaPlane resize(const LumaPlane& plane, int new_width, int new_height,
                 ResizeMethod method = ResizeMethod::kBilinear);

Histogram256 luma_histogram(const LumaPlane& luma);

}  // namespace pixelaudit
