#include "pixelaudit/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "pixelaudit/error.hpp"
#include "detail/resample.hpp"

namespace pixelaudit {

ImageRecord decode_image(std::span<const std::uint8_t> bytes, const std::string& id) {
  if (bytes.empty()) throw DecodeError(id, "empty input");
  cv::Mat decoded;
  try {
    const cv::Mat buffer(1, static_cast<int>(bytes.size()), CV_8UC1,
                         const_cast<std::uint8_t*>(bytes.data()));
    decoded = cv::imdecode(buffer, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw DecodeError(id, e.what());
  }
  if (decoded.empty()) throw DecodeError(id, "unsupported or truncated image data");
  if (decoded.depth() != CV_8U) throw DecodeError(id, "only 8-bit samples are supported");

  ImageRecord image;
  image.id = id;
  image.width = decoded.cols;
  image.height = decoded.rows;
  const int src_channels = decoded.channels();
  image.mode = src_channels >= 3 ? ColorMode::kRgb : ColorMode::kLuma;
  const int out_channels = image.channel_count();
  image.pixels.resize(image.pixel_count() * out_channels);

  for (int y = 0; y < decoded.rows; ++y) {
    const std::uint8_t* row = decoded.ptr<std::uint8_t>(y);
    std::uint8_t* out = image.pixels.data() + static_cast<std::size_t>(y) * image.width * out_channels;
    for (int x = 0; x < decoded.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::size_t>(x) * src_channels;
      if (out_channels == 3) {
        // OpenCV stores BGR(A).
        out[3 * x + 0] = px[2];
        out[3 * x + 1] = px[1];
        out[3 * x + 2] = px[0];
      } else {
        out[x] = px[0];
      }
    }
  }
  return image;
}

ImageRecord load_image(const std::string& path, const std::string& id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError(id, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  ImageRecord image = decode_image(bytes, id);
  image.source_path = path;
  return image;
}

namespace {

cv::Mat to_mat(const ImageRecord& image) {
  validate(image);
  if (image.mode == ColorMode::kLuma) {
    cv::Mat mat(image.height, image.width, CV_8UC1);
    std::copy(image.pixels.begin(), image.pixels.end(), mat.data);
    return mat;
  }
  cv::Mat mat(image.height, image.width, CV_8UC3);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    mat.data[3 * i + 0] = image.pixels[3 * i + 2];
    mat.data[3 * i + 1] = image.pixels[3 * i + 1];
    mat.data[3 * i + 2] = image.pixels[3 * i + 0];
  }
  return mat;
}

std::vector<std::uint8_t> encode(const ImageRecord& image, const std::string& ext,
                                 const std::vector<int>& params) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(ext, to_mat(image), out, params)) {
    throw Error("failed to encode '" + image.id + "' as " + ext);
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageRecord& image) {
  return encode(image, ".png", {cv::IMWRITE_PNG_COMPRESSION, 6});
}

std::vector<std::uint8_t> encode_bmp(const ImageRecord& image) {
  return encode(image, ".bmp", {});
}

void save_png(const ImageRecord& image, const std::string& path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

double luma_of(double r, double g, double b, LumaFormula formula) {
  switch (formula) {
    case LumaFormula::kHsp:
      return std::sqrt(0.241 * r * r + 0.691 * g * g + 0.068 * b * b);
    case LumaFormula::kBt709:
      return 0.2126 * r + 0.7152 * g + 0.0722 * b;
    case LumaFormula::kBt601:
      return 0.299 * r + 0.587 * g + 0.114 * b;
    case LumaFormula::kBt601Rms:
      return std::sqrt(0.299 * r * r + 0.587 * g * g + 0.114 * b * b);
    case LumaFormula::kChannelMean:
      return (r + g + b) / 3.0;
  }
  return 0.0;
}

LumaPlane to_luma(const ImageRecord& image, LumaFormula formula) {
  validate(image);
  LumaPlane plane;
  plane.width = image.width;
  plane.height = image.height;
  plane.values.resize(image.pixel_count());
  if (image.mode == ColorMode::kLuma) {
    std::transform(image.pixels.begin(), image.pixels.end(), plane.values.begin(),
                   [](std::uint8_t v) { return static_cast<double>(v); });
    return plane;
  }
  for (std::size_t i = 0; i < plane.values.size(); ++i) {
    const double v = luma_of(image.pixels[3 * i], image.pixels[3 * i + 1],
                             image.pixels[3 * i + 2], formula);
    // Weights sum to one, but rounding can nudge white a hair past 255.
    plane.values[i] = std::clamp(v, 0.0, 255.0);
  }
  return plane;
}

double BrightnessStats::at(int rank) const {
  const auto it = percentiles.find(rank);
  if (it == percentiles.end()) throw MissingPercentile(rank);
  return it->second;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty sequence");
  const double pos = (static_cast<double>(sorted.size()) - 1.0) * q / 100.0;
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + (sorted[above] - sorted[below]) * frac;
}

double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return percentile_sorted(values, q);
}

BrightnessStats brightness_stats(const LumaPlane& luma, std::span<const int> ranks) {
  if (luma.empty()) throw EmptyPlane();
  std::vector<double> sorted(luma.values.size());
  std::transform(luma.values.begin(), luma.values.end(), sorted.begin(),
                 [](double v) { return v / 255.0; });
  std::sort(sorted.begin(), sorted.end());

  BrightnessStats stats;
  for (int rank : ranks) {
    if (rank < 1 || rank > 99) {
      throw std::invalid_argument("percentile rank must be in [1, 99]");
    }
    stats.percentiles[rank] = percentile_sorted(sorted, rank);
  }
  stats.mean = std::accumulate(luma.values.begin(), luma.values.end(), 0.0) /
               static_cast<double>(luma.values.size()) / 255.0;
  return stats;
}

double laplacian_variance(const LumaPlane& luma) {
  const int w = luma.width;
  const int h = luma.height;
  if (w < 3 || h < 3) throw TooSmall(w, h);

  auto reflect = [](int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
  };

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double response = luma.at(x, reflect(y - 1, h)) + luma.at(x, reflect(y + 1, h)) +
                              luma.at(reflect(x - 1, w), y) + luma.at(reflect(x + 1, w), y) -
                              4.0 * luma.at(x, y);
      sum += response;
      sum_sq += response * response;
    }
  }
  const double n = static_cast<double>(w) * h;
  const double mean = sum / n;
  return std::max(0.0, sum_sq / n - mean * mean);
}

ImageRecord resize(const ImageRecord& image, int new_width, int new_height,
                   ResizeMethod method) {
  validate(image);
  if (new_width < 1 || new_height < 1) {
    throw std::invalid_argument("resize target must be at least 1x1");
  }
  if (new_width == image.width && new_height == image.height) return image;

  const int ch = image.channel_count();
  std::vector<double> src(image.pixels.begin(), image.pixels.end());
  const auto dst = detail::resample(src, image.width, image.height, ch, new_width,
                                    new_height, method);
  ImageRecord out = ImageRecord::blank(image.id, new_width, new_height, image.mode);
  out.source_path = image.source_path;
  for (std::size_t i = 0; i < dst.size(); ++i) out.pixels[i] = detail::to_sample(dst[i]);
  return out;
}

LumaPlane resize(const LumaPlane& plane, int new_width, int new_height, ResizeMethod method) {
  if (new_width < 1 || new_height < 1) {
    throw std::invalid_argument("resize target must be at least 1x1");
  }
  if (plane.empty()) throw EmptyPlane();
  if (new_width == plane.width && new_height == plane.height) return plane;
  LumaPlane out;
  out.width = new_width;
  out.height = new_height;
  out.values = detail::resample(plane.values, plane.width, plane.height, 1, new_width,
                                new_height, method);
  return out;
}

Histogram256 luma_histogram(const LumaPlane& luma) {
  if (luma.empty()) throw EmptyPlane();
  Histogram256 hist;
  hist.lo = 0.0;
  hist.hi = 256.0;  // unit-width bins: bin = floor(value)
  for (double v : luma.values) {
    const int bin = std::clamp(static_cast<int>(std::floor(std::clamp(v, 0.0, 255.0))), 0, 255);
    hist.counts[bin] += 1;
    hist.total += 1;
  }
  return hist;
}

}  // namespace pixelaudit
