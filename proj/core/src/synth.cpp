#include "pixelaudit/synth.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <numbers>

#include "detail/resample.hpp"
#include "pixelaudit/random.hpp"

namespace pixelaudit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Content is rendered at this multiple of the output size and box-averaged
// down, which gives anti-aliased edges and energy up to Nyquist.
constexpr int kSupersample = 2;

void normalize(std::vector<double>& field) {
  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(field.size());
  double var = 0.0;
  for (double v : field) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(field.size()));
  for (double& v : field) v = sd > 0 ? (v - mean) / sd : 0.0;
}

std::vector<double> box_down(const std::vector<double>& src, int size, int factor) {
  const int big = size * factor;
  std::vector<double> out(static_cast<std::size_t>(size) * size, 0.0);
  for (int y = 0; y < big; ++y) {
    for (int x = 0; x < big; ++x) {
      out[static_cast<std::size_t>(y / factor) * size + x / factor] +=
          src[static_cast<std::size_t>(y) * big + x];
    }
  }
  for (double& v : out) v /= factor * factor;
  return out;
}

// Sum of random gratings with amplitude ~ 1/f^slope, normalized to zero mean
// and unit standard deviation. Frequencies are in cycles per image; each
// grating is evaluated separably as cos(ax)cos(by+p) - sin(ax)sin(by+p).
std::vector<double> grating_field(Rng& rng, int size, int components, double f_lo, double f_hi,
                                  double slope) {
  std::vector<double> field(static_cast<std::size_t>(size) * size, 0.0);
  std::vector<double> cx(size), sx(size), cy(size), sy(size);
  for (int k = 0; k < components; ++k) {
    const double f = f_lo * std::pow(f_hi / f_lo, rng.uniform());
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double phase = rng.uniform(0.0, kTwoPi);
    const double amp = rng.uniform(0.5, 1.5) / std::pow(f, slope);
    const double u = kTwoPi * f * std::cos(theta) / size, v = kTwoPi * f * std::sin(theta) / size;
    for (int i = 0; i < size; ++i) {
      cx[i] = std::cos(u * i);
      sx[i] = std::sin(u * i);
      cy[i] = std::cos(v * i + phase);
      sy[i] = std::sin(v * i + phase);
    }
    for (int y = 0; y < size; ++y) {
      double* row = &field[static_cast<std::size_t>(y) * size];
      for (int x = 0; x < size; ++x) row[x] += amp * (cx[x] * cy[y] - sx[x] * sy[y]);
    }
  }
  normalize(field);
  return field;
}

struct Leaf {
  double cx, cy, r;
  double luma, chroma1, chroma2;
};

}  // namespace

ImageRecord synthesize_image(const std::string& id, std::uint64_t seed, int size) {
  Rng rng(seed);
  const int big = size * kSupersample;
  const std::size_t n = static_cast<std::size_t>(big) * big;

  // Dead-leaves occlusion: discs with radius density ~ r^-3, painted back to
  // front, each carrying a little grating texture.
  const double texture_weight = rng.uniform(0.05, 0.5);
  const auto texture = grating_field(rng, big, 32, 0.5, size * 0.6, rng.uniform(0.8, 1.2));
  const auto chroma_bg1 = grating_field(rng, big, 6, 0.5, 3.0, 1.0);
  const auto chroma_bg2 = grating_field(rng, big, 6, 0.5, 3.0, 1.0);
  std::vector<double> luma(n), chroma1(chroma_bg1), chroma2(chroma_bg2);
  const double background = rng.normal();
  for (std::size_t i = 0; i < n; ++i) luma[i] = background + texture_weight * texture[i];

  const double r_min = 1.5 * std::pow(8.0, rng.uniform()), r_max = 0.45 * big;
  const double leaf_contrast = rng.uniform(0.6, 1.4);
  const std::size_t leaves = 20 + rng.below(220);
  for (std::size_t k = 0; k < leaves; ++k) {
    Leaf leaf;
    leaf.cx = rng.uniform(0.0, big);
    leaf.cy = rng.uniform(0.0, big);
    const double q = 1.0 - (r_min * r_min) / (r_max * r_max);
    leaf.r = r_min / std::sqrt(1.0 - rng.uniform() * q);
    leaf.luma = leaf_contrast * rng.normal();
    leaf.chroma1 = rng.normal();
    leaf.chroma2 = rng.normal();
    const int x0 = std::max(0, static_cast<int>(leaf.cx - leaf.r));
    const int x1 = std::min(big - 1, static_cast<int>(leaf.cx + leaf.r));
    const int y0 = std::max(0, static_cast<int>(leaf.cy - leaf.r));
    const int y1 = std::min(big - 1, static_cast<int>(leaf.cy + leaf.r));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - leaf.cx, dy = y + 0.5 - leaf.cy;
        if (dx * dx + dy * dy > leaf.r * leaf.r) continue;
        const std::size_t i = static_cast<std::size_t>(y) * big + x;
        luma[i] = leaf.luma + texture_weight * texture[i];
        chroma1[i] = 0.5 * chroma_bg1[i] + leaf.chroma1;
        chroma2[i] = 0.5 * chroma_bg2[i] + leaf.chroma2;
      }
    }
  }
  luma = box_down(luma, size, kSupersample);
  chroma1 = box_down(chroma1, size, kSupersample);
  chroma2 = box_down(chroma2, size, kSupersample);
  normalize(luma);

  const double level = rng.uniform(85.0, 175.0);
  const double contrast = rng.uniform(18.0, 55.0);
  const double chroma_amp = rng.uniform(6.0, 25.0);
  const double tint1 = rng.uniform(-20.0, 20.0), tint2 = rng.uniform(-20.0, 20.0);
  const double noise = rng.uniform(0.5, 4.0);

  ImageRecord img = ImageRecord::blank(id, size, size, ColorMode::kRgb);
  for (std::size_t i = 0; i < luma.size(); ++i) {
    const double l = level + contrast * luma[i];
    const double c1 = tint1 + chroma_amp * chroma1[i];
    const double c2 = tint2 + chroma_amp * chroma2[i];
    const double rgb[3] = {l + 0.9 * c1, l - 0.45 * c1 - 0.2 * c2, l + c2};
    for (int c = 0; c < 3; ++c) img.pixels[3 * i + c] = detail::to_sample(rgb[c] + noise * rng.normal());
  }
  return img;
}

std::vector<ImageRecord> synthesize_dataset(std::size_t count, std::uint64_t seed, int size) {
  std::vector<ImageRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%05zu.png", i);
    out.push_back(synthesize_image(name, mix_seed(seed, i), size));
  }
  return out;
}

}  // namespace pixelaudit
