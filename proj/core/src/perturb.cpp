#include "pixelaudit/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "detail/parallel.hpp"
#include "detail/resample.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"
#include "pixelaudit/random.hpp"

namespace pixelaudit {

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> as_doubles(const ImageRecord& image) {
  return {image.pixels.begin(), image.pixels.end()};
}

ImageRecord with_samples(const ImageRecord& like, const std::vector<double>& samples) {
  ImageRecord out = like;
  for (std::size_t i = 0; i < samples.size(); ++i) out.pixels[i] = detail::to_sample(samples[i]);
  return out;
}

// One separable pass along x (horizontal = true) or y with reflect-101 borders.
std::vector<double> convolve_axis(const std::vector<double>& src, int w, int h, int ch,
                                  const std::vector<double>& kernel, bool horizontal) {
  const int r = static_cast<int>(kernel.size()) / 2;
  std::vector<double> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) {
          const int sx = horizontal ? detail::reflect101(x + k, w) : x;
          const int sy = horizontal ? y : detail::reflect101(y + k, h);
          acc += kernel[k + r] * src[(static_cast<std::size_t>(sy) * w + sx) * ch + c];
        }
        out[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  return out;
}

std::vector<double> blur_kernel(BlurFilter filter, int ksize) {
  std::vector<double> k(ksize);
  if (filter == BlurFilter::kAverage) {
    std::fill(k.begin(), k.end(), 1.0 / ksize);
    return k;
  }
  const double sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8;
  const int r = ksize / 2;
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    k[i] = std::exp(-double((i - r) * (i - r)) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

ImageRecord median_blur(const ImageRecord& image, int ksize) {
  const int ch = image.channel_count();
  const int r = ksize / 2;
  ImageRecord out = image;
  std::vector<std::uint8_t> window(static_cast<std::size_t>(ksize) * ksize);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < ch; ++c) {
        std::size_t n = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            window[n++] = image.at(detail::reflect101(x + dx, image.width),
                                   detail::reflect101(y + dy, image.height), c);
          }
        }
        auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
        std::nth_element(window.begin(), mid, window.end());
        out.at(x, y, c) = *mid;
      }
    }
  }
  return out;
}

double bt601(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

PerturbationKind parse_kind(const std::string& text, const std::string& where) {
  static const std::pair<const char*, PerturbationKind> kNames[] = {
      {"BRIGHTNESS", PerturbationKind::kBrightness},
      {"BLUR", PerturbationKind::kBlur},
      {"DOWNSCALE", PerturbationKind::kDownscale},
      {"ODD_SIZE_ROUNDTRIP", PerturbationKind::kOddSizeRoundtrip},
      {"LOW_INFO", PerturbationKind::kLowInfo},
      {"GRAYSCALE", PerturbationKind::kGrayscale},
      {"EXACT_DUPLICATE", PerturbationKind::kExactDuplicate},
      {"NEAR_DUPLICATE", PerturbationKind::kNearDuplicate},
  };
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& [name, kind] : kNames) {
    if (upper == name) return kind;
  }
  throw ConfigError(where + ".kind: unknown perturbation '" + text + "'");
}

BlurFilter parse_filter(const std::string& text, const std::string& where) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "AVERAGE" || upper == "BOX") return BlurFilter::kAverage;
  if (upper == "GAUSSIAN") return BlurFilter::kGaussian;
  if (upper == "MEDIAN") return BlurFilter::kMedian;
  throw ConfigError(where + ".params.filter: unknown blur filter '" + text + "'");
}

template <typename T>
T field(const nlohmann::json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

}  // namespace

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kBrightness: return "BRIGHTNESS";
    case PerturbationKind::kBlur: return "BLUR";
    case PerturbationKind::kDownscale: return "DOWNSCALE";
    case PerturbationKind::kOddSizeRoundtrip: return "ODD_SIZE_ROUNDTRIP";
    case PerturbationKind::kLowInfo: return "LOW_INFO";
    case PerturbationKind::kGrayscale: return "GRAYSCALE";
    case PerturbationKind::kExactDuplicate: return "EXACT_DUPLICATE";
    case PerturbationKind::kNearDuplicate: return "NEAR_DUPLICATE";
  }
  return "?";
}

std::string to_string(BlurFilter filter) {
  switch (filter) {
    case BlurFilter::kAverage: return "AVERAGE";
    case BlurFilter::kGaussian: return "GAUSSIAN";
    case BlurFilter::kMedian: return "MEDIAN";
  }
  return "?";
}

void PerturbationSpec::validate() const {
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    throw ConfigError("proportion: " + format_real(proportion) + " is outside (0, 1]");
  }
  switch (kind) {
    case PerturbationKind::kBrightness:
      if (!(scalar >= 0.05 && scalar <= 3.5)) {
        throw ConfigError("params.scalar: " + format_real(scalar) + " is outside [0.05, 3.5]");
      }
      break;
    case PerturbationKind::kBlur:
      if (ksize < 3 || ksize > 11 || ksize % 2 == 0) {
        throw ConfigError("params.ksize: " + std::to_string(ksize) + " is not one of 3,5,7,9,11");
      }
      break;
    case PerturbationKind::kDownscale:
      if (side < 4) throw ConfigError("params.side: must be at least 4");
      break;
    case PerturbationKind::kOddSizeRoundtrip:
      if (side < 1) throw ConfigError("params.side: must be positive");
      break;
    case PerturbationKind::kNearDuplicate:
      if (!(jitter_lo > 0.0 && jitter_lo <= jitter_hi)) {
        throw ConfigError("params.jitter: need 0 < lo <= hi");
      }
      break;
    default:
      break;
  }
}

std::string PerturbationSpec::label() const {
  switch (kind) {
    case PerturbationKind::kBrightness: return "BRIGHTNESS(" + format_real(scalar) + ")";
    case PerturbationKind::kBlur:
      return "BLUR(" + to_string(filter) + "," + std::to_string(ksize) + ")";
    case PerturbationKind::kDownscale: return "DOWNSCALE(" + std::to_string(side) + ")";
    case PerturbationKind::kOddSizeRoundtrip:
      return "ODD_SIZE_ROUNDTRIP(" + std::to_string(side) + ")";
    case PerturbationKind::kNearDuplicate:
      return "NEAR_DUPLICATE(" + format_real(jitter_lo) + "," + format_real(jitter_hi) + ")";
    default: return to_string(kind);
  }
}

PerturbationSpec PerturbationSpec::brightness(double scalar, double proportion, std::uint64_t seed) {
  PerturbationSpec s;
  s.kind = PerturbationKind::kBrightness;
  s.scalar = scalar;
  s.proportion = proportion;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::blurring(BlurFilter filter, int ksize, double proportion,
                                            std::uint64_t seed) {
  PerturbationSpec s;
  s.kind = PerturbationKind::kBlur;
  s.filter = filter;
  s.ksize = ksize;
  s.proportion = proportion;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::downscaling(int side, double proportion, std::uint64_t seed) {
  PerturbationSpec s;
  s.kind = PerturbationKind::kDownscale;
  s.side = side;
  s.proportion = proportion;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::roundtrip(int side, double proportion, std::uint64_t seed) {
  PerturbationSpec s = downscaling(side, proportion, seed);
  s.kind = PerturbationKind::kOddSizeRoundtrip;
  return s;
}

PerturbationSpec PerturbationSpec::low_info(double proportion, std::uint64_t seed) {
  PerturbationSpec s;
  s.kind = PerturbationKind::kLowInfo;
  s.proportion = proportion;
  s.seed = seed;
  return s;
}

PerturbationSpec PerturbationSpec::grayscale(double proportion, std::uint64_t seed) {
  PerturbationSpec s = low_info(proportion, seed);
  s.kind = PerturbationKind::kGrayscale;
  return s;
}

PerturbationSpec PerturbationSpec::exact_duplicate(double proportion, std::uint64_t seed) {
  PerturbationSpec s = low_info(proportion, seed);
  s.kind = PerturbationKind::kExactDuplicate;
  return s;
}

PerturbationSpec PerturbationSpec::near_duplicate(double lo, double hi, double proportion,
                                                  std::uint64_t seed) {
  PerturbationSpec s = low_info(proportion, seed);
  s.kind = PerturbationKind::kNearDuplicate;
  s.jitter_lo = lo;
  s.jitter_hi = hi;
  return s;
}

nlohmann::json to_json(const PerturbationSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  switch (spec.kind) {
    case PerturbationKind::kBrightness: params["scalar"] = spec.scalar; break;
    case PerturbationKind::kBlur:
      params["filter"] = to_string(spec.filter);
      params["ksize"] = spec.ksize;
      break;
    case PerturbationKind::kDownscale:
    case PerturbationKind::kOddSizeRoundtrip: params["side"] = spec.side; break;
    case PerturbationKind::kNearDuplicate:
      params["jitter_lo"] = spec.jitter_lo;
      params["jitter_hi"] = spec.jitter_hi;
      if (spec.jitter_hue) params["hue"] = true;
      break;
    default: break;
  }
  return {{"kind", to_string(spec.kind)},
          {"params", params},
          {"proportion", spec.proportion},
          {"seed", spec.seed}};
}

PerturbationSpec spec_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError(where + ".kind: missing or not a string");
  }
  PerturbationSpec s;
  s.kind = parse_kind(j.at("kind").get<std::string>(), where);
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (!params.is_object()) throw ConfigError(where + ".params: expected an object");
  const std::string pw = where + ".params";
  s.scalar = field<double>(params, "scalar", pw, s.scalar);
  if (params.contains("filter")) {
    s.filter = parse_filter(field<std::string>(params, "filter", pw, ""), where);
  }
  s.ksize = field<int>(params, "ksize", pw, s.ksize);
  s.side = field<int>(params, "side", pw, s.side);
  s.jitter_lo = field<double>(params, "jitter_lo", pw, s.jitter_lo);
  s.jitter_hi = field<double>(params, "jitter_hi", pw, s.jitter_hi);
  s.jitter_hue = field<bool>(params, "hue", pw, s.jitter_hue);
  if (!j.contains("proportion")) throw ConfigError(where + ".proportion: missing");
  s.proportion = field<double>(j, "proportion", where, s.proportion);
  s.seed = field<std::uint64_t>(j, "seed", where, 0);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + "." + e.what());
  }
  return s;
}

std::vector<PerturbationSpec> parse_spec_document(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("spec file: ") + e.what());
  }
  if (doc.is_object() && doc.contains("specs")) doc = doc.at("specs");
  if (!doc.is_array()) throw ConfigError("spec file: expected a list of specs");
  std::vector<PerturbationSpec> specs;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    specs.push_back(spec_from_json(doc[i], "specs[" + std::to_string(i) + "]"));
  }
  return specs;
}

ImageRecord adjust_brightness(const ImageRecord& image, double scalar) {
  ImageRecord out = image;
  for (auto& p : out.pixels) p = detail::to_sample(p * scalar);
  return out;
}

ImageRecord blur(const ImageRecord& image, BlurFilter filter, int ksize) {
  if (ksize > std::min(image.width, image.height)) {
    throw KernelTooLarge(ksize, image.width, image.height);
  }
  if (ksize <= 1) return image;
  if (filter == BlurFilter::kMedian) return median_blur(image, ksize);
  const auto kernel = blur_kernel(filter, ksize);
  const int ch = image.channel_count();
  auto pass = convolve_axis(as_doubles(image), image.width, image.height, ch, kernel, true);
  pass = convolve_axis(pass, image.width, image.height, ch, kernel, false);
  return with_samples(image, pass);
}

ImageRecord downscale(const ImageRecord& image, int side) {
  if (side < 4) throw ConfigError("downscale side must be at least 4");
  return resize(image, side, side, ResizeMethod::kBilinear);
}

ImageRecord odd_size_roundtrip(const ImageRecord& image, int side) {
  if (side < 1) throw ConfigError("roundtrip side must be positive");
  // Intermediate kept unrounded so a constant image survives exactly.
  const int ch = image.channel_count();
  auto small = detail::resample(as_doubles(image), image.width, image.height, ch, side, side,
                                ResizeMethod::kBilinear);
  auto back = detail::resample(small, side, side, ch, image.width, image.height,
                               ResizeMethod::kBilinear);
  return with_samples(image, back);
}

ImageRecord make_low_info(const ImageRecord& image) {
  const int side =
      std::max(1, static_cast<int>(std::lround(12.0 / 32.0 * std::min(image.width, image.height))));
  const ImageRecord thumb = resize(image, side, side, ResizeMethod::kBilinear);
  ImageRecord out = ImageRecord::blank(image.id, image.width, image.height, image.mode, 0);
  out.source_path = image.source_path;
  const int ox = (image.width - side) / 2;
  const int oy = (image.height - side) / 2;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      for (int c = 0; c < image.channel_count(); ++c) out.at(ox + x, oy + y, c) = thumb.at(x, y, c);
    }
  }
  return out;
}

ImageRecord to_grayscale_3ch(const ImageRecord& image) {
  ImageRecord out = image;
  if (image.mode == ColorMode::kLuma) {
    out.mode = ColorMode::kRgb;
    out.pixels.resize(image.pixel_count() * 3);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
      out.pixels[3 * i] = out.pixels[3 * i + 1] = out.pixels[3 * i + 2] = image.pixels[i];
    }
    return out;
  }
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    auto* p = &out.pixels[3 * i];
    const auto y = detail::to_sample(bt601(p[0], p[1], p[2]));
    p[0] = p[1] = p[2] = y;
  }
  return out;
}

JitterFactors draw_jitter(double lo, double hi, std::uint64_t seed, bool with_hue) {
  Rng rng(seed);
  JitterFactors f;
  f.brightness = rng.uniform(lo, hi);
  f.contrast = rng.uniform(lo, hi);
  f.saturation = rng.uniform(lo, hi);
  if (with_hue) f.hue = rng.uniform(lo, hi);
  return f;
}

ImageRecord apply_jitter(const ImageRecord& image, const JitterFactors& factors) {
  const int ch = image.channel_count();
  const std::size_t n = image.pixel_count();
  std::vector<double> v(image.pixels.begin(), image.pixels.end());
  for (auto& s : v) s *= factors.brightness;

  for (int c = 0; c < ch; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += v[i * ch + c];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i * ch + c] = mean + (v[i * ch + c] - mean) * factors.contrast;
    }
  }

  if (ch == 3) {
    for (std::size_t i = 0; i < n; ++i) {
      double* p = &v[3 * i];
      const double y = bt601(p[0], p[1], p[2]);
      for (int c = 0; c < 3; ++c) p[c] = y + (p[c] - y) * factors.saturation;
    }
    if (factors.hue != 1.0) {
      // Rotate chroma in YIQ; factor 1 +- 0.5 spans a half turn either way.
      const double angle = (factors.hue - 1.0) * std::numbers::pi;
      const double cs = std::cos(angle), sn = std::sin(angle);
      for (std::size_t i = 0; i < n; ++i) {
        double* p = &v[3 * i];
        const double y = bt601(p[0], p[1], p[2]);
        const double ci = 0.596 * p[0] - 0.274 * p[1] - 0.322 * p[2];
        const double cq = 0.211 * p[0] - 0.523 * p[1] + 0.312 * p[2];
        const double ri = ci * cs - cq * sn;
        const double rq = ci * sn + cq * cs;
        p[0] = y + 0.956 * ri + 0.621 * rq;
        p[1] = y - 0.272 * ri - 0.647 * rq;
        p[2] = y - 1.106 * ri + 1.703 * rq;
      }
    }
  }
  return with_samples(image, v);
}

ImageRecord color_jitter(const ImageRecord& image, double lo, double hi, std::uint64_t seed,
                         bool with_hue) {
  return apply_jitter(image, draw_jitter(lo, hi, seed, with_hue));
}

std::size_t contamination_count(double proportion, std::size_t n) {
  // The epsilon keeps 0.12 * 1000 from flooring to 119.
  return static_cast<std::size_t>(std::floor(proportion * static_cast<double>(n) + 1e-9));
}

LabeledDataset apply_contamination(std::vector<ImageRecord> dataset,
                                   std::span<const PerturbationSpec> specs, int workers) {
  const std::size_t n = dataset.size();
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  bool any_duplicate = false;
  std::uint64_t selection_seed = 0x5eed;
  for (const auto& spec : specs) {
    spec.validate();
    counts.push_back(contamination_count(spec.proportion, n));
    total += counts.back();
    any_duplicate = any_duplicate || spec.is_duplicate();
    selection_seed = mix_seed(selection_seed, spec.seed);
  }
  if (total > n) {
    throw ProportionOverflow("specs select " + std::to_string(total) + " images from a dataset of " +
                             std::to_string(n));
  }
  if (any_duplicate && total == n && total > 0) {
    throw ProportionOverflow("duplicate specs need at least one untouched survivor");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(selection_seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  // assignment[i] = spec index for image i, or -1.
  std::vector<int> assignment(n, -1);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t k = 0; k < counts[s]; ++k) assignment[order[offset + k]] = static_cast<int>(s);
    offset += counts[s];
  }
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] < 0) survivors.push_back(i);
  }

  // Duplicate sources are drawn sequentially, in image order, on the selection stream.
  std::vector<std::size_t> source(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] >= 0 && specs[assignment[i]].is_duplicate()) {
      source[i] = survivors[rng.below(survivors.size())];
    }
  }

  const std::vector<ImageRecord> originals = dataset;
  detail::parallel_for(n, workers, [&](std::size_t i) {
    if (assignment[i] < 0) return;
    const PerturbationSpec& spec = specs[assignment[i]];
    const ImageRecord& src = originals[i];
    ImageRecord out;
    switch (spec.kind) {
      case PerturbationKind::kBrightness: out = adjust_brightness(src, spec.scalar); break;
      case PerturbationKind::kBlur: out = blur(src, spec.filter, spec.ksize); break;
      case PerturbationKind::kDownscale: out = downscale(src, spec.side); break;
      case PerturbationKind::kOddSizeRoundtrip: out = odd_size_roundtrip(src, spec.side); break;
      case PerturbationKind::kLowInfo: out = make_low_info(src); break;
      case PerturbationKind::kGrayscale: out = to_grayscale_3ch(src); break;
      case PerturbationKind::kExactDuplicate: out = originals[source[i]]; break;
      case PerturbationKind::kNearDuplicate:
        out = color_jitter(originals[source[i]], spec.jitter_lo, spec.jitter_hi,
                           mix_seed(spec.seed, i), spec.jitter_hue);
        break;
    }
    out.id = src.id;
    out.source_path = src.source_path;
    dataset[i] = std::move(out);
  });

  LabeledDataset result;
  result.manifest.assign(specs.begin(), specs.end());
  result.selection_seed = selection_seed;
  for (std::size_t i = 0; i < n; ++i) {
    auto& tokens = result.labels[dataset[i].id];
    if (assignment[i] < 0) continue;
    const PerturbationSpec& spec = specs[assignment[i]];
    tokens.push_back(spec.label());
    if (spec.is_duplicate()) result.duplicate_of[dataset[i].id] = originals[source[i]].id;
  }
  result.images = std::move(dataset);
  return result;
}

}  // namespace pixelaudit
