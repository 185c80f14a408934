#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pixelaudit/image.hpp"

namespace pixelaudit {

enum class PerturbationKind {
  kBrightness,
  kBlur,
  kDownscale,
  kOddSizeRoundtrip,
  kLowInfo,
  kGrayscale,
  kExactDuplicate,
  kNearDuplicate,
};

enum class BlurFilter { kAverage, kGaussian, kMedian };

std::string to_string(PerturbationKind kind);
std::string to_string(BlurFilter filter);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kBrightness;
  double scalar = 1.0;                           // BRIGHTNESS
  BlurFilter filter = BlurFilter::kAverage;      // BLUR
  int ksize = 3;                                 // BLUR
  int side = 4;                                  // DOWNSCALE, ODD_SIZE_ROUNDTRIP
  double jitter_lo = 0.8, jitter_hi = 1.2;       // NEAR_DUPLICATE
  bool jitter_hue = false;                       // NEAR_DUPLICATE
  double proportion = 0.12;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Ground-truth token written to labels, e.g. "BRIGHTNESS(0.05)".
  std::string label() const;
  bool is_duplicate() const {
    return kind == PerturbationKind::kExactDuplicate || kind == PerturbationKind::kNearDuplicate;
  }

  static PerturbationSpec brightness(double scalar, double proportion, std::uint64_t seed);
  static PerturbationSpec blurring(BlurFilter filter, int ksize, double proportion, std::uint64_t seed);
  static PerturbationSpec downscaling(int side, double proportion, std::uint64_t seed);
  static PerturbationSpec roundtrip(int side, double proportion, std::uint64_t seed);
  static PerturbationSpec low_info(double proportion, std::uint64_t seed);
  static PerturbationSpec grayscale(double proportion, std::uint64_t seed);
  static PerturbationSpec exact_duplicate(double proportion, std::uint64_t seed);
  static PerturbationSpec near_duplicate(double lo, double hi, double proportion, std::uint64_t seed);
};

nlohmann::json to_json(const PerturbationSpec& spec);
// Parses and validates one {kind, params, proportion, seed} object; `where`
// prefixes error messages.
PerturbationSpec spec_from_json(const nlohmann::json& j, const std::string& where = "spec");
// Parses a spec file: either a JSON list or an object with a "specs" list.
std::vector<PerturbationSpec> parse_spec_document(const std::string& text);

struct LabeledDataset {
  std::vector<ImageRecord> images;
  std::map<std::string, std::vector<std::string>> labels;  // id -> label tokens; empty = clean
  std::map<std::string, std::string> duplicate_of;         // replica id -> source id
  std::vector<PerturbationSpec> manifest;
  std::uint64_t selection_seed = 0;
};

// Each sample -> round(clamp(sample * scalar, 0, 255)).
ImageRecord adjust_brightness(const ImageRecord& image, double scalar);
// Reflect-101 borders; throws KernelTooLarge when ksize > min(width, height).
ImageRecord blur(const ImageRecord& image, BlurFilter filter, int ksize);
ImageRecord downscale(const ImageRecord& image, int side);
ImageRecord odd_size_roundtrip(const ImageRecord& image, int side);
// Bilinear thumbnail (12/32 of the short side) centered on a black canvas.
ImageRecord make_low_info(const ImageRecord& image);
// BT.601 luma, rounded, replicated into three channels.
ImageRecord to_grayscale_3ch(const ImageRecord& image);

struct JitterFactors {
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
  double hue = 1.0;  // 1 = no rotation
};

JitterFactors draw_jitter(double lo, double hi, std::uint64_t seed, bool with_hue = false);
// Brightness, then mean-anchored contrast per channel, then saturation about
// BT.601 luma (then optional hue); one clamp-and-round at the end.
ImageRecord apply_jitter(const ImageRecord& image, const JitterFactors& factors);
ImageRecord color_jitter(const ImageRecord& image, double lo, double hi, std::uint64_t seed,
                         bool with_hue = false);

// Degrades floor(proportion * n) distinct images per spec; an image receives
// at most one spec. Duplicate specs overwrite the selected images with
// (jittered) copies of untouched survivors. Deterministic for any worker count.
LabeledDataset apply_contamination(std::vector<ImageRecord> dataset,
                                   std::span<const PerturbationSpec> specs, int workers = 1);

std::size_t contamination_count(double proportion, std::size_t n);

}  // namespace pixelaudit
