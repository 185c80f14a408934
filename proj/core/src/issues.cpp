#include "pixelaudit/issues.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pixelaudit/error.hpp"

namespace pixelaudit {

std::string to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kLight: return "LIGHT";
    case IssueKind::kDark: return "DARK";
    case IssueKind::kBlurry: return "BLURRY";
    case IssueKind::kLowInformation: return "LOW_INFORMATION";
    case IssueKind::kOddSize: return "ODD_SIZE";
    case IssueKind::kOddAspectRatio: return "ODD_ASPECT_RATIO";
    case IssueKind::kGrayscale: return "GRAYSCALE";
    case IssueKind::kExactDuplicate: return "EXACT_DUPLICATE";
    case IssueKind::kNearDuplicate: return "NEAR_DUPLICATE";
  }
  return "?";
}

IssueKind parse_issue_kind(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (IssueKind kind : kAllIssueKinds) {
    if (to_string(kind) == upper) return kind;
  }
  throw ConfigError("unknown issue kind '" + text + "'");
}

bool is_duplicate(IssueKind kind) {
  return kind == IssueKind::kExactDuplicate || kind == IssueKind::kNearDuplicate;
}

bool is_thresholded(IssueKind kind) {
  return kind != IssueKind::kGrayscale && !is_duplicate(kind);
}

void ScoreTable::set_score(const std::string& id, IssueKind kind, double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("score for '" + id + "' outside [0, 1]");
  }
  rows[id][kind] = score;
}

std::optional<double> ScoreTable::score(const std::string& id, IssueKind kind) const {
  const auto row = rows.find(id);
  if (row == rows.end()) return std::nullopt;
  const auto it = row->second.find(kind);
  if (it == row->second.end()) return std::nullopt;
  return it->second;
}

bool ScoreTable::flagged(const std::string& id, IssueKind kind) const {
  const auto it = flags.find(id);
  return it != flags.end() && it->second.contains(kind);
}

std::map<std::string, double> ScoreTable::column(IssueKind kind) const {
  std::map<std::string, double> out;
  for (const auto& [id, row] : rows) {
    if (const auto it = row.find(kind); it != row.end()) out.emplace(id, it->second);
  }
  return out;
}

std::size_t ScoreTable::flag_count(IssueKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      flags.begin(), flags.end(), [kind](const auto& entry) { return entry.second.contains(kind); }));
}

LightScoreMode LightScoreMode::with_rank(int rank) {
  if (std::find(kLightRanks.begin(), kLightRanks.end(), rank) == kLightRanks.end()) {
    throw std::invalid_argument("light percentile rank must be one of 5,25,30,40,50,60,75");
  }
  return LightScoreMode{rank};
}

double score_dark(const BrightnessStats& stats) { return std::clamp(stats.at(99), 0.0, 1.0); }

double score_light(const BrightnessStats& stats, LightScoreMode mode) {
  return std::clamp(1.0 - stats.at(mode.percentile_rank), 0.0, 1.0);
}

double histogram_std(const Histogram256& hist) {
  if (hist.total == 0) return 0.0;
  double mean = 0.0;
  for (int k = 0; k < kBins; ++k) mean += static_cast<double>(k) * static_cast<double>(hist.counts[k]);
  mean /= static_cast<double>(hist.total);
  double var = 0.0;
  for (int k = 0; k < kBins; ++k) {
    const double d = k - mean;
    var += d * d * static_cast<double>(hist.counts[k]);
  }
  return std::sqrt(var / static_cast<double>(hist.total));
}

double score_blurry(const LumaPlane& luma) {
  if (luma.empty()) return 0.0;
  double raw = histogram_std(luma_histogram(luma));
  if (luma.width >= 3 && luma.height >= 3) {
    raw = std::max(raw, std::sqrt(laplacian_variance(luma)));
  }
  return std::clamp(1.0 - std::exp(-raw / 100.0), 0.0, 1.0);
}

double score_low_information(const LumaPlane& luma) {
  const Histogram256 hist = luma_histogram(luma);
  double entropy = 0.0;
  for (std::int64_t c : hist.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(hist.total);
    entropy -= p * std::log2(p);
  }
  return std::clamp(entropy / 8.0, 0.0, 1.0);
}

OddSizeResult score_odd_size(std::span<const ImageSize> dataset, double iqr_factor) {
  if (dataset.empty()) throw EmptyDataset();
  std::vector<double> sizes;
  sizes.reserve(dataset.size());
  for (const auto& item : dataset) {
    sizes.push_back(std::sqrt(static_cast<double>(item.width) * item.height));
  }
  std::vector<double> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());

  OddSizeResult result;
  SizeStats& s = result.stats;
  s.q1 = percentile_sorted(sorted, 25.0);
  s.q3 = percentile_sorted(sorted, 75.0);
  s.iqr_factor = iqr_factor;
  const double iqr = s.q3 - s.q1;
  s.min_threshold = s.q1 - iqr_factor * iqr;
  s.max_threshold = s.q3 + iqr_factor * iqr;
  s.midpoint = (s.min_threshold + s.max_threshold) / 2.0;
  const double half_range = (s.max_threshold - s.min_threshold) / 2.0;

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    double score;
    if (half_range > 0.0) {
      score = std::clamp(1.0 - std::abs(sizes[i] - s.midpoint) / half_range, 0.0, 1.0);
    } else {
      score = sizes[i] == s.midpoint ? 1.0 : 0.0;
    }
    result.scores[dataset[i].id] = score;
  }
  return result;
}

double score_odd_aspect_ratio(int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("dimensions must be positive");
  const double w = width;
  const double h = height;
  return std::min(w / h, h / w);
}

double score_grayscale(const ImageRecord& image) {
  if (image.mode == ColorMode::kLuma) return 0.0;
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const std::uint8_t r = image.pixels[3 * i];
    if (image.pixels[3 * i + 1] != r || image.pixels[3 * i + 2] != r) return 1.0;
  }
  return 0.0;
}

double brightness_mean(const ImageRecord& image) {
  validate(image);
  const int ch = image.channel_count();
  std::vector<double> sums(ch, 0.0);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) sums[i % ch] += image.pixels[i];
  double total = 0.0;
  for (double s : sums) total += s / static_cast<double>(image.pixel_count());
  return total / ch / 255.0;
}

}  // namespace pixelaudit
