#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pixelaudit/image.hpp"
#include "pixelaudit/imaging.hpp"

namespace pixelaudit {

enum class IssueKind {
  kLight,
  kDark,
  kBlurry,
  kLowInformation,
  kOddSize,
  kOddAspectRatio,
  kGrayscale,
  kExactDuplicate,
  kNearDuplicate,
};

inline constexpr std::array<IssueKind, 9> kAllIssueKinds = {
    IssueKind::kLight,          IssueKind::kDark,           IssueKind::kBlurry,
    IssueKind::kLowInformation, IssueKind::kOddSize,        IssueKind::kOddAspectRatio,
    IssueKind::kGrayscale,      IssueKind::kExactDuplicate, IssueKind::kNearDuplicate,
};

std::string to_string(IssueKind kind);
IssueKind parse_issue_kind(const std::string& text);

// Thresholded kinds are flagged when score < threshold; the rest are flagged
// whenever their score differs from 1.
bool is_thresholded(IssueKind kind);
bool is_duplicate(IssueKind kind);

// Per-image scores in [0, 1]; lower means more likely problematic.
struct ScoreTable {
  std::map<std::string, std::map<IssueKind, double>> rows;
  std::map<std::string, std::set<IssueKind>> flags;

  void set_score(const std::string& id, IssueKind kind, double score);
  std::optional<double> score(const std::string& id, IssueKind kind) const;
  bool flagged(const std::string& id, IssueKind kind) const;
  // Scores for one kind in id order.
  std::map<std::string, double> column(IssueKind kind) const;
  std::size_t flag_count(IssueKind kind) const;
};

inline constexpr std::array<int, 13> kBrightnessRanks = {1, 5, 10, 15, 25, 30, 40,
                                                         50, 60, 75, 90, 95, 99};
inline constexpr std::array<int, 7> kLightRanks = {5, 25, 30, 40, 50, 60, 75};

struct LightScoreMode {
  int percentile_rank = 75;

  // Throws std::invalid_argument for ranks outside kLightRanks.
  static LightScoreMode with_rank(int rank);
};

double score_dark(const BrightnessStats& stats);
double score_light(const BrightnessStats& stats, LightScoreMode mode = {});

// Count-weighted standard deviation of bin index over the luma histogram.
double histogram_std(const Histogram256& hist);
double score_blurry(const LumaPlane& luma);
double score_low_information(const LumaPlane& luma);

struct SizeStats {
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr_factor = 3.0;
  double min_threshold = 0.0;
  double max_threshold = 0.0;
  double midpoint = 0.0;
};

struct ImageSize {
  std::string id;
  int width = 0;
  int height = 0;
};

struct OddSizeResult {
  std::map<std::string, double> scores;
  SizeStats stats;
};

OddSizeResult score_odd_size(std::span<const ImageSize> dataset, double iqr_factor = 3.0);
double score_odd_aspect_ratio(int width, int height);
double score_grayscale(const ImageRecord& image);

// Average of per-channel means, normalized to [0, 1].
double brightness_mean(const ImageRecord& image);

}  // namespace pixelaudit
