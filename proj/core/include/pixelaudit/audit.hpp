#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pixelaudit/dedup.hpp"
#include "pixelaudit/image.hpp"
#include "pixelaudit/issues.hpp"
#include "pixelaudit/threshold.hpp"

namespace pixelaudit {

struct AuditOptions {
  std::set<IssueKind> issues{kAllIssueKinds.begin(), kAllIssueKinds.end()};
  ThresholdMethod default_method = ThresholdMethod::kLi;
  std::map<IssueKind, ThresholdMethod> methods;
  GhtParams ght{100.0, 8.0, 0.0, 0.5};
  int mve_window = 5;
  std::map<IssueKind, double> fixed_thresholds;
  LightScoreMode light{};
  LumaFormula luma_formula = LumaFormula::kHsp;
  double iqr_factor = 3.0;
  int dedup_cutoff = 10;
  // Exact duplicates by MD5 of the file at source_path instead of the pixels.
  bool exact_by_file_bytes = false;
  bool semantic_enabled = false;
  std::string semantic_provider = "downscale";
  double semantic_cutoff = 0.96;
  int workers = 1;

  ThresholdMethod method_for(IssueKind kind) const;
  ThresholdSettings settings_for(IssueKind kind) const;
};

struct KindOutcome {
  std::optional<ThresholdDecision> decision;
  std::string error;  // set when the method could not produce a threshold
};

struct AuditResult {
  std::vector<std::string> ids;  // audited images, sorted
  ScoreTable table;
  std::map<IssueKind, KindOutcome> outcomes;
  DuplicateClusterSet exact_clusters;
  DuplicateClusterSet near_clusters;
  std::optional<SizeStats> size_stats;
  std::vector<std::string> embedding_failures;
  std::vector<std::pair<std::string, std::string>> invalid;  // id, reason
};

// Scores every selected kind, thresholds each column and fills the flags.
// Per-image failures land in `invalid`; a method failure for one kind is
// recorded in its outcome and leaves that kind unflagged. Results do not
// depend on image order or on the worker count.
AuditResult audit_dataset(std::span<const ImageRecord> images, const AuditOptions& options);

// Applies one threshold decision to a score column and records the flags.
void apply_flags(ScoreTable& table, IssueKind kind, const ThresholdDecision& decision);

}  // namespace pixelaudit
