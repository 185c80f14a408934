#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pixelaudit/app/dataset_io.hpp"
#include "pixelaudit/app/report.hpp"
#include "pixelaudit/issues.hpp"

namespace pixelaudit::app {

struct DetectionCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Precision/recall/F1 from counts; each ratio is 0 when its denominator is.
DetectionCounts make_counts(std::size_t tp, std::size_t fp, std::size_t fn);
DetectionCounts compare_sets(const std::set<std::string>& predicted,
                             const std::set<std::string>& positives);

struct KindEvaluation {
  IssueKind kind;
  DetectionCounts counts;
};

struct EvaluationReport {
  std::vector<KindEvaluation> kinds;
  double macro_f1 = 0.0;

  nlohmann::json to_json() const;
};

// Issue kinds a ground-truth token counts toward, e.g. "BRIGHTNESS(0.05)" ->
// DARK, "DOWNSCALE(4)" -> ODD_SIZE, "EXACT_DUPLICATE" -> both duplicate kinds.
std::set<IssueKind> kinds_for_label(const std::string& token);

// Ids whose labels map to `kind`. For duplicate kinds the surviving sources
// of each replica count too, since a detector can only find the pair.
std::set<std::string> label_positives(IssueKind kind, const LabelTable& labels);

// Evaluates each report kind that has at least one positive label. Throws
// IdMismatch when the two id sets differ.
EvaluationReport evaluate(const ReportTable& report, const LabelTable& labels);

}  // namespace pixelaudit::app
