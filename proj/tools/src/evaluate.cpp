#include "pixelaudit/app/evaluate.hpp"

#include <algorithm>

#include "pixelaudit/error.hpp"

namespace pixelaudit::app {

DetectionCounts make_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  DetectionCounts c;
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  c.precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
  c.recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
  c.f1 = c.precision + c.recall > 0 ? 2 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
  return c;
}

DetectionCounts compare_sets(const std::set<std::string>& predicted,
                             const std::set<std::string>& positives) {
  std::size_t tp = 0;
  for (const auto& id : predicted) tp += positives.count(id);
  return make_counts(tp, predicted.size() - tp, positives.size() - tp);
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json j;
  j["kinds"] = nlohmann::json::object();
  for (const auto& k : kinds) {
    j["kinds"][to_string(k.kind)] = {{"tp", k.counts.tp},
                                     {"fp", k.counts.fp},
                                     {"fn", k.counts.fn},
                                     {"precision", k.counts.precision},
                                     {"recall", k.counts.recall},
                                     {"f1", k.counts.f1}};
  }
  j["macro_f1"] = macro_f1;
  return j;
}

std::set<IssueKind> kinds_for_label(const std::string& token) {
  const auto paren = token.find('(');
  const std::string name = token.substr(0, paren);
  const std::string args =
      paren == std::string::npos ? "" : token.substr(paren + 1, token.rfind(')') - paren - 1);
  if (name == "BRIGHTNESS") {
    double scalar = 1.0;
    try {
      scalar = std::stod(args);
    } catch (const std::exception&) {
      throw ConfigError("label '" + token + "': bad brightness scalar");
    }
    if (scalar > 1.0) return {IssueKind::kLight};
    if (scalar < 1.0) return {IssueKind::kDark};
    return {};
  }
  if (name == "BLUR") return {IssueKind::kBlurry};
  if (name == "LOW_INFO") return {IssueKind::kLowInformation};
  if (name == "DOWNSCALE" || name == "ODD_SIZE_ROUNDTRIP") return {IssueKind::kOddSize};
  if (name == "GRAYSCALE") return {IssueKind::kGrayscale};
  if (name == "NEAR_DUPLICATE") return {IssueKind::kNearDuplicate};
  if (name == "EXACT_DUPLICATE") return {IssueKind::kNearDuplicate, IssueKind::kExactDuplicate};
  throw ConfigError("unknown label token '" + token + "'");
}

std::set<std::string> label_positives(IssueKind kind, const LabelTable& labels) {
  std::set<std::string> out;
  for (const auto& [id, tokens] : labels.labels) {
    for (const auto& t : tokens) {
      if (!kinds_for_label(t).count(kind)) continue;
      out.insert(id);
      if (is_duplicate(kind)) {
        auto src = labels.duplicate_of.find(id);
        if (src != labels.duplicate_of.end()) out.insert(src->second);
      }
    }
  }
  return out;
}

EvaluationReport evaluate(const ReportTable& report, const LabelTable& labels) {
  std::set<std::string> report_ids(report.ids.begin(), report.ids.end());
  std::set<std::string> label_ids;
  for (const auto& [id, tokens] : labels.labels) label_ids.insert(id);
  if (report_ids != label_ids) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(report_ids.begin(), report_ids.end(), label_ids.begin(),
                                  label_ids.end(), std::back_inserter(diff));
    std::string msg = "report and labels cover different ids:";
    for (std::size_t i = 0; i < diff.size() && i < 20; ++i) msg += " " + diff[i];
    if (diff.size() > 20) msg += " ... (" + std::to_string(diff.size()) + " total)";
    throw IdMismatch(msg);
  }

  EvaluationReport out;
  for (IssueKind kind : report.kinds) {
    const auto positives = label_positives(kind, labels);
    if (positives.empty()) continue;
    auto flagged = report.flags.find(kind);
    const std::set<std::string> predicted =
        flagged == report.flags.end() ? std::set<std::string>{} : flagged->second;
    out.kinds.push_back({kind, compare_sets(predicted, positives)});
  }
  if (!out.kinds.empty()) {
    double sum = 0.0;
    for (const auto& k : out.kinds) sum += k.counts.f1;
    out.macro_f1 = sum / static_cast<double>(out.kinds.size());
  }
  return out;
}

}  // namespace pixelaudit::app
