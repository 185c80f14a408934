#include "pixelaudit/app/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "pixelaudit/app/csv.hpp"
#include "pixelaudit/app/dataset_io.hpp"
#include "pixelaudit/app/evaluate.hpp"
#include "pixelaudit/audit.hpp"
#include "pixelaudit/dedup.hpp"
#include "pixelaudit/embedding.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/random.hpp"

namespace pixelaudit::app {

namespace {

LabelTable label_table(const LabeledDataset& data) { return {data.labels, data.duplicate_of}; }

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Scores the requested kinds once; thresholds are applied per method later.
AuditResult score_only(const std::vector<ImageRecord>& images, std::set<IssueKind> kinds,
                       const BenchOptions& options) {
  AuditOptions audit;
  audit.issues = std::move(kinds);
  audit.default_method = ThresholdMethod::kFixed;
  audit.workers = options.workers;
  audit.dedup_cutoff = options.dedup_cutoff;
  return audit_dataset(images, audit);
}

struct MethodOutcome {
  std::optional<ThresholdDecision> decision;
  std::set<std::string> flagged;
};

MethodOutcome threshold_column(const AuditResult& scored, IssueKind kind, ThresholdMethod method,
                               const BenchOptions& options) {
  const auto column = scored.table.column(kind);
  std::vector<double> scores;
  for (const auto& [id, s] : column) scores.push_back(s);
  ThresholdSettings settings;
  settings.method = method;
  settings.ght = options.ght;
  settings.mve_window = options.mve_window;
  MethodOutcome out;
  try {
    out.decision = select_threshold(scores, kind, settings);
  } catch (const ZeroVarianceClass&) {
    return out;
  }
  out.flagged = flag_by_threshold(column, *out.decision);
  return out;
}

std::size_t distinct_scores(const AuditResult& scored, IssueKind kind) {
  std::set<double> values;
  for (const auto& [id, s] : scored.table.column(kind)) values.insert(s);
  return values.size();
}

std::vector<std::string> column_notes(const AuditResult& scored, IssueKind kind) {
  std::vector<std::string> notes;
  const std::size_t distinct = distinct_scores(scored, kind);
  if (distinct <= 2) {
    notes.push_back(to_string(kind) + " scores take only " + std::to_string(distinct) +
                    " distinct value(s)");
  }
  return notes;
}

BenchTable method_table(const std::string& name, const std::vector<std::string>& columns) {
  BenchTable table;
  table.name = name;
  table.columns = columns;
  for (ThresholdMethod m : kAllMethods) table.rows.push_back(method_row_label(m));
  table.cells.assign(kAllMethods.size(), std::vector<BenchCell>(columns.size()));
  return table;
}

}  // namespace

BenchSuite parse_suite(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "single") return BenchSuite::kSingle;
  if (lower == "dual") return BenchSuite::kDual;
  if (lower == "neardup") return BenchSuite::kNearDup;
  throw ConfigError("--suite: expected single, dual or neardup, got '" + text + "'");
}

std::string to_string(BenchSuite suite) {
  switch (suite) {
    case BenchSuite::kSingle: return "single";
    case BenchSuite::kDual: return "dual";
    case BenchSuite::kNearDup: return "neardup";
  }
  return "?";
}

std::string method_row_label(ThresholdMethod method) {
  switch (method) {
    case ThresholdMethod::kFixed: return "Original";
    case ThresholdMethod::kOtsu: return "Otsu";
    case ThresholdMethod::kMet: return "MET";
    case ThresholdMethod::kLi: return "Li";
    case ThresholdMethod::kMaxEntropy: return "Max Entropy";
    case ThresholdMethod::kGht: return "GHT";
    case ThresholdMethod::kMve: return "MVE";
    case ThresholdMethod::kGmm: return "GMM";
  }
  return "?";
}

std::vector<BenchPerturbation> single_suite_perturbations(const BenchOptions& options) {
  const double p = options.proportion;
  std::vector<BenchPerturbation> out = {
      {IssueKind::kLight, PerturbationSpec::brightness(3.5, p, 0)},
      {IssueKind::kDark, PerturbationSpec::brightness(0.05, p, 0)},
      {IssueKind::kBlurry, PerturbationSpec::blurring(BlurFilter::kAverage, 11, p, 0)},
      {IssueKind::kLowInformation, PerturbationSpec::low_info(p, 0)},
      {IssueKind::kOddSize, PerturbationSpec::downscaling(4, p, 0)},
  };
  for (std::size_t i = 0; i < out.size(); ++i) out[i].spec.seed = mix_seed(options.seed, i);
  return out;
}

std::vector<ImageRecord> preclean(const std::vector<ImageRecord>& base, const BenchOptions& options) {
  AuditOptions audit;
  audit.default_method = ThresholdMethod::kFixed;
  audit.workers = options.workers;
  audit.dedup_cutoff = options.dedup_cutoff;
  const AuditResult result = audit_dataset(base, audit);
  std::vector<ImageRecord> kept;
  for (const auto& image : base) {
    auto it = result.table.flags.find(image.id);
    const bool valid = std::find(result.ids.begin(), result.ids.end(), image.id) != result.ids.end();
    if (valid && (it == result.table.flags.end() || it->second.empty())) kept.push_back(image);
  }
  return kept;
}

BenchTable run_single_suite(const std::vector<ImageRecord>& base, const BenchOptions& options) {
  const auto perturbations = single_suite_perturbations(options);
  std::vector<std::string> columns;
  for (const auto& p : perturbations) columns.push_back(to_string(p.kind));
  BenchTable table = method_table("single", columns);
  table.base_images = base.size();

  for (std::size_t c = 0; c < perturbations.size(); ++c) {
    const auto& [kind, spec] = perturbations[c];
    const LabeledDataset data = apply_contamination(base, std::span(&spec, 1), options.workers);
    const auto positives = label_positives(kind, label_table(data));
    const AuditResult scored = score_only(data.images, {kind}, options);
    const auto notes = column_notes(scored, kind);
    for (const auto& n : notes) table.notes.push_back(n);
    for (std::size_t r = 0; r < kAllMethods.size(); ++r) {
      BenchCell& cell = table.cells[r][c];
      const MethodOutcome outcome = threshold_column(scored, kind, kAllMethods[r], options);
      cell.notes = notes;
      if (!outcome.decision) {
        cell.notes.push_back("ZeroVarianceClass");
        continue;
      }
      cell.threshold = outcome.decision->threshold;
      for (const auto& n : outcome.decision->diagnostics.notes) cell.notes.push_back(n);
      cell.f1 = compare_sets(outcome.flagged, positives).f1;
    }
  }
  return table;
}

BenchTable run_dual_suite(const std::vector<ImageRecord>& base, const BenchOptions& options) {
  const auto singles = single_suite_perturbations(options);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::string> columns;
  for (std::size_t a = 0; a < singles.size(); ++a) {
    for (std::size_t b = a + 1; b < singles.size(); ++b) {
      pairs.emplace_back(a, b);
      columns.push_back(to_string(singles[a].kind) + "+" + to_string(singles[b].kind));
    }
  }
  BenchTable table = method_table("dual", columns);
  table.base_images = base.size();

  for (std::size_t c = 0; c < pairs.size(); ++c) {
    const auto& first = singles[pairs[c].first];
    const auto& second = singles[pairs[c].second];
    std::vector<PerturbationSpec> specs = {first.spec, second.spec};
    for (std::size_t s = 0; s < 2; ++s) {
      specs[s].proportion = options.proportion / 2.0;
      specs[s].seed = mix_seed(options.seed, 100 + 2 * c + s);
    }
    const LabeledDataset data = apply_contamination(base, specs, options.workers);
    const LabelTable labels = label_table(data);
    std::set<std::string> positives = label_positives(first.kind, labels);
    for (const auto& id : label_positives(second.kind, labels)) positives.insert(id);
    const AuditResult scored = score_only(data.images, {first.kind, second.kind}, options);
    std::vector<std::string> notes = column_notes(scored, first.kind);
    for (const auto& n : column_notes(scored, second.kind)) notes.push_back(n);
    for (const auto& n : notes) table.notes.push_back(columns[c] + ": " + n);

    for (std::size_t r = 0; r < kAllMethods.size(); ++r) {
      BenchCell& cell = table.cells[r][c];
      cell.notes = notes;
      const MethodOutcome a = threshold_column(scored, first.kind, kAllMethods[r], options);
      const MethodOutcome b = threshold_column(scored, second.kind, kAllMethods[r], options);
      if (!a.decision || !b.decision) {
        cell.notes.push_back("ZeroVarianceClass on " +
                             to_string(!a.decision ? first.kind : second.kind));
        continue;
      }
      std::set<std::string> flagged = a.flagged;
      flagged.insert(b.flagged.begin(), b.flagged.end());
      cell.f1 = compare_sets(flagged, positives).f1;
    }
  }
  return table;
}

BenchTable run_neardup_suite(const std::vector<ImageRecord>& base, const BenchOptions& options) {
  const PerturbationSpec spec =
      PerturbationSpec::near_duplicate(0.8, 1.2, options.proportion, mix_seed(options.seed, 200));
  const LabeledDataset data = apply_contamination(base, std::span(&spec, 1), options.workers);
  const auto positives = label_positives(IssueKind::kNearDuplicate, label_table(data));

  std::vector<PerceptualHash> hashes;
  for (const auto& image : data.images) hashes.push_back(phash64(image));
  auto provider = make_provider(options.semantic_provider);
  const SemanticClusters semantic = cluster_semantic(data.images, *provider, options.semantic_cutoff);

  std::vector<std::pair<std::string, DuplicateClusterSet>> methods = {
      {"Exact pHash match", cluster_single_linkage(hashes, 0)},
      {"Semantic similarity", semantic.clusters},
      {"Single linkage", cluster_single_linkage(hashes, options.dedup_cutoff)},
  };
  if (options.combined) {
    methods.emplace_back("Single linkage + semantic",
                         merge_duplicates(methods[2].second, semantic.clusters));
  }

  BenchTable table;
  table.name = "neardup";
  table.with_average = false;
  table.base_images = base.size();
  table.rows = {"F1"};
  table.cells.assign(1, {});
  for (const auto& [name, clusters] : methods) {
    table.columns.push_back(name);
    std::set<std::string> predicted;
    for (const auto& c : clusters.clusters) predicted.insert(c.members.begin(), c.members.end());
    const DetectionCounts counts = compare_sets(predicted, positives);
    BenchCell cell;
    cell.f1 = counts.f1;
    cell.notes.push_back("clusters=" + std::to_string(clusters.clusters.size()) +
                         " tp=" + std::to_string(counts.tp) + " fp=" + std::to_string(counts.fp) +
                         " fn=" + std::to_string(counts.fn));
    table.cells[0].push_back(cell);
  }
  if (!semantic.failed.empty()) {
    table.notes.push_back("embedding failed for " + std::to_string(semantic.failed.size()) + " images");
  }
  return table;
}

BenchTable run_suite(BenchSuite suite, const std::vector<ImageRecord>& base, const BenchOptions& options) {
  const std::vector<ImageRecord> input = options.preclean ? preclean(base, options) : base;
  BenchTable table;
  switch (suite) {
    case BenchSuite::kSingle: table = run_single_suite(input, options); break;
    case BenchSuite::kDual: table = run_dual_suite(input, options); break;
    case BenchSuite::kNearDup: table = run_neardup_suite(input, options); break;
  }
  if (options.preclean) {
    table.notes.push_back("preclean kept " + std::to_string(input.size()) + " of " +
                          std::to_string(base.size()) + " images");
  }
  return table;
}

std::string render_table_csv(const BenchTable& table) {
  std::ostringstream out;
  CsvRow header{"method"};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  if (table.with_average) header.push_back("Average");
  write_csv_row(out, header);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    CsvRow row{table.rows[r]};
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& cell : table.cells[r]) {
      if (cell.f1) {
        row.push_back(fixed4(*cell.f1));
        sum += *cell.f1;
        ++n;
      } else {
        row.push_back("---");
      }
    }
    if (table.with_average) row.push_back(n ? fixed4(sum / double(n)) : "---");
    write_csv_row(out, row);
  }
  return out.str();
}

nlohmann::json render_table_details(const BenchTable& table) {
  nlohmann::json j;
  j["suite"] = table.name;
  j["base_images"] = table.base_images;
  j["notes"] = table.notes;
  j["cells"] = nlohmann::json::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const BenchCell& cell = table.cells[r][c];
      nlohmann::json e = {{"row", table.rows[r]}, {"column", table.columns[c]}};
      e["f1"] = cell.f1 ? nlohmann::json(*cell.f1) : nlohmann::json(nullptr);
      e["threshold"] = cell.threshold ? nlohmann::json(*cell.threshold) : nlohmann::json(nullptr);
      e["notes"] = cell.notes;
      j["cells"].push_back(e);
    }
  }
  return j;
}

void write_bench(const BenchTable& table, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / (table.name + ".csv"), render_table_csv(table));
  write_file(out_dir / (table.name + ".json"), render_table_details(table).dump(2) + "\n");
}

}  // namespace pixelaudit::app
