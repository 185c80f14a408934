#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pixelaudit/image.hpp"
#include "pixelaudit/perturb.hpp"
#include "pixelaudit/threshold.hpp"

namespace pixelaudit::app {

enum class BenchSuite { kSingle, kDual, kNearDup };
BenchSuite parse_suite(const std::string& text);
std::string to_string(BenchSuite suite);

struct BenchOptions {
  std::uint64_t seed = 20240521;
  double proportion = 0.12;  // per perturbation; the dual suite uses half per side
  int workers = 1;
  bool preclean = false;
  GhtParams ght{100.0, 8.0, 0.0, 0.5};
  int mve_window = 5;
  int dedup_cutoff = 10;
  double semantic_cutoff = 0.96;
  std::string semantic_provider = "downscale";
  bool combined = false;  // neardup: add a single-linkage + semantic column
};

struct BenchCell {
  std::optional<double> f1;  // empty when the method failed ("---")
  std::optional<double> threshold;
  std::vector<std::string> notes;
};

struct BenchTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::vector<std::vector<BenchCell>> cells;  // [row][column]
  bool with_average = true;
  std::vector<std::string> notes;
  std::size_t base_images = 0;
};

// One benchmark column: the issue kind scored and the perturbation injected.
struct BenchPerturbation {
  IssueKind kind;
  PerturbationSpec spec;
};

std::vector<BenchPerturbation> single_suite_perturbations(const BenchOptions& options);
std::string method_row_label(ThresholdMethod method);

// Drops images flagged by a FIXED-threshold audit of every kind.
std::vector<ImageRecord> preclean(const std::vector<ImageRecord>& base, const BenchOptions& options);

BenchTable run_single_suite(const std::vector<ImageRecord>& base, const BenchOptions& options);
BenchTable run_dual_suite(const std::vector<ImageRecord>& base, const BenchOptions& options);
BenchTable run_neardup_suite(const std::vector<ImageRecord>& base, const BenchOptions& options);
BenchTable run_suite(BenchSuite suite, const std::vector<ImageRecord>& base, const BenchOptions& options);

// Four-decimal F1 matrix, "---" for failed cells, plus an Average column that
// skips them.
std::string render_table_csv(const BenchTable& table);
nlohmann::json render_table_details(const BenchTable& table);
// Writes <name>.csv and <name>.json.
void write_bench(const BenchTable& table, const std::filesystem::path& out_dir);

}  // namespace pixelaudit::app
