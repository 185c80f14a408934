#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>

#include "pixelaudit/app/bench.hpp"
#include "pixelaudit/app/config.hpp"
#include "pixelaudit/app/evaluate.hpp"
#include "pixelaudit/perturb.hpp"

namespace pixelaudit::app {

// Writes report.csv, summary.json and clusters.json into config.out. Throws
// std::runtime_error when the directory holds no decodable image.
AuditResult cmd_audit(const std::filesystem::path& dataset_dir, const AuditConfig& config,
                      std::ostream& log);

// Untouched images are copied byte for byte; degraded ones are written as PNG
// (".png" is appended to ids with another extension).
LabeledDataset cmd_perturb(const std::filesystem::path& dataset_dir,
                           const std::filesystem::path& spec_file,
                           const std::filesystem::path& out_dir, int workers = 1);

EvaluationReport cmd_evaluate(const std::filesystem::path& report_csv,
                              const std::filesystem::path& labels_csv);

// Requires a base set of at least 500 decodable images.
BenchTable cmd_bench(BenchSuite suite, const std::filesystem::path& base_dir,
                     const std::filesystem::path& out_dir, const BenchOptions& options);

void cmd_synth(std::size_t count, std::uint64_t seed, int size, const std::filesystem::path& out_dir);

}  // namespace pixelaudit::app
