#include "pixelaudit/app/commands.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pixelaudit/app/dataset_io.hpp"
#include "pixelaudit/app/report.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"
#include "pixelaudit/synth.hpp"

namespace fs = std::filesystem;

namespace pixelaudit::app {

AuditResult cmd_audit(const fs::path& dataset_dir, const AuditConfig& config, std::ostream& log) {
  const LoadedDataset loaded = load_directory(dataset_dir);
  if (loaded.images.empty()) {
    throw std::runtime_error("no decodable images in " + dataset_dir.string());
  }
  AuditResult result = audit_dataset(loaded.images, config.options);
  result.invalid.insert(result.invalid.begin(), loaded.invalid.begin(), loaded.invalid.end());
  write_audit_outputs(result, config, config.out);

  log << "audited " << result.ids.size() << " images";
  if (!result.invalid.empty()) log << " (" << result.invalid.size() << " invalid)";
  log << "\n";
  for (IssueKind k : report_kinds(config.options)) {
    log << "  " << to_string(k) << ": ";
    const auto& outcome = result.outcomes.at(k);
    if (outcome.decision) {
      log << result.table.flag_count(k) << " flagged (" << to_string(outcome.decision->method)
          << ", threshold " << outcome.decision->threshold << ")\n";
    } else {
      log << "not thresholded: " << outcome.error << "\n";
    }
  }
  return result;
}

LabeledDataset cmd_perturb(const fs::path& dataset_dir, const fs::path& spec_file,
                           const fs::path& out_dir, int workers) {
  std::ifstream in(spec_file);
  if (!in) throw ConfigError("cannot open spec file " + spec_file.string());
  std::stringstream text;
  text << in.rdbuf();
  const auto specs = parse_spec_document(text.str());

  const LoadedDataset loaded = load_directory(dataset_dir);
  LabeledDataset data = apply_contamination(loaded.images, specs, workers);

  fs::create_directories(out_dir);
  LabeledDataset renamed;
  renamed.manifest = data.manifest;
  renamed.selection_seed = data.selection_seed;
  renamed.duplicate_of = {};
  for (auto& image : data.images) {
    const auto& tokens = data.labels.at(image.id);
    if (tokens.empty()) {
      write_file(out_dir / image.id, read_file(dataset_dir / image.id));
      renamed.labels[image.id] = tokens;
      renamed.images.push_back(std::move(image));
      continue;
    }
    std::string id = image.id;
    if (fs::path(id).extension() != ".png") id += ".png";
    write_file(out_dir / id, encode_png(image));
    renamed.labels[id] = tokens;
    auto dup = data.duplicate_of.find(image.id);
    if (dup != data.duplicate_of.end()) renamed.duplicate_of[id] = dup->second;
    image.id = id;
    renamed.images.push_back(std::move(image));
  }
  write_labels(renamed, out_dir / "labels.csv");

  nlohmann::json manifest;
  manifest["specs"] = nlohmann::json::array();
  for (const auto& s : renamed.manifest) manifest["specs"].push_back(to_json(s));
  manifest["selection_seed"] = renamed.selection_seed;
  manifest["images"] = renamed.images.size();
  std::size_t labeled = 0;
  for (const auto& [id, tokens] : renamed.labels) labeled += !tokens.empty();
  manifest["labeled"] = labeled;
  manifest["invalid"] = nlohmann::json::array();
  for (const auto& [id, reason] : loaded.invalid) manifest["invalid"].push_back({{"id", id}, {"reason", reason}});
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return renamed;
}

EvaluationReport cmd_evaluate(const fs::path& report_csv, const fs::path& labels_csv) {
  return evaluate(read_report_csv(report_csv), read_labels(labels_csv));
}

BenchTable cmd_bench(BenchSuite suite, const fs::path& base_dir, const fs::path& out_dir,
                     const BenchOptions& options) {
  const LoadedDataset loaded = load_directory(base_dir);
  if (loaded.images.size() < 500) {
    throw std::runtime_error("bench needs at least 500 base images, found " +
                             std::to_string(loaded.images.size()) + " in " + base_dir.string());
  }
  BenchTable table = run_suite(suite, loaded.images, options);
  write_bench(table, out_dir);
  return table;
}

void cmd_synth(std::size_t count, std::uint64_t seed, int size, const fs::path& out_dir) {
  write_dataset_pngs(synthesize_dataset(count, seed, size), out_dir);
}

}  // namespace pixelaudit::app
