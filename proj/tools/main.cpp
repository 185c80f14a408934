#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pixelaudit/app/commands.hpp"
#include "pixelaudit/error.hpp"

namespace app = pixelaudit::app;

int main(int argc, char** argv) {
  CLI::App cli{"pixelaudit: score, flag and benchmark image dataset quality issues"};
  cli.require_subcommand(1);

  // audit
  auto* audit = cli.add_subcommand("audit", "Score and flag every image in a directory");
  std::string audit_dir, config_file, issues, methods, out_dir;
  int light_percentile = 0, dedup_cutoff = -1, workers = 0;
  audit->add_option("dir", audit_dir, "Dataset directory")->required();
  audit->add_option("--config", config_file, "JSON config; flags override it");
  audit->add_option("--issues", issues, "Comma-separated kinds (default: all)");
  audit->add_option("--method", methods, "METHOD for all kinds, or KIND=METHOD,...");
  audit->add_option("--light-percentile", light_percentile, "Rank used by the light score");
  audit->add_option("--dedup-cutoff", dedup_cutoff, "Hamming cutoff for near duplicates");
  bool file_bytes = false;
  audit->add_flag("--exact-by-file-bytes", file_bytes, "Exact duplicates by file bytes, not pixels");
  audit->add_option("--workers", workers, "Worker threads");
  audit->add_option("--out", out_dir, "Output directory");

  // perturb
  auto* perturb = cli.add_subcommand("perturb", "Write a labeled degraded copy of a dataset");
  std::string perturb_dir, spec_file, perturb_out;
  int perturb_workers = 1;
  perturb->add_option("dir", perturb_dir, "Dataset directory")->required();
  perturb->add_option("--spec", spec_file, "Perturbation spec (JSON)")->required();
  perturb->add_option("--out", perturb_out, "Output directory")->required();
  perturb->add_option("--workers", perturb_workers, "Worker threads");

  // evaluate
  auto* evaluate = cli.add_subcommand("evaluate", "F1 of a report against ground-truth labels");
  std::string report_file, labels_file, eval_out;
  evaluate->add_option("--report", report_file, "report.csv from audit")->required();
  evaluate->add_option("--labels", labels_file, "labels.csv from perturb")->required();
  evaluate->add_option("--out", eval_out, "Also write the JSON result here");

  // bench
  auto* bench = cli.add_subcommand("bench", "Run a detection benchmark suite");
  std::string suite, base_dir, bench_out;
  app::BenchOptions bench_options;
  bench->add_option("--suite", suite, "single, dual or neardup")->required();
  bench->add_option("--base", base_dir, "Base dataset directory (>= 500 images)")->required();
  bench->add_option("--out", bench_out, "Output directory")->required();
  bench->add_option("--seed", bench_options.seed, "Contamination seed");
  bench->add_option("--workers", bench_options.workers, "Worker threads");
  bench->add_flag("--preclean", bench_options.preclean,
                  "Drop images a FIXED-threshold audit flags before contaminating");
  bench->add_flag("--combined", bench_options.combined,
                  "neardup: add a single-linkage + semantic column");
  bench->add_option("--ght-nu", bench_options.ght.nu, "GHT nu");
  bench->add_option("--ght-tau", bench_options.ght.tau, "GHT tau");
  bench->add_option("--ght-kappa", bench_options.ght.kappa, "GHT kappa");
  bench->add_option("--ght-omega", bench_options.ght.omega, "GHT omega");
  bench->add_option("--mve-window", bench_options.mve_window, "MVE smoothing window");

  // synth
  auto* synth = cli.add_subcommand("synth", "Generate a procedural base dataset");
  std::size_t synth_count = 1000;
  std::uint64_t synth_seed = 1;
  int synth_size = 32;
  std::string synth_out;
  synth->add_option("--count", synth_count, "Number of images");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--size", synth_size, "Side length in pixels");
  synth->add_option("--out", synth_out, "Output directory")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*audit) {
      app::AuditConfig config = config_file.empty() ? app::AuditConfig{} : app::load_config_file(config_file);
      if (!issues.empty()) config.options.issues = app::parse_issue_list(issues);
      if (!methods.empty()) app::apply_method_flag(config, methods);
      if (light_percentile) {
        app::apply_config_json(config, {{"light_percentile", light_percentile}});
      }
      if (dedup_cutoff >= 0) app::apply_config_json(config, {{"dedup_cutoff", dedup_cutoff}});
      if (file_bytes) config.options.exact_by_file_bytes = true;
      if (workers) app::apply_config_json(config, {{"workers", workers}});
      if (!out_dir.empty()) config.out = out_dir;
      app::cmd_audit(audit_dir, config, std::cout);
    } else if (*perturb) {
      const auto data = app::cmd_perturb(perturb_dir, spec_file, perturb_out, perturb_workers);
      std::size_t labeled = 0;
      for (const auto& [id, tokens] : data.labels) labeled += !tokens.empty();
      std::cout << "wrote " << data.images.size() << " images (" << labeled << " degraded) to "
                << perturb_out << "\n";
    } else if (*evaluate) {
      const auto report = app::cmd_evaluate(report_file, labels_file);
      const std::string text = report.to_json().dump(2);
      std::cout << text << "\n";
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        out << text << "\n";
      }
    } else if (*bench) {
      const auto table = app::cmd_bench(app::parse_suite(suite), base_dir, bench_out, bench_options);
      std::cout << app::render_table_csv(table);
      for (const auto& note : table.notes) std::cout << "note: " << note << "\n";
    } else if (*synth) {
      app::cmd_synth(synth_count, synth_seed, synth_size, synth_out);
      std::cout << "wrote " << synth_count << " images to " << synth_out << "\n";
    }
  } catch (const pixelaudit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
