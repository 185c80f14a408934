#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "pixelaudit/app/commands.hpp"
#include "pixelaudit/app/csv.hpp"
#include "pixelaudit/app/dataset_io.hpp"
#include "pixelaudit/app/report.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"
#include "pixelaudit/perturb.hpp"
#include "pixelaudit/synth.hpp"

using namespace pixelaudit;
using namespace pixelaudit::app;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("pixelaudit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::pair<std::string, std::string>> tree(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), dir).string(), slurp(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Csv, QuotingRoundTrip) {
  const CsvRow row{"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  std::stringstream ss;
  write_csv_row(ss, row);
  write_csv_row(ss, {"x"});
  const auto rows = read_csv(ss);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], row);
  EXPECT_EQ(rows[1], CsvRow{"x"});
}

TEST(Csv, DoublesRoundTrip) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("abc"), std::exception);
}

TEST(Config, OverridesAndErrors) {
  AuditConfig c;
  apply_config_json(c, nlohmann::json::parse(R"({
    "issues": ["DARK", "LIGHT"], "default_method": "OTSU", "methods": {"DARK": "GMM"},
    "light_percentile": 60, "dedup_cutoff": 12, "workers": 2,
    "ght": {"nu": 5, "tau": 1, "kappa": 0, "omega": 0.5}, "fixed_thresholds": {"DARK": 0.4}
  })"));
  EXPECT_EQ(c.options.issues, (std::set<IssueKind>{IssueKind::kDark, IssueKind::kLight}));
  EXPECT_EQ(c.options.method_for(IssueKind::kDark), ThresholdMethod::kGmm);
  EXPECT_EQ(c.options.method_for(IssueKind::kLight), ThresholdMethod::kOtsu);
  EXPECT_EQ(c.options.light.percentile_rank, 60);
  EXPECT_EQ(c.options.dedup_cutoff, 12);
  EXPECT_EQ(c.options.ght.nu, 5);
  EXPECT_EQ(c.options.fixed_thresholds.at(IssueKind::kDark), 0.4);

  apply_method_flag(c, "LIGHT=MVE");
  EXPECT_EQ(c.options.method_for(IssueKind::kLight), ThresholdMethod::kMve);
  apply_method_flag(c, "LI");
  EXPECT_EQ(c.options.method_for(IssueKind::kDark), ThresholdMethod::kLi);

  for (const char* bad : {R"({"issues": ["FUZZY"]})", R"({"dedup_cutoff": 65})",
                          R"({"light_percentile": 20})", R"({"workers": 0})",
                          R"({"methods": {"DARK": "KMEANS"}})", R"({"ght": {"omega": 2}})"}) {
    AuditConfig d;
    EXPECT_THROW(apply_config_json(d, nlohmann::json::parse(bad)), ConfigError) << bad;
  }
}

TEST(Evaluate, FormulaAndMapping) {
  const auto c = make_counts(1, 1, 0);
  EXPECT_DOUBLE_EQ(c.precision, 0.5);
  EXPECT_DOUBLE_EQ(c.recall, 1.0);
  EXPECT_NEAR(c.f1, 2.0 / 3, 1e-15);
  EXPECT_EQ(make_counts(0, 0, 3).f1, 0.0);
  EXPECT_EQ(kinds_for_label("BRIGHTNESS(0.05)"), std::set<IssueKind>{IssueKind::kDark});
  EXPECT_EQ(kinds_for_label("BRIGHTNESS(3.5)"), std::set<IssueKind>{IssueKind::kLight});
  EXPECT_EQ(kinds_for_label("BLUR(MEDIAN,5)"), std::set<IssueKind>{IssueKind::kBlurry});
  EXPECT_EQ(kinds_for_label("DOWNSCALE(4)"), std::set<IssueKind>{IssueKind::kOddSize});
  EXPECT_EQ(kinds_for_label("ODD_SIZE_ROUNDTRIP(4)"), std::set<IssueKind>{IssueKind::kOddSize});
  EXPECT_EQ(kinds_for_label("LOW_INFO"), std::set<IssueKind>{IssueKind::kLowInformation});
  EXPECT_EQ(kinds_for_label("NEAR_DUPLICATE(0.8,1.2)"), std::set<IssueKind>{IssueKind::kNearDuplicate});
  EXPECT_EQ(kinds_for_label("EXACT_DUPLICATE"),
            (std::set<IssueKind>{IssueKind::kExactDuplicate, IssueKind::kNearDuplicate}));
}

TEST(Evaluate, PerfectFlagsMacroAndMismatch) {
  ReportTable r;
  r.ids = {"a", "b", "c", "d"};
  r.kinds = {IssueKind::kDark, IssueKind::kBlurry, IssueKind::kLight};
  r.flags[IssueKind::kDark] = {"a"};
  r.flags[IssueKind::kBlurry] = {"b", "c"};
  LabelTable l;
  l.labels = {{"a", {"BRIGHTNESS(0.05)"}}, {"b", {"BLUR(AVERAGE,11)"}}, {"c", {}}, {"d", {}}};
  const auto e = evaluate(r, l);
  ASSERT_EQ(e.kinds.size(), 2u);  // LIGHT has no positives
  EXPECT_EQ(e.kinds[0].counts.f1, 1.0);
  EXPECT_NEAR(e.kinds[1].counts.f1, 2.0 / 3, 1e-15);
  EXPECT_NEAR(e.macro_f1, (1.0 + 2.0 / 3) / 2, 1e-15);
  l.labels.erase("d");
  l.labels["e"] = {};
  try {
    evaluate(r, l);
    FAIL();
  } catch (const IdMismatch& m) {
    EXPECT_NE(std::string(m.what()).find("d"), std::string::npos);
    EXPECT_NE(std::string(m.what()).find("e"), std::string::npos);
  }
}

TEST(Evaluate, DuplicatePositivesIncludeSources) {
  LabelTable l;
  l.labels = {{"a", {}}, {"b", {"NEAR_DUPLICATE(0.8,1.2)"}}, {"c", {}}};
  l.duplicate_of = {{"b", "a"}};
  EXPECT_EQ(label_positives(IssueKind::kNearDuplicate, l), (std::set<std::string>{"a", "b"}));
}

TEST(Commands, OneBlackImageFixedDark) {
  TempDir data, out;
  save_png(ImageRecord::blank("black.png", 16, 16, ColorMode::kRgb, 0), (data.path() / "black.png").string());
  AuditConfig c;
  apply_config_json(c, nlohmann::json::parse(R"({"issues": ["DARK"], "default_method": "FIXED"})"));
  c.out = out.path().string();
  std::ostringstream log;
  const auto r = cmd_audit(data.path(), c, log);
  EXPECT_EQ(r.table.score("black.png", IssueKind::kDark), 0.0);
  const auto summary = nlohmann::json::parse(slurp(out.path() / "summary.json"));
  EXPECT_EQ(summary["kinds"]["DARK"]["flagged"], 1);
  EXPECT_TRUE(fs::exists(out.path() / "report.csv"));
  EXPECT_TRUE(fs::exists(out.path() / "clusters.json"));
}

TEST(Commands, InjectedGrayscaleImagesAreFlagged) {
  TempDir data, out;
  for (int i = 0; i < 12; ++i) {
    ImageRecord img = synthesize_image("s", 100 + i);
    if (i < 2) img = to_grayscale_3ch(img);
    save_png(img, (data.path() / ("img" + std::to_string(i) + ".png")).string());
  }
  AuditConfig c;
  c.out = out.path().string();
  std::ostringstream log;
  const auto r = cmd_audit(data.path(), c, log);
  EXPECT_EQ(r.table.flag_count(IssueKind::kGrayscale), 2u);
  EXPECT_TRUE(r.table.flagged("img0.png", IssueKind::kGrayscale));
  EXPECT_TRUE(r.table.flagged("img1.png", IssueKind::kGrayscale));
}

TEST(Commands, EmptyDirectoryFails) {
  TempDir data, out;
  AuditConfig c;
  c.out = out.path().string();
  std::ostringstream log;
  EXPECT_THROW(cmd_audit(data.path(), c, log), std::runtime_error);
}

TEST(Commands, UndecodableFileIsRecordedNotFatal) {
  TempDir data, out;
  save_png(synthesize_image("a", 1), (data.path() / "a.png").string());
  write_file(data.path() / "broken.png", std::string("not an image"));
  AuditConfig c;
  c.out = out.path().string();
  std::ostringstream log;
  cmd_audit(data.path(), c, log);
  const auto summary = nlohmann::json::parse(slurp(out.path() / "summary.json"));
  EXPECT_EQ(summary["images"], 1);
  EXPECT_EQ(summary["invalid"].size(), 1u);
}

TEST(Commands, ReportFlagsMatchSummaryThresholds) {
  TempDir data, out;
  write_dataset_pngs(synthesize_dataset(60, 9), data.path());
  AuditConfig c;
  c.out = out.path().string();
  std::ostringstream log;
  cmd_audit(data.path(), c, log);
  const auto report = read_report_csv(out.path() / "report.csv");
  const auto summary = nlohmann::json::parse(slurp(out.path() / "summary.json"));
  EXPECT_EQ(report.ids.size(), 60u);
  for (IssueKind k : report.kinds) {
    const auto& entry = summary["kinds"][to_string(k)];
    if (entry["threshold"].is_null()) continue;
    const double t = entry["threshold"];
    std::set<std::string> expected;
    for (const auto& [id, s] : report.scores.at(k)) {
      if (is_thresholded(k) ? s < t : s != 1.0) expected.insert(id);
    }
    const auto it = report.flags.find(k);
    EXPECT_EQ(it == report.flags.end() ? std::set<std::string>{} : it->second, expected) << to_string(k);
  }
}

TEST(Commands, AuditIsDeterministicAcrossWorkers) {
  TempDir data, a, b;
  write_dataset_pngs(synthesize_dataset(80, 10), data.path());
  std::ostringstream log;
  AuditConfig c;
  c.out = a.path().string();
  cmd_audit(data.path(), c, log);
  c.options.workers = 3;
  c.out = b.path().string();
  cmd_audit(data.path(), c, log);
  EXPECT_EQ(slurp(a.path() / "report.csv"), slurp(b.path() / "report.csv"));
  EXPECT_EQ(slurp(a.path() / "clusters.json"), slurp(b.path() / "clusters.json"));
}

TEST(Commands, FileByteDigestsSeparateReencodedCopies) {
  TempDir data, out;
  const ImageRecord img = synthesize_image("a", 4);
  write_file(data.path() / "a.png", encode_png(img));
  write_file(data.path() / "b.bmp", encode_bmp(img));
  AuditConfig c;
  c.options.issues = {IssueKind::kExactDuplicate};
  c.out = out.path().string();
  std::ostringstream log;
  EXPECT_EQ(cmd_audit(data.path(), c, log).exact_clusters.clusters.size(), 1u);
  c.options.exact_by_file_bytes = true;
  EXPECT_TRUE(cmd_audit(data.path(), c, log).exact_clusters.clusters.empty());
}

TEST(Commands, EmptySpecCopiesBytes) {
  TempDir data, spec, out;
  write_dataset_pngs(synthesize_dataset(5, 11), data.path());
  write_file(spec.path() / "spec.json", std::string("[]"));
  cmd_perturb(data.path(), spec.path() / "spec.json", out.path());
  for (const auto& f : list_image_files(data.path())) {
    EXPECT_EQ(slurp(f), slurp(out.path() / f.filename()));
  }
  const auto labels = read_labels(out.path() / "labels.csv");
  EXPECT_EQ(labels.labels.size(), 5u);
  for (const auto& [id, tokens] : labels.labels) EXPECT_TRUE(tokens.empty());
}

TEST(Commands, PerturbTwiceIsIdentical) {
  TempDir data, spec, a, b;
  write_dataset_pngs(synthesize_dataset(50, 12), data.path());
  write_file(spec.path() / "spec.json",
             std::string(R"([{"kind": "BRIGHTNESS", "params": {"scalar": 0.05}, "proportion": 0.12, "seed": 7}])"));
  cmd_perturb(data.path(), spec.path() / "spec.json", a.path());
  cmd_perturb(data.path(), spec.path() / "spec.json", b.path(), 3);
  EXPECT_EQ(tree(a.path()), tree(b.path()));
}

TEST(Commands, DualSpecLabelsAreDisjointAndEvaluate) {
  TempDir data, spec, perturbed, audit;
  write_dataset_pngs(synthesize_dataset(100, 13), data.path());
  write_file(spec.path() / "spec.json", std::string(R"({"specs": [
    {"kind": "BRIGHTNESS", "params": {"scalar": 0.05}, "proportion": 0.06, "seed": 1},
    {"kind": "LOW_INFO", "proportion": 0.06, "seed": 2}]})"));
  const auto d = cmd_perturb(data.path(), spec.path() / "spec.json", perturbed.path());
  std::size_t labeled = 0;
  for (const auto& [id, t] : d.labels) {
    EXPECT_LE(t.size(), 1u);
    labeled += !t.empty();
  }
  EXPECT_EQ(labeled, 12u);
  AuditConfig c;
  c.options.issues = {IssueKind::kDark, IssueKind::kLowInformation};
  c.out = audit.path().string();
  std::ostringstream log;
  cmd_audit(perturbed.path(), c, log);
  const auto e = cmd_evaluate(audit.path() / "report.csv", perturbed.path() / "labels.csv");
  ASSERT_EQ(e.kinds.size(), 2u);
  EXPECT_EQ(e.kinds[0].kind, IssueKind::kDark);
  EXPECT_EQ(e.kinds[0].counts.tp + e.kinds[0].counts.fn, 6u);
}

TEST(Bench, SmallBaseIsRejectedAndSuiteParses) {
  TempDir data, out;
  write_dataset_pngs(synthesize_dataset(10, 14), data.path());
  EXPECT_THROW(cmd_bench(BenchSuite::kSingle, data.path(), out.path(), BenchOptions{}), std::exception);
  EXPECT_EQ(parse_suite("dual"), BenchSuite::kDual);
  EXPECT_THROW(parse_suite("triple"), std::exception);
}

TEST(Bench, TableShapes) {
  const auto base = synthesize_dataset(500, 15);
  BenchOptions o;
  const auto single = run_single_suite(base, o);
  EXPECT_EQ(single.rows.size(), 8u);
  EXPECT_EQ(single.columns.size(), 5u);
  const auto csv = render_table_csv(single);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  EXPECT_NE(csv.find("Average"), std::string::npos);
  const auto dual = run_dual_suite(base, o);
  EXPECT_EQ(dual.columns.size(), 10u);
  const auto near = run_neardup_suite(base, o);
  EXPECT_EQ(near.columns.size(), 3u);
}
