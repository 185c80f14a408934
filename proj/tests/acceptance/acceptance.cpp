// One PASS/FAIL line per acceptance criterion, with the measured values.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pixelaudit/app/bench.hpp"
#include "pixelaudit/app/commands.hpp"
#include "pixelaudit/app/dataset_io.hpp"
#include "pixelaudit/app/evaluate.hpp"
#include "pixelaudit/audit.hpp"
#include "pixelaudit/dedup.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/perturb.hpp"
#include "pixelaudit/random.hpp"
#include "pixelaudit/synth.hpp"
#include "pixelaudit/threshold.hpp"

using namespace pixelaudit;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBaseSeed = 1;
constexpr std::size_t kBaseSize = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const std::vector<ImageRecord>& base_set() {
  static const std::vector<ImageRecord> base = synthesize_dataset(kBaseSize, kBaseSeed);
  return base;
}

std::optional<double> cell(const app::BenchTable& t, const std::string& row, const std::string& col) {
  const auto r = std::find(t.rows.begin(), t.rows.end(), row) - t.rows.begin();
  const auto c = std::find(t.columns.begin(), t.columns.end(), col) - t.columns.begin();
  return t.cells.at(r).at(c).f1;
}

double row_average(const app::BenchTable& t, const std::string& row) {
  const auto r = std::find(t.rows.begin(), t.rows.end(), row) - t.rows.begin();
  double sum = 0;
  int n = 0;
  for (const auto& c : t.cells.at(r)) {
    if (c.f1) {
      sum += *c.f1;
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

// 1. Split-based thresholders against brute-force scans of their objectives.
Outcome threshold_oracles() {
  Rng rng(0xacce55);
  const GhtParams ght{100, 8, 0, 0.5};
  int exact = 0, near_tie = 0, mismatch = 0, met_errors = 0;
  auto check = [&](const oracle::Table& t, int split) {
    if (split == oracle::argmax(t)) {
      ++exact;
    } else if (oracle::agrees(t, split)) {
      ++near_tie;
    } else {
      ++mismatch;
    }
  };
  for (int i = 0; i < 1000; ++i) {
    const auto counts = fixtures::random_counts(rng);
    const auto h = fixtures::to_histogram(counts);
    check(oracle::otsu(counts), threshold_otsu(h).split);
    check(oracle::max_entropy(counts), threshold_max_entropy(h).split);
    check(oracle::mve(counts, 5), threshold_mve(h, 5).split);
    check(oracle::ght(counts, ght.nu, ght.tau, ght.kappa, ght.omega), threshold_ght(h, ght).split);
    const auto met = oracle::met(counts);
    if (oracle::argmax(met) < 0) {
      try {
        threshold_met(h);
        ++mismatch;
      } catch (const ZeroVarianceClass&) {
        ++met_errors;
      }
    } else {
      check(met, threshold_met(h).split);
    }
  }
  return {mismatch == 0, std::to_string(exact) + " exact, " + std::to_string(near_tie) +
                             " equal-objective ties, " + std::to_string(met_errors) +
                             " MET ZeroVarianceClass agreed, " + std::to_string(mismatch) + " mismatches"};
}

// 2. Single-linkage clusters against breadth-first connected components.
Outcome clustering_oracle() {
  Rng rng(0xc105);
  int mismatches = 0, nontrivial = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng.below(200);
    const auto bits = fixtures::random_hashes(rng, n);
    std::vector<PerceptualHash> hashes;
    for (std::size_t k = 0; k < n; ++k) {
      char id[16];
      std::snprintf(id, sizeof id, "h%04zu", k);
      hashes.push_back({id, bits[k]});
    }
    for (int cutoff : {0, 5, 10, 20, 64}) {
      const auto got = cluster_single_linkage(hashes, cutoff);
      const auto want = oracle::hamming_components(bits, cutoff);
      bool same = got.clusters.size() == want.size();
      for (std::size_t c = 0; same && c < want.size(); ++c) {
        std::vector<std::string> ids;
        for (auto k : want[c]) ids.push_back(hashes[k].image_id);
        same = ids == got.clusters[c].members;
      }
      mismatches += !same;
      nontrivial += !want.empty();
    }
  }
  return {mismatches == 0, "2500 cases (" + std::to_string(nontrivial) + " with clusters), " +
                               std::to_string(mismatches) + " mismatches"};
}

// 3. Single-perturbation suite.
Outcome single_suite() {
  const app::BenchTable t = app::run_single_suite(base_set(), app::BenchOptions{});
  const double li_dark = cell(t, "Li", "DARK").value_or(0);
  const double li_low = cell(t, "Li", "LOW_INFORMATION").value_or(0);
  const double fixed_low = cell(t, "Original", "LOW_INFORMATION").value_or(1);
  const double gap = row_average(t, "Li") - row_average(t, "Original");
  const bool pass = li_dark >= 0.95 && li_low >= 0.90 && fixed_low <= 0.10 && gap >= 0.15;
  std::string d = "Li DARK " + fmt("%.4f", li_dark) + " (>=0.95), Li LOW_INFORMATION " + fmt("%.4f", li_low) +
                  " (>=0.90), FIXED LOW_INFORMATION " + fmt("%.4f", fixed_low) + " (<=0.10), Li avg " +
                  fmt("%.4f", row_average(t, "Li")) + " - FIXED avg " + fmt("%.4f", row_average(t, "Original")) +
                  " = " + fmt("%.4f", gap) + " (>=0.15)";
  return {pass, d};
}

// 4. Dual-perturbation ordering and MET failures on the ODD_SIZE pairs.
Outcome dual_suite() {
  const app::BenchTable t = app::run_dual_suite(base_set(), app::BenchOptions{});
  const double li = row_average(t, "Li"), fixed = row_average(t, "Original");
  int odd_pairs = 0, met_dashes = 0;
  for (const auto& col : t.columns) {
    if (col.find("ODD_SIZE") == std::string::npos) continue;
    ++odd_pairs;
    met_dashes += !cell(t, "MET", col).has_value();
  }
  const bool pass = li > fixed && odd_pairs == 4 && met_dashes == 4;
  return {pass, "Li avg " + fmt("%.4f", li) + " vs FIXED avg " + fmt("%.4f", fixed) + ", MET '---' on " +
                    std::to_string(met_dashes) + "/" + std::to_string(odd_pairs) + " ODD_SIZE pairs"};
}

// 5. Near-duplicate suite.
Outcome neardup_suite() {
  const app::BenchTable t = app::run_neardup_suite(base_set(), app::BenchOptions{});
  const double exact = cell(t, "F1", "Exact pHash match").value_or(0);
  const double semantic = cell(t, "F1", "Semantic similarity").value_or(0);
  const double single = cell(t, "F1", "Single linkage").value_or(0);
  const bool pass = single >= exact + 0.15 && single >= semantic && single >= 0.70;
  return {pass, "single linkage " + fmt("%.4f", single) + ", exact pHash " + fmt("%.4f", exact) +
                    ", semantic " + fmt("%.4f", semantic)};
}

// 6. Grayscale re-check on identical-channel RGB images.
Outcome grayscale_fix() {
  std::vector<ImageRecord> gray, tweaked;
  Rng rng(0x6a);
  for (std::size_t i = 0; i < 100; ++i) {
    ImageRecord g = to_grayscale_3ch(base_set()[i]);
    gray.push_back(g);
    const std::size_t px = rng.below(g.pixel_count());
    const int ch = static_cast<int>(rng.below(3));
    std::uint8_t& s = g.pixels[px * 3 + ch];
    s = s == 255 ? 254 : s + 1;
    tweaked.push_back(g);
  }
  AuditOptions opt;
  opt.issues = {IssueKind::kGrayscale};
  const auto a = audit_dataset(gray, opt), b = audit_dataset(tweaked, opt);
  const std::size_t flagged = a.table.flag_count(IssueKind::kGrayscale);
  const std::size_t still = b.table.flag_count(IssueKind::kGrayscale);
  return {flagged == 100 && still == 0,
          std::to_string(flagged) + "/100 converted flagged, " + std::to_string(still) + "/100 perturbed flagged"};
}

// 7. MET on two delta spikes.
Outcome met_failure() {
  Histogram256 h;
  h.counts[60] = 500;
  h.counts[190] = 500;
  h.total = 1000;
  std::vector<std::string> messages;
  for (int run = 0; run < 2; ++run) {
    try {
      threshold_met(h);
      messages.push_back("returned");
    } catch (const ZeroVarianceClass& e) {
      messages.push_back(e.what());
    }
  }
  const bool pass = messages[0] == messages[1] && messages[0] != "returned";
  return {pass, "both runs: " + messages[0]};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 8. Two `bench --suite single` runs produce identical files.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("pixelaudit_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  app::write_dataset_pngs(base_set(), root / "base");
  std::ostringstream devnull;
  app::cmd_bench(app::BenchSuite::kSingle, root / "base", root / "run1", app::BenchOptions{});
  app::cmd_bench(app::BenchSuite::kSingle, root / "base", root / "run2", app::BenchOptions{});
  std::vector<std::string> names;
  bool same = true;
  for (const auto& e : fs::directory_iterator(root / "run1")) {
    names.push_back(e.path().filename().string());
    same = same && fs::exists(root / "run2" / e.path().filename()) &&
           slurp(e.path()) == slurp(root / "run2" / e.path().filename());
  }
  std::size_t second = std::distance(fs::directory_iterator(root / "run2"), fs::directory_iterator{});
  same = same && second == names.size() && !names.empty();
  fs::remove_all(root);
  std::sort(names.begin(), names.end());
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  return {same, std::to_string(names.size()) + " files compared (" + list + ")"};
}

// Marsaglia-Tsang gamma sampler on the portable generator.
double sample_gamma(Rng& rng, double shape, double scale) {
  if (shape < 1) return sample_gamma(rng, shape + 1, scale) * std::pow(rng.uniform(), 1.0 / shape);
  const double d = shape - 1.0 / 3, c = 1 / std::sqrt(9 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1 + c * x;
    } while (v <= 0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u > 0 && std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
  }
}

// 9. EM monotonicity and parameter recovery.
Outcome gmm_sanity() {
  Rng rng(0x6a33);
  int monotone = 0, separated = 0, recovered = 0;
  double worst_drop = 0;
  for (int m = 0; m < 100; ++m) {
    const bool well = m % 2 == 0;
    const double k1 = well ? rng.uniform(8, 60) : rng.uniform(1.5, 20);
    const double k2 = well ? rng.uniform(8, 60) : rng.uniform(1.5, 20);
    const double mean1 = rng.uniform(0.03, 0.2);
    const double ratio = well ? rng.uniform(3, 8) : rng.uniform(1.2, 4);
    const double mean2 = mean1 * ratio;
    const double w = rng.uniform(0.1, 0.9);
    const int n = 400 + static_cast<int>(rng.below(1200));
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      v.push_back(rng.uniform() < w ? sample_gamma(rng, k1, mean1 / k1) : sample_gamma(rng, k2, mean2 / k2));
    }
    const GammaMixtureFit fit = fit_gamma_mixture(v);
    bool ok = true;
    for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
      const double drop = fit.log_likelihood_trace[i - 1] - fit.log_likelihood_trace[i];
      if (drop > 0) {
        ok = false;
        worst_drop = std::max(worst_drop, drop);
      }
    }
    monotone += ok;
    if (k1 >= 8 && k2 >= 8 && ratio >= 3) {
      ++separated;
      recovered += !fit.degenerate && std::fabs(fit.mean1() - mean1) <= 0.1 * mean1 &&
                   std::fabs(fit.mean2() - mean2) <= 0.1 * mean2;
    }
  }
  std::string d = std::to_string(monotone) + "/100 non-decreasing traces";
  if (worst_drop > 0) d += " (largest drop " + fmt("%.3g", worst_drop) + ")";
  d += ", " + std::to_string(recovered) + "/" + std::to_string(separated) + " separated mixtures recovered";
  return {monotone == 100 && recovered == separated && separated > 0, d};
}

// 10. Light score at rank 75 vs rank 5 on 70% white / 30% black composites.
Outcome light_percentile() {
  std::vector<ImageRecord> images = base_set();
  Rng rng(0x11647);
  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const std::size_t count = contamination_count(0.12, images.size());
  std::set<std::string> positives;
  for (std::size_t k = 0; k < count; ++k) {
    ImageRecord& img = images[order[k]];
    const std::size_t dark = static_cast<std::size_t>(std::llround(0.3 * img.pixel_count()));
    for (std::size_t p = 0; p < img.pixel_count(); ++p)
      for (int c = 0; c < 3; ++c) img.pixels[p * 3 + c] = p < dark ? 0 : 255;
    positives.insert(img.id);
  }
  auto f1_at = [&](int rank) {
    AuditOptions opt;
    opt.issues = {IssueKind::kLight};
    opt.light = LightScoreMode::with_rank(rank);
    opt.default_method = ThresholdMethod::kLi;
    const auto r = audit_dataset(images, opt);
    std::set<std::string> flagged;
    for (const auto& [id, kinds] : r.table.flags)
      if (kinds.count(IssueKind::kLight)) flagged.insert(id);
    return app::compare_sets(flagged, positives).f1;
  };
  const double f75 = f1_at(75), f5 = f1_at(5);
  return {f75 >= 0.9 && f5 <= 0.2, "rank 75 F1 " + fmt("%.4f", f75) + " (>=0.9), rank 5 F1 " + fmt("%.4f", f5) +
                                       " (<=0.2)"};
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double limit_seconds;  // 0 = no runtime bound
  };
  const std::vector<Criterion> criteria = {
      {"threshold oracle equivalence", threshold_oracles, 30},
      {"clustering oracle equivalence", clustering_oracle, 30},
      {"single-perturbation benchmark", single_suite, 300},
      {"dual-perturbation ordering", dual_suite, 0},
      {"near-duplicate benchmark", neardup_suite, 120},
      {"grayscale fix", grayscale_fix, 0},
      {"MET two-spike failure", met_failure, 0},
      {"bench determinism", determinism, 0},
      {"GMM sanity", gmm_sanity, 0},
      {"light percentile improvement", light_percentile, 0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].limit_seconds > 0 && secs >= criteria[i].limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", criteria[i].limit_seconds) + " s budget";
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
