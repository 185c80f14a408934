#include <benchmark/benchmark.h>

#include <vector>

#include "pixelaudit/audit.hpp"
#include "pixelaudit/dedup.hpp"
#include "pixelaudit/imaging.hpp"
#include "pixelaudit/perturb.hpp"
#include "pixelaudit/random.hpp"
#include "pixelaudit/synth.hpp"
#include "pixelaudit/threshold.hpp"

using namespace pixelaudit;

namespace {

std::vector<double> mixed_scores(std::size_t n) {
  Rng rng(7);
  std::vector<double> s(n);
  for (auto& v : s) v = rng.uniform() < 0.12 ? rng.uniform(0.0, 0.2) : rng.uniform(0.4, 1.0);
  return s;
}

void BM_Phash(benchmark::State& state) {
  const ImageRecord img = synthesize_image("a", 1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(phash64(img));
}
BENCHMARK(BM_Phash)->Arg(32)->Arg(256);

void BM_ScoreBlurry(benchmark::State& state) {
  const LumaPlane luma = to_luma(synthesize_image("a", 2, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(score_blurry(luma));
}
BENCHMARK(BM_ScoreBlurry)->Arg(32)->Arg(256);

void BM_Threshold(benchmark::State& state) {
  const auto scores = mixed_scores(1000);
  ThresholdSettings settings;
  settings.method = static_cast<ThresholdMethod>(state.range(0));
  settings.ght = {100, 8, 0, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_threshold(scores, IssueKind::kDark, settings));
  }
  state.SetLabel(to_string(settings.method));
}
BENCHMARK(BM_Threshold)->DenseRange(1, 7);

void BM_SingleLinkage(benchmark::State& state) {
  Rng rng(3);
  std::vector<PerceptualHash> hashes(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < hashes.size(); ++i) hashes[i] = {std::to_string(i), rng.next()};
  for (auto _ : state) benchmark::DoNotOptimize(cluster_single_linkage(hashes, 10));
}
BENCHMARK(BM_SingleLinkage)->Arg(200)->Arg(1000);

void BM_Blur(benchmark::State& state) {
  const ImageRecord img = synthesize_image("a", 4);
  const auto filter = static_cast<BlurFilter>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(blur(img, filter, 11));
  state.SetLabel(to_string(filter));
}
BENCHMARK(BM_Blur)->DenseRange(0, 2);

void BM_AuditDataset(benchmark::State& state) {
  const auto images = synthesize_dataset(static_cast<std::size_t>(state.range(0)), 5);
  AuditOptions options;
  for (auto _ : state) benchmark::DoNotOptimize(audit_dataset(images, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AuditDataset)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
