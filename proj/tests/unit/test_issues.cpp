#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/issues.hpp"
#include "pixelaudit/perturb.hpp"
#include "pixelaudit/random.hpp"
#include "pixelaudit/synth.hpp"

using namespace pixelaudit;

namespace {

LumaPlane plane(int w, int h, std::vector<double> v) { return LumaPlane{w, h, std::move(v)}; }

BrightnessStats stats_of(const LumaPlane& p) { return brightness_stats(p, kBrightnessRanks); }

// n pixels, the first `white` of them 255, the rest 0.
LumaPlane two_level(int n, int white) {
  std::vector<double> v(n, 0.0);
  for (int i = 0; i < white; ++i) v[i] = 255;
  return plane(n, 1, v);
}

}  // namespace

TEST(Dark, Extremes) {
  EXPECT_EQ(score_dark(stats_of(two_level(10, 0))), 0.0);
  EXPECT_EQ(score_dark(stats_of(two_level(10, 10))), 1.0);
}

TEST(Dark, FivePercentWhiteMatchesSortOracle) {
  const LumaPlane p = two_level(200, 10);
  EXPECT_NEAR(score_dark(stats_of(p)), oracle::percentile(p.values, 99) / 255.0, 1e-12);
  EXPECT_NEAR(score_dark(stats_of(p)), 1.0, 1e-12);
}

TEST(Light, ExtremesAtEveryRank) {
  for (int r : kLightRanks) {
    const auto mode = LightScoreMode::with_rank(r);
    EXPECT_EQ(score_light(stats_of(two_level(10, 10)), mode), 0.0);
    EXPECT_EQ(score_light(stats_of(two_level(10, 0)), mode), 1.0);
  }
  EXPECT_THROW(LightScoreMode::with_rank(20), std::invalid_argument);
}

TEST(Light, CompositeSeparatesRanks) {
  const LumaPlane p = two_level(100, 70);
  EXPECT_EQ(score_light(stats_of(p), LightScoreMode::with_rank(75)), 0.0);
  EXPECT_EQ(score_light(stats_of(p), LightScoreMode::with_rank(5)), 1.0);
}

TEST(Light, MissingRankThrows) {
  const std::vector<int> only99{99};
  const auto s = brightness_stats(two_level(4, 2), only99);
  EXPECT_THROW(score_light(s), MissingPercentile);
}

TEST(DarkLight, MonotoneUnderBrightening) {
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    std::vector<double> v(50);
    for (auto& x : v) x = rng.uniform(0, 120);
    const double c = rng.uniform(1.0, 2.0);
    std::vector<double> w = v;
    for (auto& x : w) x *= c;
    const auto a = stats_of(plane(50, 1, v)), b = stats_of(plane(50, 1, w));
    EXPECT_GE(score_dark(b), score_dark(a));
    EXPECT_LE(score_light(b), score_light(a));
  }
}

TEST(Blurry, ConstantAndCheckerboard) {
  EXPECT_EQ(score_blurry(plane(4, 4, std::vector<double>(16, 60))), 0.0);
  std::vector<double> v(64);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) v[y * 8 + x] = (x + y) % 2 ? 255 : 0;
  EXPECT_GE(score_blurry(plane(8, 8, v)), 1 - std::exp(-127.5 / 100));
  EXPECT_GE(score_blurry(plane(8, 8, v)), 0.72);
}

TEST(Blurry, UsesHistogramStdBelowThreeByThree) {
  const LumaPlane p = plane(2, 1, {0, 255});
  EXPECT_NEAR(score_blurry(p), 1 - std::exp(-127.5 / 100), 1e-12);
  EXPECT_NEAR(histogram_std(luma_histogram(p)), 127.5, 1e-12);
}

TEST(Blurry, GaussianBlurLowersScoreOnSynthImages) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ImageRecord img = synthesize_image("s", s);
    const ImageRecord soft = blur(img, BlurFilter::kGaussian, 5);
    EXPECT_LT(score_blurry(to_luma(soft)), score_blurry(to_luma(img))) << "seed " << s;
  }
}

TEST(LowInformation, EntropyExtremes) {
  EXPECT_EQ(score_low_information(plane(3, 3, std::vector<double>(9, 12))), 0.0);
  std::vector<double> all(256);
  for (int i = 0; i < 256; ++i) all[i] = i;
  EXPECT_NEAR(score_low_information(plane(256, 1, all)), 1.0, 1e-12);
  // Two equally full bins carry one bit.
  EXPECT_NEAR(score_low_information(plane(2, 1, {0, 255})), 1.0 / 8, 1e-12);
}

TEST(LowInformation, CanvasScoresBelowSource) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ImageRecord img = synthesize_image("s", s);
    EXPECT_LT(score_low_information(to_luma(make_low_info(img))),
              score_low_information(to_luma(img)));
  }
}

TEST(OddSize, AllEqualIsDegenerate) {
  std::vector<ImageSize> d(5, ImageSize{"", 32, 32});
  for (int i = 0; i < 5; ++i) d[i].id = "i" + std::to_string(i);
  const auto r = score_odd_size(d);
  for (const auto& [id, s] : r.scores) EXPECT_EQ(s, 1.0);
}

TEST(OddSize, SmallOutliersGiveTwoScores) {
  std::vector<ImageSize> d;
  for (int i = 0; i < 20; ++i) d.push_back({"i" + std::to_string(i), i < 3 ? 7 : 32, i < 3 ? 7 : 32});
  const auto r = score_odd_size(d);
  std::set<double> distinct;
  for (const auto& [id, s] : r.scores) distinct.insert(s);
  EXPECT_EQ(distinct, (std::set<double>{0.0, 1.0}));
}

TEST(OddSize, IqrArithmetic) {
  std::vector<ImageSize> d;
  for (int s : {30, 31, 32, 33, 34, 100}) d.push_back({"s" + std::to_string(s), s, s});
  const auto r = score_odd_size(d, 3.0);
  std::vector<double> sizes{30, 31, 32, 33, 34, 100};
  const double q1 = oracle::percentile(sizes, 25), q3 = oracle::percentile(sizes, 75);
  EXPECT_DOUBLE_EQ(r.stats.q1, q1);
  EXPECT_DOUBLE_EQ(r.stats.q3, q3);
  EXPECT_DOUBLE_EQ(r.stats.min_threshold, q1 - 3 * (q3 - q1));
  EXPECT_DOUBLE_EQ(r.stats.max_threshold, q3 + 3 * (q3 - q1));
  EXPECT_EQ(r.scores.at("s100"), 0.0);
  for (int s : {30, 31, 32, 33, 34}) EXPECT_GT(r.scores.at("s" + std::to_string(s)), 0.5);
  EXPECT_THROW(score_odd_size(std::vector<ImageSize>{}), EmptyDataset);
}

TEST(OddAspectRatio, FormulaAndSymmetry) {
  EXPECT_EQ(score_odd_aspect_ratio(32, 32), 1.0);
  EXPECT_EQ(score_odd_aspect_ratio(64, 16), 0.25);
  for (int w = 1; w < 40; w += 3)
    for (int h = 1; h < 40; h += 5) EXPECT_EQ(score_odd_aspect_ratio(w, h), score_odd_aspect_ratio(h, w));
}

TEST(Grayscale, ModeAndChannelCheck) {
  EXPECT_EQ(score_grayscale(ImageRecord::blank("l", 3, 3, ColorMode::kLuma, 9)), 0.0);
  ImageRecord img = ImageRecord::blank("g", 3, 3, ColorMode::kRgb, 10);
  EXPECT_EQ(score_grayscale(img), 0.0);
  img.at(1, 1, 2) = 11;
  EXPECT_EQ(score_grayscale(img), 1.0);
}

TEST(BrightnessMean, ChannelMeans) {
  EXPECT_EQ(brightness_mean(ImageRecord::blank("w", 2, 2, ColorMode::kRgb, 255)), 1.0);
  ImageRecord red = ImageRecord::blank("r", 2, 2, ColorMode::kRgb);
  for (int i = 0; i < 4; ++i) red.pixels[3 * i] = 255;
  EXPECT_NEAR(brightness_mean(red), 1.0 / 3, 1e-12);
  ImageRecord two = ImageRecord::blank("t", 2, 1, ColorMode::kRgb);
  for (int c = 0; c < 3; ++c) two.at(1, 0, c) = 255;
  EXPECT_DOUBLE_EQ(brightness_mean(two), 0.5);
}

TEST(Scores, AllInUnitInterval) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const ImageRecord img = synthesize_image("s", s);
    const LumaPlane l = to_luma(img);
    const auto st = stats_of(l);
    for (double v : {score_dark(st), score_light(st), score_blurry(l), score_low_information(l),
                     score_grayscale(img), brightness_mean(img)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}
