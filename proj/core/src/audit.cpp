#include "pixelaudit/audit.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "detail/parallel.hpp"
#include "pixelaudit/embedding.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"

namespace pixelaudit {

namespace {

struct ImageScores {
  std::map<IssueKind, double> scores;
  std::optional<PerceptualHash> hash;
  std::optional<ContentDigest> digest;
  std::string error;
};

ContentDigest digest_of(const ImageRecord& image, bool file_bytes) {
  if (!file_bytes || image.source_path.empty()) return content_digest(image);
  std::ifstream in(image.source_path, std::ios::binary);
  if (!in) throw Error("cannot read '" + image.source_path + "'");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return file_digest(bytes, image.id);
}

bool wants_any(const std::set<IssueKind>& issues, std::initializer_list<IssueKind> kinds) {
  return std::any_of(kinds.begin(), kinds.end(), [&](IssueKind k) { return issues.count(k) > 0; });
}

ImageScores score_image(const ImageRecord& image, const AuditOptions& opt) {
  ImageScores out;
  const auto& want = opt.issues;
  validate(image);
  if (wants_any(want, {IssueKind::kLight, IssueKind::kDark, IssueKind::kBlurry,
                       IssueKind::kLowInformation})) {
    const LumaPlane luma = to_luma(image, opt.luma_formula);
    if (wants_any(want, {IssueKind::kLight, IssueKind::kDark})) {
      const BrightnessStats stats = brightness_stats(luma, kBrightnessRanks);
      if (want.count(IssueKind::kLight)) out.scores[IssueKind::kLight] = score_light(stats, opt.light);
      if (want.count(IssueKind::kDark)) out.scores[IssueKind::kDark] = score_dark(stats);
    }
    if (want.count(IssueKind::kBlurry)) out.scores[IssueKind::kBlurry] = score_blurry(luma);
    if (want.count(IssueKind::kLowInformation)) {
      out.scores[IssueKind::kLowInformation] = score_low_information(luma);
    }
  }
  if (want.count(IssueKind::kOddAspectRatio)) {
    out.scores[IssueKind::kOddAspectRatio] = score_odd_aspect_ratio(image.width, image.height);
  }
  if (want.count(IssueKind::kGrayscale)) out.scores[IssueKind::kGrayscale] = score_grayscale(image);
  if (want.count(IssueKind::kNearDuplicate)) out.hash = phash64(image);
  if (wants_any(want, {IssueKind::kExactDuplicate, IssueKind::kNearDuplicate})) {
    out.digest = digest_of(image, opt.exact_by_file_bytes);
  }
  return out;
}

}  // namespace

ThresholdMethod AuditOptions::method_for(IssueKind kind) const {
  auto it = methods.find(kind);
  return it == methods.end() ? default_method : it->second;
}

ThresholdSettings AuditOptions::settings_for(IssueKind kind) const {
  ThresholdSettings s;
  s.method = method_for(kind);
  s.ght = ght;
  s.mve_window = mve_window;
  s.fixed_overrides = fixed_thresholds;
  return s;
}

void apply_flags(ScoreTable& table, IssueKind kind, const ThresholdDecision& decision) {
  for (const auto& id : flag_by_threshold(table.column(kind), decision)) {
    table.flags[id].insert(kind);
  }
}

AuditResult audit_dataset(std::span<const ImageRecord> images, const AuditOptions& options) {
  AuditResult result;

  // Canonical order makes every later stage independent of input order.
  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return images[a].id < images[b].id; });

  std::vector<ImageScores> per_image(order.size());
  detail::parallel_for(order.size(), options.workers, [&](std::size_t k) {
    try {
      per_image[k] = score_image(images[order[k]], options);
    } catch (const std::exception& e) {
      per_image[k].error = e.what();
    }
  });

  std::vector<ImageSize> sizes;
  std::vector<PerceptualHash> hashes;
  std::vector<ContentDigest> digests;
  std::map<std::string, ContentDigest> digest_by_id;
  std::vector<ImageRecord> valid_images;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ImageRecord& image = images[order[k]];
    const ImageScores& s = per_image[k];
    if (!s.error.empty()) {
      result.invalid.emplace_back(image.id, s.error);
      continue;
    }
    result.ids.push_back(image.id);
    result.table.rows[image.id];
    for (const auto& [kind, score] : s.scores) result.table.set_score(image.id, kind, score);
    sizes.push_back({image.id, image.width, image.height});
    if (s.hash) hashes.push_back(*s.hash);
    if (s.digest) {
      digests.push_back(*s.digest);
      digest_by_id.emplace(image.id, *s.digest);
    }
    if (options.semantic_enabled && options.issues.count(IssueKind::kNearDuplicate)) {
      valid_images.push_back(image);
    }
  }

  if (options.issues.count(IssueKind::kOddSize) && !sizes.empty()) {
    const OddSizeResult odd = score_odd_size(sizes, options.iqr_factor);
    for (const auto& [id, score] : odd.scores) result.table.set_score(id, IssueKind::kOddSize, score);
    result.size_stats = odd.stats;
  }

  if (options.issues.count(IssueKind::kExactDuplicate)) {
    result.exact_clusters = cluster_exact(digests);
    for (const auto& [id, score] : duplicate_scores(result.exact_clusters, result.ids)) {
      result.table.set_score(id, IssueKind::kExactDuplicate, score);
    }
  }
  if (options.issues.count(IssueKind::kNearDuplicate)) {
    DuplicateClusterSet pixel = cluster_single_linkage(hashes, options.dedup_cutoff, &digest_by_id);
    if (options.semantic_enabled) {
      auto provider = make_provider(options.semantic_provider);
      SemanticClusters semantic =
          cluster_semantic(valid_images, *provider, options.semantic_cutoff);
      result.embedding_failures = semantic.failed;
      pixel = merge_duplicates(pixel, semantic.clusters);
    }
    result.near_clusters = pixel;
    for (const auto& [id, score] : duplicate_scores(result.near_clusters, result.ids)) {
      result.table.set_score(id, IssueKind::kNearDuplicate, score);
    }
  }

  for (IssueKind kind : kAllIssueKinds) {
    if (!options.issues.count(kind)) continue;
    KindOutcome& outcome = result.outcomes[kind];
    const auto column = result.table.column(kind);
    std::vector<double> scores;
    scores.reserve(column.size());
    for (const auto& [id, score] : column) scores.push_back(score);
    if (scores.empty()) {
      outcome.error = "no scores";
      continue;
    }
    try {
      outcome.decision = select_threshold(scores, kind, options.settings_for(kind));
      apply_flags(result.table, kind, *outcome.decision);
    } catch (const Error& e) {
      outcome.error = e.what();
    }
  }
  return result;
}

}  // namespace pixelaudit
