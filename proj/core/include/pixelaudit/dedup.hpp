#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pixelaudit/embedding.hpp"
#include "pixelaudit/image.hpp"
#include "pixelaudit/issues.hpp"

namespace pixelaudit {

struct ContentDigest {
  std::string image_id;
  std::array<std::uint8_t, 16> digest{};

  std::string hex() const;
  friend bool operator==(const ContentDigest& a, const ContentDigest& b) {
    return a.digest == b.digest;
  }
};

// MD5 over width, height (uint32 little-endian), a mode tag byte ('R' or 'L')
// and the raw samples, so re-encoded copies of the same pixels collide.
ContentDigest content_digest(const ImageRecord& image);
// MD5 of the encoded file bytes, for byte-level audits.
ContentDigest file_digest(std::span<const std::uint8_t> bytes, const std::string& id);

struct PerceptualHash {
  std::string image_id;
  std::uint64_t bits = 0;
};

// HSP luma -> bilinear 32x32 -> orthonormal 2-D DCT-II -> 8x8 low-frequency
// block -> bit k set iff coefficient k exceeds the median of the 63 AC terms.
// Bit k (LSB = 0) holds block coefficient k in row-major order.
PerceptualHash phash64(const ImageRecord& image);

int hamming(std::uint64_t a, std::uint64_t b);
inline int hamming(const PerceptualHash& a, const PerceptualHash& b) {
  return hamming(a.bits, b.bits);
}

enum class Provenance { kExact, kPixelNear, kSemanticNear, kMerged };
std::string to_string(Provenance provenance);

struct DuplicateCluster {
  std::vector<std::string> members;  // sorted, size >= 2
  Provenance provenance = Provenance::kPixelNear;

  friend bool operator==(const DuplicateCluster&, const DuplicateCluster&) = default;
};

// Disjoint groups, kept in canonical order (members sorted, clusters sorted by
// first member) so equal partitions compare equal.
struct DuplicateClusterSet {
  std::vector<DuplicateCluster> clusters;

  void canonicalize();
  std::size_t member_count() const;
  friend bool operator==(const DuplicateClusterSet&, const DuplicateClusterSet&) = default;
};

// One agglomeration step of the dendrogram: merges the clusters containing
// items `a` and `b` at the given Hamming distance.
struct LinkageStep {
  std::size_t a = 0;
  std::size_t b = 0;
  int distance = 0;
};

// Single-linkage dendrogram (n-1 steps, non-decreasing distance) built from
// the minimum spanning tree of the Hamming distance graph.
std::vector<LinkageStep> single_linkage(std::span<const PerceptualHash> hashes);

// Cuts the dendrogram at distance <= cutoff. Groups whose members all share a
// content digest are labeled EXACT when digests are supplied.
DuplicateClusterSet cluster_single_linkage(std::span<const PerceptualHash> hashes,
                                           int cutoff = 10,
                                           const std::map<std::string, ContentDigest>* digests = nullptr);

// Groups images with identical content digests.
DuplicateClusterSet cluster_exact(std::span<const ContentDigest> digests);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct SemanticClusters {
  DuplicateClusterSet clusters;
  std::vector<std::string> failed;  // images the provider could not embed
};

// Connected components of the graph with edges where cosine similarity
// exceeds the cutoff; exact pairwise search.
SemanticClusters cluster_semantic(std::span<const ImageRecord> images, EmbeddingProvider& provider,
                                  double similarity_cutoff = 0.96);

// Union of both edge sets. Components drawing on clusters of different
// provenance become MERGED.
DuplicateClusterSet merge_duplicates(const DuplicateClusterSet& pixel,
                                     const DuplicateClusterSet& semantic);

// 1/n for members of a size-n cluster, 1 for everyone else.
std::map<std::string, double> duplicate_scores(const DuplicateClusterSet& clusters,
                                               std::span<const std::string> all_ids);

enum class RepresentativePolicy { kFirstById, kHighestMeanQuality };

// Kept id per cluster index. HIGHEST_MEAN_QUALITY averages each member's
// non-duplicate scores in `quality`; ties go to the smallest id.
std::vector<std::string> select_representatives(const DuplicateClusterSet& clusters,
                                                RepresentativePolicy policy,
                                                const ScoreTable* quality = nullptr);

}  // namespace pixelaudit
