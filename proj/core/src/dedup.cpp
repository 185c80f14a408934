#include "pixelaudit/dedup.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <openssl/evp.h>

#include "detail/union_find.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"

namespace pixelaudit {
namespace {

std::array<std::uint8_t, 16> md5(std::span<const std::uint8_t> header,
                                 std::span<const std::uint8_t> body) {
  std::array<std::uint8_t, 16> out{};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("cannot allocate MD5 context");
  unsigned int len = 0;
  const bool ok = EVP_DigestInit_ex(ctx, EVP_md5(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, body.data(), body.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || len != out.size()) throw Error("MD5 digest failed");
  return out;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Orthonormal DCT-II basis rows for a 32-point transform.
const std::array<std::array<double, 32>, 8>& dct_rows() {
  static const auto rows = [] {
    std::array<std::array<double, 32>, 8> r{};
    for (int u = 0; u < 8; ++u) {
      const double norm = u == 0 ? std::sqrt(1.0 / 32.0) : std::sqrt(2.0 / 32.0);
      for (int x = 0; x < 32; ++x) {
        r[u][x] = norm * std::cos(std::numbers::pi * (2 * x + 1) * u / 64.0);
      }
    }
    return r;
  }();
  return rows;
}

DuplicateClusterSet from_groups(const std::vector<std::vector<std::size_t>>& groups,
                                const std::vector<std::string>& ids, Provenance provenance) {
  DuplicateClusterSet set;
  for (const auto& g : groups) {
    DuplicateCluster c;
    c.provenance = provenance;
    for (std::size_t i : g) c.members.push_back(ids[i]);
    set.clusters.push_back(std::move(c));
  }
  set.canonicalize();
  return set;
}

}  // namespace

std::string ContentDigest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

ContentDigest content_digest(const ImageRecord& image) {
  validate(image);
  std::vector<std::uint8_t> header;
  put_u32(header, static_cast<std::uint32_t>(image.width));
  put_u32(header, static_cast<std::uint32_t>(image.height));
  header.push_back(image.mode == ColorMode::kRgb ? 'R' : 'L');
  return ContentDigest{image.id, md5(header, image.pixels)};
}

ContentDigest file_digest(std::span<const std::uint8_t> bytes, const std::string& id) {
  return ContentDigest{id, md5({}, bytes)};
}

PerceptualHash phash64(const ImageRecord& image) {
  const LumaPlane small = resize(to_luma(image, LumaFormula::kHsp), 32, 32, ResizeMethod::kBilinear);
  const auto& rows = dct_rows();

  // Separable transform restricted to the 8x8 low-frequency block.
  std::array<std::array<double, 32>, 8> partial{};  // [v][y]: transform along x
  for (int v = 0; v < 8; ++v) {
    for (int y = 0; y < 32; ++y) {
      double acc = 0.0;
      for (int x = 0; x < 32; ++x) acc += rows[v][x] * small.at(x, y);
      partial[v][y] = acc;
    }
  }
  std::array<double, 64> block{};
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double acc = 0.0;
      for (int y = 0; y < 32; ++y) acc += rows[u][y] * partial[v][y];
      block[u * 8 + v] = acc;  // row u = vertical frequency
    }
  }

  std::array<double, 63> ac{};
  std::copy(block.begin() + 1, block.end(), ac.begin());
  std::nth_element(ac.begin(), ac.begin() + 31, ac.end());
  const double median = ac[31];

  PerceptualHash hash{image.id, 0};
  for (int k = 0; k < 64; ++k) {
    if (block[k] > median) hash.bits |= std::uint64_t{1} << k;
  }
  return hash;
}

int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::kExact: return "EXACT";
    case Provenance::kPixelNear: return "PIXEL_NEAR";
    case Provenance::kSemanticNear: return "SEMANTIC_NEAR";
    case Provenance::kMerged: return "MERGED";
  }
  return "?";
}

void DuplicateClusterSet::canonicalize() {
  for (auto& c : clusters) std::sort(c.members.begin(), c.members.end());
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    return a.members.front() < b.members.front();
  });
}

std::size_t DuplicateClusterSet::member_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.members.size();
  return n;
}

std::vector<LinkageStep> single_linkage(std::span<const PerceptualHash> hashes) {
  const std::size_t n = hashes.size();
  std::vector<LinkageStep> edges;
  if (n < 2) return edges;

  // Prim's algorithm on the complete Hamming graph.
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> best(n, kInf);
  std::vector<std::size_t> via(n, 0);
  std::vector<bool> in_tree(n, false);
  in_tree[0] = true;
  std::size_t current = 0;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const int d = hamming(hashes[current], hashes[j]);
      if (d < best[j]) {
        best[j] = d;
        via[j] = current;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    in_tree[next] = true;
    edges.push_back(LinkageStep{via[next], next, best[next]});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const LinkageStep& a, const LinkageStep& b) { return a.distance < b.distance; });
  return edges;
}

DuplicateClusterSet cluster_single_linkage(std::span<const PerceptualHash> hashes, int cutoff,
                                           const std::map<std::string, ContentDigest>* digests) {
  if (cutoff < 0 || cutoff > 64) throw std::invalid_argument("Hamming cutoff must be in [0, 64]");
  const std::size_t n = hashes.size();
  detail::UnionFind uf(n);
  for (const LinkageStep& step : single_linkage(hashes)) {
    if (step.distance > cutoff) break;
    uf.unite(step.a, step.b);
  }

  DuplicateClusterSet set;
  for (const auto& group : uf.groups(2)) {
    DuplicateCluster c;
    c.provenance = Provenance::kPixelNear;
    for (std::size_t i : group) c.members.push_back(hashes[i].image_id);
    if (digests != nullptr) {
      bool same = true;
      const auto first = digests->find(c.members.front());
      for (const auto& id : c.members) {
        const auto it = digests->find(id);
        if (first == digests->end() || it == digests->end() || !(it->second == first->second)) {
          same = false;
          break;
        }
      }
      if (same) c.provenance = Provenance::kExact;
    }
    set.clusters.push_back(std::move(c));
  }
  set.canonicalize();
  return set;
}

DuplicateClusterSet cluster_exact(std::span<const ContentDigest> digests) {
  std::map<std::array<std::uint8_t, 16>, std::vector<std::string>> groups;
  for (const auto& d : digests) groups[d.digest].push_back(d.image_id);
  DuplicateClusterSet set;
  for (auto& [digest, ids] : groups) {
    if (ids.size() >= 2) set.clusters.push_back(DuplicateCluster{std::move(ids), Provenance::kExact});
  }
  set.canonicalize();
  return set;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;  // both featureless
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SemanticClusters cluster_semantic(std::span<const ImageRecord> images, EmbeddingProvider& provider,
                                  double similarity_cutoff) {
  if (!(similarity_cutoff > 0.0 && similarity_cutoff <= 1.0)) {
    throw std::invalid_argument("similarity cutoff must be in (0, 1]");
  }
  SemanticClusters result;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> vectors;
  for (const auto& image : images) {
    try {
      vectors.push_back(provider.embed(image));
      ids.push_back(image.id);
    } catch (const ProviderFailure&) {
      result.failed.push_back(image.id);
    }
  }
  detail::UnionFind uf(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (cosine_similarity(vectors[i], vectors[j]) > similarity_cutoff) uf.unite(i, j);
    }
  }
  result.clusters = from_groups(uf.groups(2), ids, Provenance::kSemanticNear);
  return result;
}

DuplicateClusterSet merge_duplicates(const DuplicateClusterSet& pixel,
                                     const DuplicateClusterSet& semantic) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> ids;
  for (const auto* set : {&pixel, &semantic}) {
    for (const auto& c : set->clusters) {
      for (const auto& id : c.members) {
        if (index.emplace(id, ids.size()).second) ids.push_back(id);
      }
    }
  }
  detail::UnionFind uf(ids.size());
  for (const auto* set : {&pixel, &semantic}) {
    for (const auto& c : set->clusters) {
      for (std::size_t k = 1; k < c.members.size(); ++k) {
        uf.unite(index[c.members[0]], index[c.members[k]]);
      }
    }
  }
  std::map<std::size_t, std::set<Provenance>> sources;
  for (const auto* set : {&pixel, &semantic}) {
    for (const auto& c : set->clusters) sources[uf.find(index[c.members[0]])].insert(c.provenance);
  }

  DuplicateClusterSet out;
  for (const auto& group : uf.groups(2)) {
    DuplicateCluster c;
    const auto& prov = sources[uf.find(group.front())];
    c.provenance = prov.size() == 1 ? *prov.begin() : Provenance::kMerged;
    for (std::size_t i : group) c.members.push_back(ids[i]);
    out.clusters.push_back(std::move(c));
  }
  out.canonicalize();
  return out;
}

std::map<std::string, double> duplicate_scores(const DuplicateClusterSet& clusters,
                                               std::span<const std::string> all_ids) {
  std::map<std::string, double> scores;
  for (const auto& id : all_ids) scores[id] = 1.0;
  for (const auto& c : clusters.clusters) {
    const double s = 1.0 / static_cast<double>(c.members.size());
    for (const auto& id : c.members) scores[id] = s;
  }
  return scores;
}

std::vector<std::string> select_representatives(const DuplicateClusterSet& clusters,
                                                RepresentativePolicy policy,
                                                const ScoreTable* quality) {
  std::vector<std::string> kept;
  for (const auto& c : clusters.clusters) {
    if (c.members.empty()) throw std::invalid_argument("empty duplicate cluster");
    std::vector<std::string> members = c.members;
    std::sort(members.begin(), members.end());
    if (policy == RepresentativePolicy::kFirstById || quality == nullptr) {
      kept.push_back(members.front());
      continue;
    }
    std::string best = members.front();
    double best_quality = -1.0;
    for (const auto& id : members) {
      double sum = 0.0;
      int n = 0;
      if (const auto row = quality->rows.find(id); row != quality->rows.end()) {
        for (const auto& [kind, score] : row->second) {
          if (is_duplicate(kind)) continue;
          sum += score;
          ++n;
        }
      }
      const double mean = n > 0 ? sum / n : 0.0;
      if (mean > best_quality) {
        best_quality = mean;
        best = id;
      }
    }
    kept.push_back(best);
  }
  return kept;
}

}  // namespace pixelaudit
