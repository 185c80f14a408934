#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pixelaudit/image.hpp"

namespace pixelaudit {

// Pluggable feature extractor for semantic near-duplicate search.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  // Throws ProviderFailure when the image cannot be embedded.
  virtual std::vector<double> embed(const ImageRecord& image) = 0;
};

// 8x8 bilinear thumbnail of HSP luma, mean-subtracted and unit-normalized.
// Constant images embed to the zero vector.
class DownscaleEmbedding final : public EmbeddingProvider {
 public:
  std::string name() const override { return "downscale"; }
  int dimension() const override { return 64; }
  std::vector<double> embed(const ImageRecord& image) override;
};

// Runs an external command once and talks to it line by line: each request
// is the image's source path, each reply a line of whitespace-separated
// numbers. Lets model-backed embeddings plug in without linking a runtime.
class ProcessEmbedding final : public EmbeddingProvider {
 public:
  // dimension 0 means "take it from the first reply".
  explicit ProcessEmbedding(std::string command, int dimension = 0);
  ~ProcessEmbedding() override;
  ProcessEmbedding(const ProcessEmbedding&) = delete;
  ProcessEmbedding& operator=(const ProcessEmbedding&) = delete;

  std::string name() const override { return "process"; }
  int dimension() const override { return dimension_; }
  std::vector<double> embed(const ImageRecord& image) override;

 private:
  void start();
  void stop();

  std::string command_;
  int dimension_ = 0;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
};

using ProviderFactory = std::function<std::unique_ptr<EmbeddingProvider>(const std::string& arg)>;

// Registers a provider under a name; later registrations replace earlier ones.
void register_provider(const std::string& name, ProviderFactory factory);

// "downscale", "process:<shell command>", or any registered "name[:arg]".
std::unique_ptr<EmbeddingProvider> make_provider(const std::string& spec);

}  // namespace pixelaudit
