#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace textnet {

using Embedding = std::vector<double>;

/// Source of sentence vectors. Implementations are read-only after
/// construction and deterministic for a fixed configuration.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;

  /// One vector per text, in input order. Throws ProviderError.
  virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) const = 0;

  /// Whether single tokens can be embedded meaningfully (word-vector mode).
  virtual bool supports_tokens() const { return false; }
};

/// Cosine similarity clamped to [-1, 1]; 0 when either vector has zero norm.
/// Throws DataError on a length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

/// Hashed character-trigram embedding of the lowercased text, L2-normalised.
Embedding toy_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

class ToyProvider final : public EmbeddingProvider {
 public:
  /// dim must be at least 8.
  ToyProvider(std::size_t dim, std::uint64_t seed);

  std::string name() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;
  bool supports_tokens() const override { return true; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Precomputed vectors keyed by the SHA-256 of the sentence text.
///
/// File layout (one JSON object per line):
///   {"dim": 512, "provider_name": "..."}            header, first line
///   {"text_sha256": "<hex>", "vector": [..dim..]}    one per text
class FileProvider final : public EmbeddingProvider {
 public:
  explicit FileProvider(const std::filesystem::path& path);

  std::string name() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;
  std::size_t size() const { return vectors_.size(); }

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Embedding> vectors_;
};

void write_vector_file(const std::filesystem::path& path, std::string_view provider_name, std::size_t dim,
                       std::span<const std::string> texts, std::span<const Embedding> vectors);

/// Client for an embedding service: POST /embed {"texts": [...]} returning
/// {"vectors": [[...]], "dim": n}; GET /health reports {"status","model","dim"}.
class HttpProvider final : public EmbeddingProvider {
 public:
  struct Options {
    std::string base_url;  // e.g. http://127.0.0.1:8000
    std::chrono::milliseconds timeout{30000};
    std::size_t batch_size = 256;
  };

  explicit HttpProvider(Options options);

  std::string name() const override;
  /// Queries /health on first use.
  std::size_t dim() const override;
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;
  bool supports_tokens() const override { return true; }

 private:
  Options options_;
  mutable std::mutex mutex_;
  mutable std::optional<std::size_t> dim_;
};

/// Builds a provider from "toy:<dim>,<seed>", "file:<path>", "http:<url>" or a
/// bare http(s) URL.
/// The TEXTNET_PROVIDER_URL environment variable, when set, replaces the URL
/// of an http provider.
std::unique_ptr<EmbeddingProvider> make_provider(std::string_view spec,
                                                 std::chrono::milliseconds http_timeout = std::chrono::seconds(30));

}  // namespace textnet
