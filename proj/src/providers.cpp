#include "textnet/providers.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "textnet/error.hpp"
#include "textnet/io.hpp"
#include "textnet/kernels.hpp"

namespace textnet {

using nlohmann::json;

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const double na = kernels::dot(a, a);
  const double nb = kernels::dot(b, b);
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const double c = kernels::dot(a, b) / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ splitmix64(seed);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(h);
}

}  // namespace

Embedding toy_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  Embedding v(dim, 0.0);
  // Boundary markers let 1- and 2-byte texts still produce trigrams.
  std::string padded = "\x02";
  for (unsigned char c : text) padded += static_cast<char>(std::tolower(c));
  padded += '\x03';
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a(std::string_view(padded).substr(i, 3), seed);
    const std::size_t bucket = h % dim;
    // Parity of the upper half, so the sign is not tied to the bucket parity.
    v[bucket] += ((h >> 32) & 1U) ? -1.0 : 1.0;
  }
  double norm = std::sqrt(kernels::dot(v, v));
  if (norm == 0.0) {
    // Every trigram cancelled (or empty text): fall back to a fixed unit vector.
    v[fnv1a(padded, seed) % dim] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

ToyProvider::ToyProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 8) throw ConfigError("toy provider dim must be >= 8");
}

std::string ToyProvider::name() const { return "toy:" + std::to_string(dim_) + "," + std::to_string(seed_); }

std::vector<Embedding> ToyProvider::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(toy_embed(t, dim_, seed_));
  return out;
}

FileProvider::FileProvider(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ProviderError("vector file unavailable: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ProviderError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (!rec.contains("dim") || !rec["dim"].is_number_unsigned()) {
        throw ProviderError(path.string() + ": first record must be a header with 'dim'");
      }
      dim_ = rec["dim"].get<std::size_t>();
      name_ = rec.value("provider_name", std::string("file"));
      have_header = true;
      continue;
    }
    auto key = rec.value("text_sha256", std::string());
    if (key.empty() || !rec.contains("vector")) {
      throw ProviderError(path.string() + ":" + std::to_string(line_no) + ": record needs text_sha256 and vector");
    }
    auto vec = rec["vector"].get<Embedding>();
    if (vec.size() != dim_) {
      throw ProviderError(path.string() + ":" + std::to_string(line_no) + ": vector length " +
                          std::to_string(vec.size()) + " != dim " + std::to_string(dim_));
    }
    vectors_.insert_or_assign(std::move(key), std::move(vec));
  }
  if (!have_header || dim_ == 0) throw ProviderError(path.string() + ": missing header");
}

std::vector<Embedding> FileProvider::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const std::string key = io::sha256_hex(t);
    auto it = vectors_.find(key);
    if (it == vectors_.end()) throw ProviderError("missing-key: no vector for text sha256 " + key);
    out.push_back(it->second);
  }
  return out;
}

void write_vector_file(const std::filesystem::path& path, std::string_view provider_name, std::size_t dim,
                       std::span<const std::string> texts, std::span<const Embedding> vectors) {
  if (texts.size() != vectors.size()) throw DataError("texts and vectors differ in count");
  std::string out = json{{"dim", dim}, {"provider_name", provider_name}}.dump() + "\n";
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out += json{{"text_sha256", io::sha256_hex(texts[i])}, {"vector", vectors[i]}}.dump() + "\n";
  }
  io::write_file(path, out);
}

HttpProvider::HttpProvider(Options options) : options_(std::move(options)) {
  while (!options_.base_url.empty() && options_.base_url.back() == '/') options_.base_url.pop_back();
  if (options_.base_url.empty()) throw ConfigError("http provider needs a base URL");
  if (options_.batch_size == 0) throw ConfigError("http provider batch size must be positive");
}

std::string HttpProvider::name() const { return "http:" + options_.base_url; }

namespace {

httplib::Client make_client(const std::string& base_url, std::chrono::milliseconds timeout) {
  httplib::Client client(base_url);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace

std::size_t HttpProvider::dim() const {
  std::lock_guard lock(mutex_);
  if (dim_) return *dim_;
  auto client = make_client(options_.base_url, options_.timeout);
  auto res = client.Get("/health");
  if (!res) throw ProviderError("embedding service unreachable at " + options_.base_url);
  if (res->status != 200) throw ProviderError("embedding service /health returned " + std::to_string(res->status));
  try {
    dim_ = json::parse(res->body).at("dim").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed /health response: ") + e.what());
  }
  return *dim_;
}

std::vector<Embedding> HttpProvider::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  std::lock_guard lock(mutex_);
  auto client = make_client(options_.base_url, options_.timeout);
  for (std::size_t begin = 0; begin < texts.size(); begin += options_.batch_size) {
    const std::size_t end = std::min(texts.size(), begin + options_.batch_size);
    json req{{"texts", std::vector<std::string>(texts.begin() + begin, texts.begin() + end)}};
    auto res = client.Post("/embed", req.dump(), "application/json");
    if (!res) throw ProviderError("embedding service unreachable at " + options_.base_url);
    if (res->status != 200) {
      throw ProviderError("embedding service /embed returned " + std::to_string(res->status));
    }
    try {
      auto body = json::parse(res->body);
      auto vectors = body.at("vectors").get<std::vector<Embedding>>();
      auto dim = body.at("dim").get<std::size_t>();
      if (vectors.size() != end - begin) throw ProviderError("embedding service returned wrong vector count");
      if (dim_ && *dim_ != dim) throw ProviderError("embedding service changed dimension");
      dim_ = dim;
      for (auto& v : vectors) {
        if (v.size() != dim) throw ProviderError("embedding service returned a vector of wrong length");
        out.push_back(std::move(v));
      }
    } catch (const json::exception& e) {
      throw ProviderError(std::string("malformed /embed response: ") + e.what());
    }
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(std::string_view spec, std::chrono::milliseconds http_timeout) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ConfigError("provider must be toy:<dim>,<seed>, file:<path> or http:<url>");
  const std::string kind(spec.substr(0, colon));
  const std::string arg(spec.substr(colon + 1));
  if (kind == "toy") {
    auto comma = arg.find(',');
    try {
      std::size_t dim = std::stoul(arg.substr(0, comma));
      std::uint64_t seed = comma == std::string::npos ? 0 : std::stoull(arg.substr(comma + 1));
      return std::make_unique<ToyProvider>(dim, seed);
    } catch (const std::logic_error&) {
      throw ConfigError("bad toy provider spec '" + std::string(spec) + "'");
    }
  }
  if (kind == "file") return std::make_unique<FileProvider>(arg);
  if (kind == "http" || kind == "https") {
    // "http:<url>", or a bare URL.
    std::string url = arg.rfind("//", 0) == 0 ? std::string(spec) : arg;
    if (const char* env = std::getenv("TEXTNET_PROVIDER_URL"); env != nullptr && *env != '\0') url = env;
    return std::make_unique<HttpProvider>(HttpProvider::Options{url, http_timeout, 256});
  }
  throw ConfigError("unknown provider kind '" + kind + "'");
}

}  // namespace textnet
