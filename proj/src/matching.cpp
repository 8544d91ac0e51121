#include "textnet/matching.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <thread>

#include "textnet/error.hpp"

namespace textnet {

void MatchParams::validate() const {
  if (!(tau1 > 0.0 && tau1 < 1.0)) throw ConfigError("tau1 must lie in (0, 1), got " + std::to_string(tau1));
  if (!(tau2 > 0.0 && tau2 <= 1.0)) throw ConfigError("tau2 must lie in (0, 1], got " + std::to_string(tau2));
}

double match_weight(double cosine, double sentiment_a, double sentiment_b, const MatchParams& p) {
  const double c = std::clamp(cosine, -1.0, 1.0);
  if (!(c > p.tau1)) return 0.0;
  if (std::fabs(sentiment_a - sentiment_b) > p.tau2) return 0.0;
  return c;
}

double pair_similarity(const ScoredSentence& a, const ScoredSentence& b, const MatchParams& p) {
  return match_weight(cosine(a.embedding, b.embedding), a.sentiment, b.sentiment, p);
}

std::size_t PairwiseCosines::offset(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // Rows before i hold (n-1) + (n-2) + ... + (n-i) entries.
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

double PairwiseCosines::at(std::size_t i, std::size_t j) const {
  if (i == j) return 1.0;
  return upper_[offset(i, j)];
}

PairwiseCosines PairwiseCosines::compute(std::span<const ScoredSentence> sentences, unsigned threads) {
  PairwiseCosines pc;
  pc.n_ = sentences.size();
  const std::size_t n = pc.n_;
  pc.upper_.assign(n < 2 ? 0 : n * (n - 1) / 2, 0.0);
  const std::size_t dim = n == 0 ? 0 : sentences[0].embedding.size();
  for (const auto& s : sentences) {
    if (s.embedding.size() != dim) throw DataError("embedding dimension mismatch within event");
  }
  auto rows = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < n; i += stride) {
      for (std::size_t j = i + 1; j < n; ++j) {
        pc.upper_[pc.offset(i, j)] = cosine(sentences[i].embedding, sentences[j].embedding);
      }
    }
  };
  threads = std::max(1U, threads);
  if (threads == 1 || n < 64) {
    rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(rows, t, threads);
  }
  return pc;
}

char32_t glyph_for(std::size_t symbol_id) {
  std::size_t remaining = symbol_id;
  for (const auto& [first, last] : kGlyphRanges) {
    const std::size_t span = static_cast<std::size_t>(last - first) + 1;
    if (remaining < span) return first + static_cast<char32_t>(remaining);
    remaining -= span;
  }
  throw DataError("symbol alphabet exhausted at symbol " + std::to_string(symbol_id));
}

std::size_t SymbolTable::symbol_of(const SentenceKey& key) const {
  auto it = symbol_of_.find(key);
  if (it == symbol_of_.end()) {
    throw DataError("no symbol for sentence " + key.article_id + "#" + std::to_string(key.index));
  }
  return it->second;
}

std::string SymbolTable::dump() const {
  std::string out;
  for (std::size_t s = 0; s < classes_.size(); ++s) {
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& k : classes_[s]) keys.push_back({k.article_id, k.index});
    out += nlohmann::json{{"symbol_id", s}, {"glyph", static_cast<std::uint32_t>(glyphs_[s])}, {"sentence_keys", keys}}
               .dump() +
           "\n";
  }
  return out;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

}  // namespace

SymbolTable build_symbol_table(std::span<const ScoredSentence> sentences, const PairwiseCosines& cosines,
                               const MatchParams& p) {
  const std::size_t n = sentences.size();
  if (cosines.size() != n) throw DataError("cosine cache does not match the sentence list");
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (match_weight(cosines.at(i, j), sentences[i].sentiment, sentences[j].sentiment, p) > 0.0) uf.unite(i, j);
    }
  }
  SymbolTable table;
  std::vector<std::size_t> symbol_of_root(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    if (symbol_of_root[root] == SIZE_MAX) {
      symbol_of_root[root] = table.classes_.size();
      table.glyphs_.push_back(glyph_for(table.classes_.size()));
      table.classes_.emplace_back();
    }
    const std::size_t sym = symbol_of_root[root];
    SentenceKey key{sentences[i].record.article_id, sentences[i].record.index};
    table.classes_[sym].push_back(key);
    if (!table.symbol_of_.emplace(std::move(key), sym).second) {
      throw DataError("duplicate sentence key " + sentences[i].record.article_id + "#" +
                      std::to_string(sentences[i].record.index));
    }
  }
  return table;
}

SymbolTable build_symbol_table(std::span<const ScoredSentence> sentences, const MatchParams& p) {
  return build_symbol_table(sentences, PairwiseCosines::compute(sentences), p);
}

}  // namespace textnet
