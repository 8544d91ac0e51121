#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "textnet/corpus.hpp"
#include "textnet/providers.hpp"

namespace textnet {

/// Thresholds for sentence matching: cosine must exceed `tau1` and the
/// absolute sentiment difference must not exceed `tau2`.
struct MatchParams {
  double tau1 = 0.7;
  double tau2 = 0.1;

  /// Throws ConfigError unless 0 < tau1 < 1 and 0 < tau2 <= 1.
  void validate() const;
};

struct ScoredSentence {
  SentenceRecord record;
  Embedding embedding;
  double sentiment = 0.0;
};

/// The match rule on precomputed quantities: `cosine` when it passes both
/// thresholds, else 0.
double match_weight(double cosine, double sentiment_a, double sentiment_b, const MatchParams& p);

/// Throws DataError when the embeddings differ in dimension.
double pair_similarity(const ScoredSentence& a, const ScoredSentence& b, const MatchParams& p);

/// Cosines of every unordered sentence pair within one event, computed once
/// and reused across threshold settings.
class PairwiseCosines {
 public:
  PairwiseCosines() = default;

  /// Parallel over row blocks when threads > 1.
  static PairwiseCosines compute(std::span<const ScoredSentence> sentences, unsigned threads = 1);

  std::size_t size() const { return n_; }
  /// i != j.
  double at(std::size_t i, std::size_t j) const;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<double> upper_;  // row-major strict upper triangle
};

struct SentenceKey {
  std::string article_id;
  std::size_t index = 0;

  friend auto operator<=>(const SentenceKey&, const SentenceKey&) = default;
};

/// Glyph ranges: CJK Unified Ideographs, then Hangul Syllables.
inline constexpr std::pair<char32_t, char32_t> kGlyphRanges[] = {{0x4E00, 0x9FFF}, {0xAC00, 0xD7A3}};

/// Glyph of a symbol id. Throws DataError past the end of the last range.
char32_t glyph_for(std::size_t symbol_id);

/// Equivalence classes of matched sentences within one event.
class SymbolTable {
 public:
  std::size_t symbol_count() const { return classes_.size(); }
  std::size_t sentence_count() const { return symbol_of_.size(); }

  /// Throws DataError when the sentence is not in the table.
  std::size_t symbol_of(const SentenceKey& key) const;
  bool contains(const SentenceKey& key) const { return symbol_of_.count(key) != 0; }
  char32_t glyph_of(std::size_t symbol) const { return glyphs_.at(symbol); }
  const std::vector<SentenceKey>& members(std::size_t symbol) const { return classes_.at(symbol); }

  /// Line-delimited {"symbol_id", "glyph", "sentence_keys": [[article_id, index], ...]}.
  std::string dump() const;

 private:
  friend SymbolTable build_symbol_table(std::span<const ScoredSentence>, const PairwiseCosines&, const MatchParams&);

  std::map<SentenceKey, std::size_t> symbol_of_;
  std::vector<char32_t> glyphs_;
  std::vector<std::vector<SentenceKey>> classes_;
};

/// Connected components of the match graph (edge iff match_weight > 0).
/// Symbol ids follow the first appearance of each component in `sentences`.
SymbolTable build_symbol_table(std::span<const ScoredSentence> sentences, const PairwiseCosines& cosines,
                               const MatchParams& p);
SymbolTable build_symbol_table(std::span<const ScoredSentence> sentences, const MatchParams& p);

}  // namespace textnet
