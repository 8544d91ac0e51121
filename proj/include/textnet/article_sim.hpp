#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textnet/corpus.hpp"
#include "textnet/matching.hpp"

namespace textnet {

/// An article as the ordered sequence of its sentence symbols.
struct ArticleString {
  std::string article_id;
  std::vector<std::size_t> symbols;
  std::string glyph_string;  // UTF-8, one glyph per symbol
};

/// Symbols in sentence-index order. Throws DataError when a sentence has no symbol.
ArticleString encode_article(std::string article_id, std::span<const SentenceRecord> sentences,
                             const SymbolTable& table);

/// Unit-cost edit distance, two-row dynamic programme.
template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// 1 − d / max(|a|, |b|); two empty strings give 0.
double edit_similarity(const ArticleString& a, const ArticleString& b);

/// |A ∩ B| / min(|A|, |B|) over symbol sets; 0 when either is empty.
double overlap_coefficient(const ArticleString& a, const ArticleString& b);

enum class Metric { kEdit, kOverlap };

/// "edit" or "overlap"; throws ConfigError otherwise.
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

/// Symmetric matrix over named nodes, values in [0,1], zero diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::vector<std::string> node_ids);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& node_ids() const { return ids_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * ids_.size() + j]; }
  /// Sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v);
  const std::vector<double>& values() const { return values_; }

  /// Header row and first column carry node ids; values use 6 decimals.
  std::string to_csv() const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

/// Pairwise metric over all unordered pairs. Throws DataError on duplicate ids
/// or an empty list.
SimilarityMatrix article_matrix(std::span<const ArticleString> articles, Metric metric);

}  // namespace textnet
