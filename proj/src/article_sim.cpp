#include "textnet/article_sim.hpp"

#include <set>

#include "textnet/error.hpp"
#include "textnet/io.hpp"

namespace textnet {

ArticleString encode_article(std::string article_id, std::span<const SentenceRecord> sentences,
                             const SymbolTable& table) {
  std::vector<const SentenceRecord*> ordered;
  ordered.reserve(sentences.size());
  for (const auto& s : sentences) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->index < b->index; });

  ArticleString out;
  out.article_id = std::move(article_id);
  for (const auto* s : ordered) {
    const std::size_t sym = table.symbol_of(SentenceKey{s->article_id, s->index});
    out.symbols.push_back(sym);
    out.glyph_string += io::utf8_encode(table.glyph_of(sym));
  }
  return out;
}

double edit_similarity(const ArticleString& a, const ArticleString& b) {
  const std::size_t longest = std::max(a.symbols.size(), b.symbols.size());
  if (longest == 0) return 0.0;
  const auto d = levenshtein<std::size_t>(a.symbols, b.symbols);
  return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

double overlap_coefficient(const ArticleString& a, const ArticleString& b) {
  const std::set<std::size_t> sa(a.symbols.begin(), a.symbols.end());
  const std::set<std::size_t> sb(b.symbols.begin(), b.symbols.end());
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t shared = 0;
  for (auto s : sa) shared += sb.count(s);
  return static_cast<double>(shared) / static_cast<double>(std::min(sa.size(), sb.size()));
}

Metric parse_metric(std::string_view name) {
  if (name == "edit") return Metric::kEdit;
  if (name == "overlap") return Metric::kOverlap;
  throw ConfigError("metric must be 'edit' or 'overlap', got '" + std::string(name) + "'");
}

std::string_view metric_name(Metric m) { return m == Metric::kEdit ? "edit" : "overlap"; }

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> node_ids)
    : ids_(std::move(node_ids)), values_(ids_.size() * ids_.size(), 0.0) {}

void SimilarityMatrix::set(std::size_t i, std::size_t j, double v) {
  values_[i * ids_.size() + j] = v;
  values_[j * ids_.size() + i] = v;
}

std::string SimilarityMatrix::to_csv() const {
  std::string out = "id";
  for (const auto& id : ids_) out += "," + io::csv_field(id);
  out += "\n";
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out += io::csv_field(ids_[i]);
    for (std::size_t j = 0; j < ids_.size(); ++j) out += "," + io::fixed6(at(i, j));
    out += "\n";
  }
  return out;
}

SimilarityMatrix article_matrix(std::span<const ArticleString> articles, Metric metric) {
  if (articles.empty()) throw DataError("article_matrix needs at least one article");
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& a : articles) {
    if (!seen.insert(a.article_id).second) throw DataError("duplicate article id '" + a.article_id + "'");
    ids.push_back(a.article_id);
  }
  SimilarityMatrix m(std::move(ids));
  for (std::size_t i = 0; i < articles.size(); ++i) {
    for (std::size_t j = i + 1; j < articles.size(); ++j) {
      const double v = metric == Metric::kEdit ? edit_similarity(articles[i], articles[j])
                                               : overlap_coefficient(articles[i], articles[j]);
      m.set(i, j, v);
    }
  }
  return m;
}

}  // namespace textnet
