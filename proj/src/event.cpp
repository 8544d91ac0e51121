#include "textnet/event.hpp"

#include <set>

#include "textnet/error.hpp"

namespace textnet {

ScoredEvent::ScoredEvent(std::string id, std::vector<Article> arts, std::vector<ScoredSentence> scored,
                         unsigned threads)
    : event_id(std::move(id)), articles(std::move(arts)), sentences(std::move(scored)) {
  std::set<std::string> known;
  for (const auto& a : articles) known.insert(a.id);
  for (const auto& s : sentences) {
    if (!known.count(s.record.article_id)) {
      throw DataError("sentence of unknown article '" + s.record.article_id + "' in event '" + event_id + "'");
    }
  }
  cosines = PairwiseCosines::compute(sentences, threads);
}

std::vector<SentenceRecord> ScoredEvent::sentences_of(const std::string& article_id) const {
  std::vector<SentenceRecord> out;
  for (const auto& s : sentences) {
    if (s.record.article_id == article_id) out.push_back(s.record);
  }
  return out;
}

EventNetwork build_event_network(const ScoredEvent& event, const MatchParams& params, Metric metric,
                                 double min_weight) {
  params.validate();
  SymbolTable symbols = build_symbol_table(event.sentences, event.cosines, params);
  std::vector<ArticleString> strings;
  strings.reserve(event.articles.size());
  for (const auto& a : event.articles) strings.push_back(encode_article(a.id, event.sentences_of(a.id), symbols));
  SimilarityMatrix similarity = article_matrix(strings, metric);
  WeightedNetwork network = build_article_network(similarity, event.articles, min_weight);
  return EventNetwork{std::move(symbols), std::move(strings), std::move(similarity), std::move(network)};
}

}  // namespace textnet
