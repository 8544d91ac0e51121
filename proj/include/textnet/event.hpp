#pragma once

#include <string>
#include <vector>

#include "textnet/article_sim.hpp"
#include "textnet/corpus.hpp"
#include "textnet/matching.hpp"
#include "textnet/networks.hpp"

namespace textnet {

/// One event's articles with every cleaned sentence embedded and scored.
/// Cosines are computed once here; thresholds only act downstream.
struct ScoredEvent {
  std::string event_id;
  std::vector<Article> articles;
  std::vector<ScoredSentence> sentences;  // grouped by article, in article order
  PairwiseCosines cosines;

  /// Throws DataError when a sentence belongs to no listed article.
  ScoredEvent(std::string event_id, std::vector<Article> articles, std::vector<ScoredSentence> sentences,
              unsigned threads = 1);

  std::vector<SentenceRecord> sentences_of(const std::string& article_id) const;
};

struct EventNetwork {
  SymbolTable symbols;
  std::vector<ArticleString> strings;  // article order
  SimilarityMatrix similarity;
  WeightedNetwork network;
};

/// Symbol table → article strings → similarity matrix → article network.
EventNetwork build_event_network(const ScoredEvent& event, const MatchParams& params, Metric metric,
                                 double min_weight = 0.0);

}  // namespace textnet
