#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

namespace textnet {

/// Term → valence. Terms are stored lowercase.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::unordered_map<std::string, double> valences);

  /// "term<TAB>valence" per line; further tab-separated columns are ignored.
  static Lexicon load(const std::filesystem::path& path);

  const double* find(std::string_view lowercase_term) const;
  bool empty() const { return valences_.empty(); }
  std::size_t size() const { return valences_.size(); }

 private:
  std::unordered_map<std::string, double> valences_;
};

/// Heuristic constants; defaults are the published VADER values.
struct SentimentRules {
  double negation_scalar = 0.74;
  std::size_t negation_window = 3;
  double caps_scalar = 1.25;
  double exclamation_boost = 0.292;
  std::size_t max_exclamations = 3;
  double quote_weight = 0.5;
  double alpha = 15.0;
};

/// Rule-adjusted valence sum before normalisation.
double sentiment_sum(std::string_view text, const Lexicon& lexicon, const SentimentRules& rules = {});

/// Compound score x / sqrt(x² + alpha) in [-1, 1]. Throws ConfigError for an
/// empty lexicon.
double sentiment(std::string_view text, const Lexicon& lexicon, const SentimentRules& rules = {});

}  // namespace textnet
