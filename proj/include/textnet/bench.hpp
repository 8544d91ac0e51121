#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "textnet/providers.hpp"
#include "textnet/sentiment.hpp"

namespace textnet {

struct AlterationCase {
  std::string name;
  std::string base;
  std::string altered;
};

/// Line-delimited {"name", "base", "altered"}. Throws DataError on malformed
/// lines or a repeated name.
std::vector<AlterationCase> parse_alteration_suite(std::string_view text);
std::vector<AlterationCase> load_alteration_suite(const std::filesystem::path& path);

struct ComparisonRow {
  std::string case_name;
  bool exact_match = false;
  double jaccard = 0.0;
  double levenshtein_ratio = 0.0;
  double sentence_cosine = 0.0;
  std::optional<double> token_vector_cosine;
  double sentiment_diff = 0.0;
};

/// Stopword and pronoun sets (lowercase) used for token preprocessing.
struct TokenFilter {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> pronouns;

  static TokenFilter from_files(const std::filesystem::path& stopwords, const std::filesystem::path& pronouns);
};

/// Lowercases, deletes ASCII punctuation, splits on whitespace, drops
/// stopwords and pronouns; order is kept.
std::vector<std::string> preprocess_tokens(std::string_view text, const TokenFilter& filter);

ComparisonRow compare_all(const AlterationCase& c, const EmbeddingProvider& provider, const Lexicon& lexicon,
                          const TokenFilter& filter);

/// Header plus one row per case; reals with 6 decimals, an omitted token
/// cosine as an empty field.
std::string comparison_csv(std::span<const ComparisonRow> rows);

}  // namespace textnet
