#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace textnet {

/// Ordered political-bias label scale. Cluster ids for a labelling are the
/// level indices.
class BiasScale {
 public:
  /// far-left .. far-right, seven levels.
  BiasScale();
  explicit BiasScale(std::vector<std::string> levels);

  const std::vector<std::string>& levels() const { return levels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;
  std::size_t size() const { return levels_.size(); }

 private:
  std::vector<std::string> levels_;
};

struct Article {
  std::string id;
  std::string domain;
  std::string event_id;
  std::string title;
  std::string body;
  std::optional<std::string> bias_label;
  std::optional<std::string> url;
};

struct SentenceRecord {
  std::string article_id;
  std::size_t index = 0;  // 0 is the title when the title survives cleaning
  std::string text;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct EventGroup {
  std::string event_id;
  std::vector<Article> articles;  // file order
};

/// Reads the line-delimited JSON corpus. Groups are sorted by event id.
/// Throws DataError naming the line for malformed records, duplicate ids
/// and labels outside `scale`.
std::vector<EventGroup> load_corpus(const std::filesystem::path& path, const BiasScale& scale);

/// Same as load_corpus but over already-read text (used by tests).
std::vector<EventGroup> parse_corpus(std::string_view text, const BiasScale& scale);

/// Compiled junk patterns plus the abbreviation list used by the splitter.
class SegmentationRules {
 public:
  SegmentationRules() = default;

  /// A leading "(?i)" on a pattern makes it case-insensitive. Throws
  /// ConfigError for a pattern that does not compile.
  SegmentationRules(const std::vector<std::string>& junk_patterns,
                    const std::vector<std::string>& abbreviations);

  static SegmentationRules from_files(const std::filesystem::path& junk_file,
                                      const std::filesystem::path& abbreviation_file);

  bool is_junk(std::string_view sentence) const;
  bool is_abbreviation(std::string_view lowercase_token) const;

 private:
  std::vector<std::regex> junk_;
  std::unordered_set<std::string> abbreviations_;
};

/// Minimum non-whitespace characters for a sentence to be kept.
inline constexpr std::size_t kMinSentenceChars = 2;

/// Collapses whitespace runs to one space and trims.
std::string normalize_whitespace(std::string_view text);

/// Splits already-normalized text at sentence terminators.
std::vector<std::string> split_sentences(std::string_view text, const SegmentationRules& rules);

/// Title (if it survives cleaning) followed by the non-junk body sentences,
/// indexed contiguously from 0.
std::vector<SentenceRecord> clean_and_segment(const Article& article, const SegmentationRules& rules);

}  // namespace textnet
