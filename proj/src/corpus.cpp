#include "textnet/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "textnet/error.hpp"
#include "textnet/io.hpp"

namespace textnet {

using nlohmann::json;

BiasScale::BiasScale()
    : BiasScale({"far-left", "left", "left-center", "center", "right-center", "right", "far-right"}) {}

BiasScale::BiasScale(std::vector<std::string> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ConfigError("bias scale must have at least one level");
  std::set<std::string> seen;
  for (const auto& l : levels_) {
    if (!seen.insert(l).second) throw ConfigError("duplicate bias level '" + l + "'");
  }
}

std::optional<std::size_t> BiasScale::index_of(std::string_view label) const {
  auto it = std::find(levels_.begin(), levels_.end(), label);
  if (it == levels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - levels_.begin());
}

namespace {

std::string required_string(const json& rec, const char* key, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw DataError("corpus line " + std::to_string(line_no) + ": missing or non-string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> nullable_string(const json& rec, const char* key, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw DataError("corpus line " + std::to_string(line_no) + ": field '" + key + "' must be a string or null");
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<EventGroup> parse_corpus(std::string_view text, const BiasScale& scale) {
  std::map<std::string, EventGroup> groups;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (io::trim(line).empty()) {
      if (nl == text.size()) break;
      continue;
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("corpus line " + std::to_string(line_no) + ": parse error: " + e.what());
    }
    if (!rec.is_object()) throw DataError("corpus line " + std::to_string(line_no) + ": expected an object");

    Article a;
    a.id = required_string(rec, "id", line_no);
    a.domain = required_string(rec, "domain", line_no);
    a.event_id = required_string(rec, "event_id", line_no);
    a.title = required_string(rec, "title", line_no);
    a.body = required_string(rec, "body", line_no);
    a.bias_label = nullable_string(rec, "bias_label", line_no);
    a.url = nullable_string(rec, "url", line_no);

    const std::string where = "corpus line " + std::to_string(line_no) + ": ";
    if (a.id.empty()) throw DataError(where + "empty id");
    if (a.event_id.empty()) throw DataError(where + "empty event_id for article '" + a.id + "'");
    if (io::trim(a.title).empty() && io::trim(a.body).empty()) {
      throw DataError(where + "article '" + a.id + "' has neither title nor body");
    }
    if (a.bias_label && !scale.index_of(*a.bias_label)) {
      throw DataError(where + "unknown bias label '" + *a.bias_label + "'");
    }
    if (!ids.insert(a.id).second) throw DataError(where + "duplicate article id '" + a.id + "'");

    auto& g = groups[a.event_id];
    g.event_id = a.event_id;
    g.articles.push_back(std::move(a));
    if (nl == text.size()) break;
  }
  std::vector<EventGroup> out;
  out.reserve(groups.size());
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

std::vector<EventGroup> load_corpus(const std::filesystem::path& path, const BiasScale& scale) {
  return parse_corpus(io::read_file(path), scale);
}

SegmentationRules::SegmentationRules(const std::vector<std::string>& junk_patterns,
                                     const std::vector<std::string>& abbreviations) {
  for (const auto& raw : junk_patterns) {
    std::string pattern = raw;
    auto flags = std::regex::ECMAScript;
    if (pattern.rfind("(?i)", 0) == 0) {
      pattern = pattern.substr(4);
      flags |= std::regex::icase;
    }
    try {
      junk_.emplace_back(pattern, flags);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid junk pattern '" + raw + "': " + e.what());
    }
  }
  for (auto a : abbreviations) {
    a = io::trim(a);
    while (!a.empty() && a.back() == '.') a.pop_back();
    std::transform(a.begin(), a.end(), a.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!a.empty()) abbreviations_.insert(std::move(a));
  }
}

SegmentationRules SegmentationRules::from_files(const std::filesystem::path& junk_file,
                                                const std::filesystem::path& abbreviation_file) {
  return SegmentationRules(io::read_list_file(junk_file), io::read_list_file(abbreviation_file));
}

bool SegmentationRules::is_junk(std::string_view sentence) const {
  std::string s(sentence);
  return std::any_of(junk_.begin(), junk_.end(), [&](const std::regex& re) { return std::regex_search(s, re); });
}

bool SegmentationRules::is_abbreviation(std::string_view lowercase_token) const {
  return abbreviations_.count(std::string(lowercase_token)) != 0;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Length of a closing quote/bracket at s[i], 0 when none.
std::size_t closing_mark_len(std::string_view s, std::size_t i) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  // ” and ’
  if (s.substr(i, 3) == "\xE2\x80\x9D" || s.substr(i, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

std::size_t opening_mark_len(std::string_view s, std::size_t i) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == '(' || c == '[') return 1;
  // “ and ‘
  if (s.substr(i, 3) == "\xE2\x80\x9C" || s.substr(i, 3) == "\xE2\x80\x98") return 3;
  return 0;
}

bool starts_new_sentence(std::string_view s, std::size_t i) {
  if (i >= s.size()) return false;
  if (std::isupper(static_cast<unsigned char>(s[i]))) return true;
  std::size_t open = opening_mark_len(s, i);
  return open > 0 && i + open < s.size() && std::isupper(static_cast<unsigned char>(s[i + open]));
}

// Word immediately before position `dot`, lowercased, without leading brackets/quotes.
std::string token_before(std::string_view s, std::size_t sentence_start, std::size_t dot) {
  std::size_t b = dot;
  while (b > sentence_start && s[b - 1] != ' ') --b;
  std::string tok(s.substr(b, dot - b));
  while (!tok.empty() && (tok.front() == '(' || tok.front() == '"' || tok.front() == '\'' || tok.front() == '[')) {
    tok.erase(tok.begin());
  }
  std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) { return std::tolower(c); });
  return tok;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text, const SegmentationRules& rules) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    std::size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    while (j < text.size()) {
      std::size_t m = closing_mark_len(text, j);
      if (m == 0) break;
      j += m;
    }
    bool boundary = false;
    if (j >= text.size()) {
      boundary = true;
    } else if (text[j] == ' ' && starts_new_sentence(text, j + 1)) {
      boundary = true;
    }
    if (boundary && text[first] == '.' && j - first >= 1) {
      if (rules.is_abbreviation(token_before(text, start, first))) boundary = false;
    }
    if (boundary) {
      std::string sentence = io::trim(text.substr(start, j - start));
      if (!sentence.empty()) out.push_back(std::move(sentence));
      start = j;
    }
    i = j;
  }
  if (start < text.size()) {
    std::string tail = io::trim(text.substr(start));
    if (!tail.empty()) out.push_back(std::move(tail));
  }
  return out;
}

namespace {

std::size_t non_space_count(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); }));
}

bool keep(std::string_view sentence, const SegmentationRules& rules) {
  return non_space_count(sentence) >= kMinSentenceChars && !rules.is_junk(sentence);
}

}  // namespace

std::vector<SentenceRecord> clean_and_segment(const Article& article, const SegmentationRules& rules) {
  std::vector<SentenceRecord> out;
  auto push = [&](std::string text) {
    out.push_back(SentenceRecord{article.id, out.size(), std::move(text)});
  };
  std::string title = normalize_whitespace(article.title);
  if (keep(title, rules)) push(std::move(title));
  for (auto& s : split_sentences(normalize_whitespace(article.body), rules)) {
    if (keep(s, rules)) push(std::move(s));
  }
  return out;
}

}  // namespace textnet
