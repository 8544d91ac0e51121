#include "textnet/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "textnet/article_sim.hpp"
#include "textnet/corpus.hpp"
#include "textnet/error.hpp"
#include "textnet/io.hpp"

namespace textnet {

std::vector<AlterationCase> parse_alteration_suite(std::string_view text) {
  std::vector<AlterationCase> out;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      AlterationCase c{j.at("name").get<std::string>(), j.at("base").get<std::string>(),
                       j.at("altered").get<std::string>()};
      if (!names.insert(c.name).second) throw DataError("duplicate alteration case '" + c.name + "'");
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("alteration suite line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<AlterationCase> load_alteration_suite(const std::filesystem::path& path) {
  return parse_alteration_suite(io::read_file(path));
}

TokenFilter TokenFilter::from_files(const std::filesystem::path& stopwords, const std::filesystem::path& pronouns) {
  TokenFilter f;
  for (auto& w : io::read_list_file(stopwords)) f.stopwords.insert(w);
  for (auto& w : io::read_list_file(pronouns)) f.pronouns.insert(w);
  return f;
}

std::vector<std::string> preprocess_tokens(std::string_view text, const TokenFilter& filter) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (unsigned char c : text) {
    if (c < 0x80 && std::ispunct(c)) continue;
    cleaned += static_cast<char>(std::tolower(c));
  }
  std::vector<std::string> out;
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    if (filter.stopwords.count(tok) || filter.pronouns.count(tok)) continue;
    out.push_back(tok);
  }
  return out;
}

namespace {

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  return static_cast<double>(shared) / static_cast<double>(sa.size() + sb.size() - shared);
}

double char_levenshtein_ratio(std::string_view a, std::string_view b) {
  const auto ca = io::utf8_decode(a);
  const auto cb = io::utf8_decode(b);
  const std::size_t longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 1.0;
  const auto d = levenshtein<char32_t>(ca, cb);
  return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

std::optional<Embedding> mean_token_vector(const std::vector<std::string>& tokens, const EmbeddingProvider& provider) {
  if (tokens.empty()) return std::nullopt;
  const auto vectors = provider.embed_batch(tokens);
  Embedding mean(provider.dim(), 0.0);
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  for (double& x : mean) x /= static_cast<double>(vectors.size());
  return mean;
}

}  // namespace

ComparisonRow compare_all(const AlterationCase& c, const EmbeddingProvider& provider, const Lexicon& lexicon,
                          const TokenFilter& filter) {
  ComparisonRow row;
  row.case_name = c.name;
  row.exact_match = normalize_whitespace(c.base) == normalize_whitespace(c.altered);
  const auto ta = preprocess_tokens(c.base, filter);
  const auto tb = preprocess_tokens(c.altered, filter);
  row.jaccard = jaccard(ta, tb);
  row.levenshtein_ratio = char_levenshtein_ratio(c.base, c.altered);
  const std::vector<std::string> pair{c.base, c.altered};
  const auto emb = provider.embed_batch(pair);
  row.sentence_cosine = cosine(emb[0], emb[1]);
  if (provider.supports_tokens()) {
    auto ma = mean_token_vector(ta, provider);
    auto mb = mean_token_vector(tb, provider);
    if (ma && mb) row.token_vector_cosine = cosine(*ma, *mb);
  }
  row.sentiment_diff = std::fabs(sentiment(c.base, lexicon) - sentiment(c.altered, lexicon));
  return row;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out = "case,exact_match,jaccard,levenshtein_ratio,sentence_cosine,token_vector_cosine,sentiment_diff\n";
  for (const auto& r : rows) {
    out += io::csv_field(r.case_name) + "," + (r.exact_match ? "true" : "false") + "," + io::fixed6(r.jaccard) + "," +
           io::fixed6(r.levenshtein_ratio) + "," + io::fixed6(r.sentence_cosine) + "," +
           (r.token_vector_cosine ? io::fixed6(*r.token_vector_cosine) : std::string()) + "," +
           io::fixed6(r.sentiment_diff) + "\n";
  }
  return out;
}

}  // namespace textnet
