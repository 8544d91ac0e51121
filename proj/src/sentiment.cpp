#include "textnet/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

#include "textnet/error.hpp"
#include "textnet/io.hpp"

namespace textnet {

Lexicon::Lexicon(std::unordered_map<std::string, double> valences) {
  for (auto& [term, v] : valences) {
    std::string key = term;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    valences_.insert_or_assign(std::move(key), v);
  }
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  std::unordered_map<std::string, double> valences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected term<TAB>valence");
    }
    auto rest = line.substr(tab + 1);
    auto tab2 = rest.find('\t');
    try {
      valences[io::trim(line.substr(0, tab))] = std::stod(rest.substr(0, tab2));
    } catch (const std::logic_error&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad valence");
    }
  }
  return Lexicon(std::move(valences));
}

const double* Lexicon::find(std::string_view lowercase_term) const {
  auto it = valences_.find(std::string(lowercase_term));
  return it == valences_.end() ? nullptr : &it->second;
}

namespace {

struct Token {
  std::string text;  // original case
  bool quoted = false;
};

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

// Word tokens with their quote state. ASCII double quotes toggle the state,
// curly quotes open and close it.
std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  bool in_quotes = false;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back({std::move(cur), in_quotes});
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (text.substr(i, 3) == "\xE2\x80\x9C") {  // “
      flush();
      in_quotes = true;
      i += 2;
    } else if (text.substr(i, 3) == "\xE2\x80\x9D") {  // ”
      flush();
      in_quotes = false;
      i += 2;
    } else if (text.substr(i, 3) == "\xE2\x80\x99" && !cur.empty()) {  // ’ inside a word
      cur += '\'';
      i += 2;
    } else if (c == '"') {
      flush();
      in_quotes = !in_quotes;
    } else if ((c == '\'' || c == '-') && !cur.empty() && i + 1 < text.size() &&
               std::isalnum(static_cast<unsigned char>(text[i + 1]))) {
      cur += static_cast<char>(c);
    } else if (is_word_byte(c)) {
      cur += static_cast<char>(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_all_caps(std::string_view s, std::size_t min_letters) {
  std::size_t letters = 0;
  for (unsigned char c : s) {
    if (std::islower(c)) return false;
    if (std::isupper(c)) ++letters;
  }
  return letters >= min_letters;
}

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c); });
}

constexpr std::array<std::string_view, 13> kNegations = {
    "not", "no", "never", "none", "nobody", "nothing", "neither", "nor", "nowhere", "cannot", "without", "aint", "dont"};

bool is_negation(const std::string& lowered) {
  if (std::find(kNegations.begin(), kNegations.end(), lowered) != kNegations.end()) return true;
  return lowered.size() > 3 && lowered.compare(lowered.size() - 3, 3, "n't") == 0;
}

std::size_t trailing_exclamations(std::string_view text) {
  std::size_t end = text.size();
  auto skippable = [](unsigned char c) { return std::isspace(c) || c == '"' || c == '\'' || c == ')'; };
  while (end > 0 && skippable(static_cast<unsigned char>(text[end - 1]))) --end;
  std::size_t n = 0;
  while (end > 0 && text[end - 1] == '!') {
    ++n;
    --end;
  }
  return n;
}

}  // namespace

double sentiment_sum(std::string_view text, const Lexicon& lexicon, const SentimentRules& rules) {
  if (lexicon.empty()) throw ConfigError("sentiment lexicon is empty");
  const auto tokens = tokenize(text);
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  bool text_all_caps = true;
  bool any_letters = false;
  for (const auto& t : tokens) {
    lowered.push_back(lower(t.text));
    if (has_letter(t.text)) {
      any_letters = true;
      if (!is_all_caps(t.text, 1)) text_all_caps = false;
    }
  }
  if (!any_letters) text_all_caps = false;

  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double* valence = lexicon.find(lowered[i]);
    if (valence == nullptr) continue;
    double v = *valence;
    if (!text_all_caps && is_all_caps(tokens[i].text, 2)) v *= rules.caps_scalar;
    const std::size_t from = i >= rules.negation_window ? i - rules.negation_window : 0;
    for (std::size_t k = from; k < i; ++k) {
      if (is_negation(lowered[k])) {
        v *= -rules.negation_scalar;
        break;
      }
    }
    if (tokens[i].quoted) v *= rules.quote_weight;
    sum += v;
  }
  const std::size_t bangs = std::min(trailing_exclamations(text), rules.max_exclamations);
  if (sum > 0.0) {
    sum += rules.exclamation_boost * static_cast<double>(bangs);
  } else if (sum < 0.0) {
    sum -= rules.exclamation_boost * static_cast<double>(bangs);
  }
  return sum;
}

double sentiment(std::string_view text, const Lexicon& lexicon, const SentimentRules& rules) {
  const double x = sentiment_sum(text, lexicon, rules);
  if (x == 0.0) return 0.0;
  return std::clamp(x / std::sqrt(x * x + rules.alpha), -1.0, 1.0);
}

}  // namespace textnet
