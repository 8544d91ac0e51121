#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "textnet/error.hpp"
#include "textnet/matching.hpp"
#include "textnet/providers.hpp"

using namespace textnet;

namespace {

ScoredSentence make(const std::string& article, std::size_t index, Embedding e, double sentiment) {
  return ScoredSentence{SentenceRecord{article, index, article + "#" + std::to_string(index)}, std::move(e), sentiment};
}

// Components by breadth-first search over the thresholded pair matrix,
// labelled in order of first appearance.
std::vector<std::size_t> bfs_components(const std::vector<ScoredSentence>& s, const MatchParams& p) {
  const std::size_t n = s.size();
  std::vector<std::size_t> label(n, SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (label[start] != SIZE_MAX) continue;
    std::queue<std::size_t> q;
    q.push(start);
    label[start] = next;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v) {
        if (v == u || label[v] != SIZE_MAX) continue;
        double dot = 0, na = 0, nb = 0;
        for (std::size_t k = 0; k < s[u].embedding.size(); ++k) {
          dot += s[u].embedding[k] * s[v].embedding[k];
          na += s[u].embedding[k] * s[u].embedding[k];
          nb += s[v].embedding[k] * s[v].embedding[k];
        }
        const double c = dot / std::sqrt(na * nb);
        if (c > p.tau1 && std::fabs(s[u].sentiment - s[v].sentiment) <= p.tau2) {
          label[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace

TEST_CASE("match rule boundaries") {
  const MatchParams p{0.7, 0.1};
  CHECK(match_weight(1.0, 0.3, 0.3, p) == 1.0);
  CHECK(match_weight(0.99, 0.0, 0.15, p) == 0.0);
  CHECK(match_weight(0.66, 0.2, 0.2, p) == 0.0);
  CHECK(match_weight(0.7, 0.0, 0.0, p) == 0.0);            // strict on the cosine
  CHECK(match_weight(0.8, 0.25, 0.5, {0.7, 0.25}) == 0.8);  // sentiment tie still matches
  CHECK(match_weight(-0.9, 0.0, 0.0, p) == 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW((MatchParams{0.7, 0.1}.validate()));
  CHECK_NOTHROW((MatchParams{0.5, 1.0}.validate()));
  CHECK_THROWS_AS((MatchParams{0.0, 0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((MatchParams{1.0, 0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((MatchParams{0.5, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((MatchParams{0.5, 1.5}.validate()), ConfigError);
}

TEST_CASE("pair similarity is symmetric and self-similar") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const MatchParams p{0.1, 1.0};
  for (int rep = 0; rep < 200; ++rep) {
    Embedding a(16), b(16);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const auto sa = make("a", 0, a, 0.1);
    const auto sb = make("b", 0, b, -0.2);
    CHECK(pair_similarity(sa, sb, p) == pair_similarity(sb, sa, p));
    CHECK(std::fabs(pair_similarity(sa, sa, p) - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(pair_similarity(make("a", 0, {1, 0}, 0), make("b", 0, {1, 0, 0}, 0), p), DataError);
}

TEST_CASE("symbol table examples") {
  const MatchParams p{0.7, 0.1};
  SUBCASE("unmatched sentences get distinct glyphs") {
    std::vector<ScoredSentence> s{make("a", 0, {1, 0, 0}, 0), make("a", 1, {0, 1, 0}, 0), make("b", 0, {0, 0, 1}, 0)};
    const auto t = build_symbol_table(s, p);
    CHECK(t.symbol_count() == 3);
    std::set<char32_t> glyphs;
    for (std::size_t i = 0; i < 3; ++i) glyphs.insert(t.glyph_of(i));
    CHECK(glyphs.size() == 3);
    CHECK(t.glyph_of(0) == 0x4E00);
  }
  SUBCASE("chains close transitively") {
    // cos(A,B) = cos(B,C) = 0.8, cos(A,C) = 0.28
    const double c = 0.8, s2 = std::sqrt(1 - c * c);
    const Embedding a{1, 0}, b{c, s2};
    const Embedding cc{c * c - s2 * s2, 2 * c * s2};
    std::vector<ScoredSentence> s{make("x", 0, a, 0), make("y", 0, b, 0), make("z", 0, cc, 0)};
    CHECK(pair_similarity(s[0], s[2], p) == 0.0);
    const auto t = build_symbol_table(s, p);
    CHECK(t.symbol_count() == 1);
    CHECK(t.members(0).size() == 3);
  }
  SUBCASE("duplicate text across five articles") {
    const auto e = toy_embed("The same wire sentence.", 64, 0);
    std::vector<ScoredSentence> s;
    for (int i = 0; i < 5; ++i) s.push_back(make("art" + std::to_string(i), 0, e, 0.2));
    s.push_back(make("art0", 1, toy_embed("Something else entirely here.", 64, 0), 0.2));
    const auto t = build_symbol_table(s, p);
    CHECK(t.symbol_count() == 2);
    CHECK(t.members(t.symbol_of({"art3", 0})).size() == 5);
    CHECK(t.symbol_of({"art0", 1}) == 1);
  }
  SUBCASE("empty input") { CHECK(build_symbol_table(std::vector<ScoredSentence>{}, p).symbol_count() == 0); }
  SUBCASE("unknown key") {
    std::vector<ScoredSentence> s{make("a", 0, {1, 0}, 0)};
    CHECK_THROWS_AS(build_symbol_table(s, p).symbol_of({"zz", 0}), DataError);
  }
}

TEST_CASE("symbol table equals brute-force components") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 20 + rng() % 180;
    const std::size_t protos = 1 + rng() % 40;
    std::vector<Embedding> base(protos, Embedding(8));
    for (auto& v : base) {
      for (auto& x : v) x = g(rng);
    }
    std::vector<ScoredSentence> s;
    for (std::size_t i = 0; i < n; ++i) {
      Embedding e = base[rng() % protos];
      for (auto& x : e) x += 0.3 * g(rng);
      s.push_back(make("art" + std::to_string(i % 7), i, e, 0.05 * static_cast<double>(rng() % 10)));
    }
    const MatchParams p{0.3 + 0.6 * static_cast<double>(rng() % 100) / 100.0,
                        0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0};
    const auto expected = bfs_components(s, p);
    const auto t = build_symbol_table(s, PairwiseCosines::compute(s, 1 + rep % 3), p);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(t.symbol_of({s[i].record.article_id, s[i].record.index}) == expected[i]);
    }
  }
}

TEST_CASE("pairwise cosines match direct computation for any thread count") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<ScoredSentence> s;
  for (std::size_t i = 0; i < 57; ++i) {
    Embedding e(12);
    for (auto& x : e) x = g(rng);
    s.push_back(make("a", i, e, 0));
  }
  const auto one = PairwiseCosines::compute(s, 1);
  const auto four = PairwiseCosines::compute(s, 4);
  CHECK(one.size() == 57);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      CHECK(one.at(i, j) == one.at(j, i));
      CHECK(one.at(i, j) == four.at(i, j));
      CHECK(one.at(i, j) == doctest::Approx(cosine(s[i].embedding, s[j].embedding)).epsilon(1e-12));
    }
  }
}

TEST_CASE("symbol count is monotone in the thresholds") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  std::vector<ScoredSentence> s;
  for (std::size_t i = 0; i < 60; ++i) {
    Embedding e(6);
    for (auto& x : e) x = g(rng);
    s.push_back(make("a", i, e, 0.1 * static_cast<double>(rng() % 10)));
  }
  const auto cos = PairwiseCosines::compute(s);
  std::size_t prev = 0;
  for (double t1 = 0.05; t1 < 1.0; t1 += 0.05) {
    const auto n = build_symbol_table(s, cos, {t1, 0.3}).symbol_count();
    CHECK(n >= prev);
    prev = n;
  }
  prev = SIZE_MAX;
  for (double t2 = 0.05; t2 <= 1.0; t2 += 0.05) {
    const auto n = build_symbol_table(s, cos, {0.2, t2}).symbol_count();
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("glyph ranges") {
  CHECK(glyph_for(0) == 0x4E00);
  CHECK(glyph_for(0x9FFF - 0x4E00) == 0x9FFF);
  CHECK(glyph_for(0x9FFF - 0x4E00 + 1) == 0xAC00);
  const std::size_t total = (0x9FFF - 0x4E00 + 1) + (0xD7A3 - 0xAC00 + 1);
  CHECK(glyph_for(total - 1) == 0xD7A3);
  CHECK_THROWS_AS(glyph_for(total), DataError);
}

TEST_CASE("symbol dump") {
  std::vector<ScoredSentence> s{make("a", 0, {1, 0}, 0), make("b", 0, {1, 0}, 0), make("b", 1, {0, 1}, 0)};
  const auto dump = build_symbol_table(s, MatchParams{}).dump();
  const auto nl = dump.find('\n');
  const auto first = nlohmann::json::parse(dump.substr(0, nl));
  CHECK(first["symbol_id"] == 0);
  CHECK(first["glyph"] == 0x4E00);
  CHECK(first["sentence_keys"].size() == 2);
  CHECK(first["sentence_keys"][1][0] == "b");
}
