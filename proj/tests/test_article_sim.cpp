#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "textnet/article_sim.hpp"
#include "textnet/error.hpp"
#include "textnet/matching.hpp"

using namespace textnet;

namespace {

using Seq = std::vector<int>;

// Plain recursion over the three edit operations, memoised on suffix positions.
std::size_t edit_oracle(const Seq& a, const Seq& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = std::min(go(i + 1, j), go(i, j + 1)) + 1;
    best = std::min(best, go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1));
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

std::vector<Seq> all_sequences(std::size_t max_len, int alphabet) {
  std::vector<Seq> out{{}};
  std::vector<Seq> frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Seq> next;
    for (const auto& s : frontier) {
      for (int c = 0; c < alphabet; ++c) {
        auto t = s;
        t.push_back(c);
        next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::size_t lev(const Seq& a, const Seq& b) { return levenshtein<int>(a, b); }

ArticleString art(std::string id, std::vector<std::size_t> symbols) {
  return ArticleString{std::move(id), std::move(symbols), {}};
}

}  // namespace

TEST_CASE("levenshtein classic instances") {
  const std::string kitten = "kitten", sitting = "sitting";
  CHECK(levenshtein<char>(kitten, sitting) == 3);
  CHECK(levenshtein<char>(kitten, kitten) == 0);
  CHECK(levenshtein<char>(kitten, std::string_view{}) == 6);
  CHECK(levenshtein<char>(std::string_view{}, std::string_view{}) == 0);
}

TEST_CASE("levenshtein equals exhaustive recursion for all short sequences") {
  const auto seqs = all_sequences(5, 3);
  REQUIRE(seqs.size() == 364);
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      const auto d = lev(a, b);
      if (d != edit_oracle(a, b)) {
        FAIL("mismatch");
      }
      if ((d == 0) != (a == b)) FAIL("identity of indiscernibles");
      if (d != lev(b, a)) FAIL("symmetry");
    }
  }
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20000; ++rep) {
    const auto& a = seqs[rng() % seqs.size()];
    const auto& b = seqs[rng() % seqs.size()];
    const auto& c = seqs[rng() % seqs.size()];
    CHECK(lev(a, c) <= lev(a, b) + lev(b, c));
  }
}

TEST_CASE("edit similarity examples") {
  std::vector<std::size_t> ten(10);
  std::iota(ten.begin(), ten.end(), 0);
  CHECK(edit_similarity(art("a", ten), art("b", ten)) == 1.0);
  CHECK(edit_similarity(art("a", {1, 2, 3, 4, 5}), art("b", {6, 7, 8, 9, 10})) == 0.0);
  CHECK(edit_similarity(art("a", {1, 2, 3, 4}), art("b", {1, 2, 4})) == 0.75);
  CHECK(edit_similarity(art("a", {}), art("b", {})) == 0.0);
  CHECK(edit_similarity(art("a", {1}), art("b", {})) == 0.0);
}

TEST_CASE("overlap coefficient examples") {
  CHECK(overlap_coefficient(art("a", {1, 2}), art("b", {3, 2, 1, 9})) == 1.0);
  CHECK(overlap_coefficient(art("a", {1, 2}), art("b", {3, 4})) == 0.0);
  CHECK(overlap_coefficient(art("a", {1, 2, 3}), art("b", {2, 3, 4, 5})) == doctest::Approx(2.0 / 3.0));
  CHECK(overlap_coefficient(art("a", {1, 1, 2}), art("b", {1, 5})) == 0.5);
  CHECK(overlap_coefficient(art("a", {}), art("b", {1})) == 0.0);
}

TEST_CASE("similarities are bounded and symmetric on random pairs") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<std::size_t> x(rng() % 12), y(rng() % 12);
    for (auto& v : x) v = rng() % 6;
    for (auto& v : y) v = rng() % 6;
    const auto a = art("a", x), b = art("b", y);
    for (double s : {edit_similarity(a, b), overlap_coefficient(a, b)}) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    CHECK(edit_similarity(a, b) == edit_similarity(b, a));
    CHECK(overlap_coefficient(a, b) == overlap_coefficient(b, a));
  }
}

TEST_CASE("encoding follows sentence order") {
  std::vector<ScoredSentence> s;
  const std::vector<Embedding> protos{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  // Article f: protos 0,1,2 ; article r: 2,1,0
  for (std::size_t i = 0; i < 3; ++i) s.push_back({{"f", i, "f"}, protos[i], 0});
  for (std::size_t i = 0; i < 3; ++i) s.push_back({{"r", i, "r"}, protos[2 - i], 0});
  const auto table = build_symbol_table(s, MatchParams{});
  std::vector<SentenceRecord> f, r;
  for (std::size_t i = 0; i < 3; ++i) f.push_back(s[i].record), r.push_back(s[3 + i].record);
  const auto ef = encode_article("f", f, table);
  const auto er = encode_article("r", r, table);
  auto rev = er.symbols;
  std::reverse(rev.begin(), rev.end());
  CHECK(ef.symbols == rev);
  CHECK(ef.symbols == std::vector<std::size_t>{0, 1, 2});
  CHECK(ef.glyph_string == "\xE4\xB8\x80\xE4\xB8\x81\xE4\xB8\x82");
  CHECK(encode_article("e", {}, table).symbols.empty());
  const std::vector<SentenceRecord> stray{{"zz", 0, "x"}};
  CHECK_THROWS_AS(encode_article("zz", stray, table), DataError);
}

TEST_CASE("article matrix") {
  const std::vector<ArticleString> one{art("a", {1})};
  const auto m1 = article_matrix(one, Metric::kEdit);
  CHECK(m1.size() == 1);
  CHECK(m1.at(0, 0) == 0.0);

  const std::vector<ArticleString> three{art("a", {1, 2}), art("b", {1, 2}), art("c", {1, 2})};
  const auto m3 = article_matrix(three, Metric::kEdit);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(m3.at(i, j) == (i == j ? 0.0 : 1.0));
  }
  CHECK(m3.to_csv() == "id,a,b,c\na,0.000000,1.000000,1.000000\nb,1.000000,0.000000,1.000000\nc,1.000000,1.000000,0.000000\n");

  const std::vector<ArticleString> dup{art("a", {1}), art("a", {2})};
  CHECK_THROWS_AS(article_matrix(dup, Metric::kEdit), DataError);
  CHECK_THROWS_AS(article_matrix(std::vector<ArticleString>{}, Metric::kEdit), DataError);
  CHECK(parse_metric("overlap") == Metric::kOverlap);
  CHECK_THROWS_AS(parse_metric("cosine"), ConfigError);
}

TEST_CASE("article matrix is permutation-equivariant and matches a quadratic reference") {
  std::mt19937_64 rng(4);
  std::vector<ArticleString> arts;
  for (int i = 0; i < 12; ++i) {
    std::vector<std::size_t> x(rng() % 8);
    for (auto& v : x) v = rng() % 10;
    arts.push_back(art("n" + std::to_string(i), x));
  }
  for (Metric metric : {Metric::kEdit, Metric::kOverlap}) {
    const auto m = article_matrix(arts, metric);
    auto shuffled = arts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto ms = article_matrix(shuffled, metric);
    for (std::size_t i = 0; i < arts.size(); ++i) {
      for (std::size_t j = 0; j < arts.size(); ++j) {
        double expected = 0.0;
        if (i != j) {
          const auto& a = arts[i].symbols;
          const auto& b = arts[j].symbols;
          if (metric == Metric::kEdit) {
            const std::size_t longest = std::max(a.size(), b.size());
            const Seq sa(a.begin(), a.end()), sb(b.begin(), b.end());
            expected = longest == 0 ? 0.0 : 1.0 - static_cast<double>(edit_oracle(sa, sb)) / longest;
          } else {
            const std::set<std::size_t> xa(a.begin(), a.end()), xb(b.begin(), b.end());
            std::size_t shared = 0;
            for (auto v : xa) shared += xb.count(v);
            const std::size_t small = std::min(xa.size(), xb.size());
            expected = small == 0 ? 0.0 : static_cast<double>(shared) / small;
          }
        }
        CHECK(m.at(i, j) == doctest::Approx(expected).epsilon(1e-12));
        const auto pi = std::find_if(shuffled.begin(), shuffled.end(), [&](auto& x) { return x.article_id == arts[i].article_id; }) - shuffled.begin();
        const auto pj = std::find_if(shuffled.begin(), shuffled.end(), [&](auto& x) { return x.article_id == arts[j].article_id; }) - shuffled.begin();
        CHECK(ms.at(pi, pj) == m.at(i, j));
      }
    }
  }
}
