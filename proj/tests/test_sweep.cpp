#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "textnet/error.hpp"
#include "textnet/pipeline.hpp"
#include "textnet/sweep.hpp"

using namespace textnet;

namespace {

WeightedNetwork nodes_only(std::size_t n) {
  std::vector<NodeInfo> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), {}});
  return WeightedNetwork(nodes);
}

WeightedNetwork random_weights(std::mt19937_64& rng, std::size_t n) {
  auto g = nodes_only(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) < 0.6) g.set_weight(i, j, u(rng));
    }
  }
  return g;
}

RunConfig mini_config() {
  RunConfig c;
  c.corpus_path = test_support::source_path("data/mini_corpus.jsonl");
  c.lexicon_path = test_support::source_path("data/lexicon.tsv");
  c.junk_path = test_support::source_path("data/junk_patterns.txt");
  c.abbreviations_path = test_support::source_path("data/abbreviations.txt");
  c.output_dir = test_support::scratch_dir("sweep_run");
  return c;
}

}  // namespace

TEST_CASE("network distance examples") {
  auto k3 = nodes_only(3);
  k3.set_weight(0, 1, 1.0);
  k3.set_weight(0, 2, 1.0);
  k3.set_weight(1, 2, 1.0);
  CHECK(network_distance(k3, nodes_only(3)) == 1.0);
  CHECK(network_distance(k3, k3) == 0.0);
  auto a = nodes_only(4), b = nodes_only(4);
  a.set_weight(1, 3, 0.75);
  b.set_weight(1, 3, 0.25);
  CHECK(network_distance(a, b) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(network_distance(nodes_only(1), nodes_only(1)) == 0.0);
  CHECK_THROWS_AS(network_distance(nodes_only(3), nodes_only(4)), DataError);
  WeightedNetwork renamed({{"n0", {}}, {"x", {}}, {"n2", {}}});
  CHECK_THROWS_AS(network_distance(nodes_only(3), renamed), DataError);
}

TEST_CASE("network distance is a pseudo-metric") {
  std::mt19937_64 rng(505);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 2 + rng() % 9;
    const auto a = random_weights(rng, n), b = random_weights(rng, n), c = random_weights(rng, n);
    const double ab = network_distance(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab == network_distance(b, a));
    CHECK(network_distance(a, a) == 0.0);
    CHECK(network_distance(a, c) <= ab + network_distance(b, c) + 1e-12);
  }
}

TEST_CASE("grid validation") {
  CHECK_NOTHROW(SweepGrid::defaults().validate());
  CHECK(SweepGrid::defaults().tau1_values.size() == 10);
  CHECK(SweepGrid::defaults().tau1_values.back() == 0.99);
  CHECK_THROWS_AS((SweepGrid{{}, {0.1}}.validate()), ConfigError);
  CHECK_THROWS_AS((SweepGrid{{0.2, 0.1}, {0.1}}.validate()), ConfigError);
  CHECK_THROWS_AS((SweepGrid{{0.1, 0.1}, {0.1}}.validate()), ConfigError);
  CHECK_THROWS_AS((SweepGrid{{1.0}, {0.1}}.validate()), ConfigError);
  CHECK_NOTHROW((SweepGrid{{0.5}, {1.0}}.validate()));
  CHECK_THROWS_AS((SweepGrid{{0.5}, {0.0}}.validate()), ConfigError);
}

TEST_CASE("sweep on the mini corpus") {
  const auto cfg = mini_config();
  const auto events = load_scored_events(cfg);
  REQUIRE(events.size() == 2);
  const auto grid = SweepGrid::defaults();
  const auto r = run_sweep(events, grid);
  const std::size_t n1 = grid.tau1_values.size(), n2 = grid.tau2_values.size();

  SUBCASE("surfaces are symmetric with zero diagonal") {
    for (const auto* s : {&r.tau1, &r.tau2}) {
      for (std::size_t i = 0; i < s->axis.size(); ++i) {
        CHECK(s->at(i, i) == 0.0);
        for (std::size_t j = 0; j < s->axis.size(); ++j) CHECK(s->at(i, j) == s->at(j, i));
      }
    }
  }
  SUBCASE("edge counts never grow with tau1") {
    for (const auto& counts : r.edge_counts) {
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        for (std::size_t i1 = 1; i1 < n1; ++i1) CHECK(counts[i1 * n2 + i2] <= counts[(i1 - 1) * n2 + i2]);
      }
    }
  }
  SUBCASE("the paraphrase pair separates 0.3 from 0.9") {
    CHECK(r.tau1.at(2, 8) > 0.0);
  }
  SUBCASE("input order and thread count do not matter") {
    std::vector<ScoredEvent> reversed(events.rbegin(), events.rend());
    const auto r2 = run_sweep(reversed, grid, Metric::kEdit, 3);
    CHECK(r2.tau1.values == r.tau1.values);
    CHECK(r2.tau2.values == r.tau2.values);
    CHECK(r2.edge_counts == r.edge_counts);
    CHECK(r2.event_ids == r.event_ids);
  }
  SUBCASE("single-value axis") {
    const auto r1 = run_sweep(events, SweepGrid{{0.5}, {0.1, 0.5}});
    CHECK(r1.tau1.values == std::vector<double>{0.0});
  }
  SUBCASE("csv layout") {
    const auto csv = r.tau1.to_csv();
    CHECK(csv.rfind("tau,0.1,0.2,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
  }
  CHECK_THROWS_AS(run_sweep(std::vector<ScoredEvent>{}, grid), DataError);
}
