#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "textnet/error.hpp"
#include "textnet/io.hpp"
#include "textnet/networks.hpp"

using namespace textnet;

namespace {

std::vector<NodeInfo> plain_nodes(std::initializer_list<const char*> ids) {
  std::vector<NodeInfo> out;
  for (const char* id : ids) out.push_back({id, {}});
  return out;
}

struct RandomInstance {
  WeightedNetwork s;
  std::vector<std::pair<std::string, std::string>> membership;  // (domain, article)
};

RandomInstance random_instance(std::mt19937_64& rng) {
  const std::size_t n_articles = 1 + rng() % 20;
  const std::size_t n_domains = 1 + rng() % 6;
  std::vector<NodeInfo> nodes;
  RandomInstance inst;
  for (std::size_t i = 0; i < n_articles; ++i) {
    const std::string id = "a" + std::to_string(i);
    const std::string domain = "d" + std::to_string(rng() % n_domains);
    nodes.push_back({id, {{"domain", domain}}});
    inst.membership.emplace_back(domain, id);
  }
  inst.s = WeightedNetwork(nodes);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n_articles; ++i) {
    for (std::size_t j = i + 1; j < n_articles; ++j) {
      if (rng() % 3 != 0) inst.s.set_weight(i, j, u(rng));
    }
  }
  return inst;
}

// Same nodes, attributes and weights, matched by id rather than position.
bool same_structure(const WeightedNetwork& a, const WeightedNetwork& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto bi = b.index_of(a.node(i).id);
    if (!bi || b.node(*bi).attributes != a.node(i).attributes) return false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (b.weight(*bi, *b.index_of(a.node(j).id)) != a.weight(i, j)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("network construction rules") {
  WeightedNetwork n(plain_nodes({"a", "b", "c"}));
  CHECK(n.edge_count() == 0);
  n.set_weight(0, 2, 0.5);
  CHECK(n.weight(2, 0) == 0.5);
  CHECK(n.edge_count() == 1);
  CHECK(n.total_weight() == 0.5);
  CHECK_THROWS_AS(n.set_weight(1, 1, 0.3), DataError);
  CHECK_THROWS_AS(n.set_weight(0, 1, -0.1), DataError);
  CHECK_THROWS_AS(WeightedNetwork(plain_nodes({"a", "a"})), DataError);
  CHECK(n.index_of("c") == 2U);
  CHECK_FALSE(n.index_of("z"));
}

TEST_CASE("article network from a similarity matrix") {
  std::vector<Article> arts{{"x", "d1", "e", "t", "b", "left", {}},
                            {"y", "d2", "e", "t", "b", {}, {}},
                            {"z", "d2", "e", "t", "b", "right", {}}};
  SimilarityMatrix m({"x", "y", "z"});
  m.set(0, 1, 0.4);
  m.set(1, 2, 0.6);
  const auto all = build_article_network(m, arts);
  CHECK(all.edge_count() == 2);
  CHECK(*all.node(0).attribute("domain") == "d1");
  CHECK(*all.node(0).attribute("bias_label") == "left");
  CHECK(all.node(1).attribute("bias_label") == nullptr);
  CHECK(build_article_network(m, arts, 0.5).edge_count() == 1);
  const auto empty = build_article_network(SimilarityMatrix({"x", "y", "z"}), arts);
  CHECK(empty.size() == 3);
  CHECK(empty.edge_count() == 0);
  CHECK_THROWS_AS(build_article_network(SimilarityMatrix({"x", "q"}), arts), DataError);
}

TEST_CASE("domain induction examples") {
  SUBCASE("one article per domain is a relabelling") {
    WeightedNetwork s({{"a1", {{"domain", "A"}}}, {"b1", {{"domain", "B"}}}, {"c1", {{"domain", "C"}}}});
    s.set_weight(0, 1, 0.3);
    s.set_weight(1, 2, 0.9);
    const auto d = induce_domain_network(s, MembershipMatrix::from_network(s));
    CHECK(d.network.node(0).id == "A");
    CHECK(d.network.weight(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.network.weight(1, 2) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(d.network.weight(0, 2) == 0.0);
  }
  SUBCASE("two domains") {
    WeightedNetwork s({{"a1", {{"domain", "X"}}}, {"a2", {{"domain", "X"}}}, {"b1", {{"domain", "Y"}}}});
    s.set_weight(0, 2, 0.8);
    s.set_weight(1, 2, 0.4);
    s.set_weight(0, 1, 1.0);
    const auto d = induce_domain_network(s, MembershipMatrix::from_network(s), {{"X", "left"}});
    CHECK(d.network.weight(0, 1) == doctest::Approx(1.2 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(d.network.weight(0, 1) == doctest::Approx(0.8485).epsilon(1e-4));
    // Within X: S(a1,a2) counted twice over n_X = 2.
    CHECK(d.self_similarity[0] == doctest::Approx(1.0));
    CHECK(d.self_similarity[1] == 0.0);
    CHECK(*d.network.node(0).attribute("bias_label") == "left");
    CHECK(d.network.node(1).attribute("bias_label") == nullptr);
  }
  SUBCASE("zero network and single domain") {
    WeightedNetwork s({{"a1", {{"domain", "X"}}}, {"a2", {{"domain", "Y"}}}});
    const auto d = induce_domain_network(s, MembershipMatrix::from_network(s));
    CHECK(d.network.edge_count() == 0);
    WeightedNetwork one({{"a1", {{"domain", "X"}}}, {"a2", {{"domain", "X"}}}});
    one.set_weight(0, 1, 0.7);
    const auto d1 = induce_domain_network(one, MembershipMatrix::from_network(one));
    CHECK(d1.network.size() == 1);
    CHECK(d1.network.edge_count() == 0);
  }
  SUBCASE("membership errors") {
    const std::vector<std::pair<std::string, std::string>> twice{{"X", "a1"}, {"Y", "a1"}};
    CHECK_THROWS_AS(MembershipMatrix{twice}, DataError);
    WeightedNetwork s({{"a1", {{"domain", "X"}}}, {"a2", {{"domain", "X"}}}});
    const std::vector<std::pair<std::string, std::string>> partial{{"X", "a1"}};
    CHECK_THROWS_AS(induce_domain_network(s, MembershipMatrix{partial}), DataError);
    WeightedNetwork missing(plain_nodes({"a1"}));
    CHECK_THROWS_AS(MembershipMatrix::from_network(missing), DataError);
  }
}

TEST_CASE("domain induction equals a brute-force double loop") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const auto inst = random_instance(rng);
    const MembershipMatrix m(inst.membership);
    const auto d = induce_domain_network(inst.s, m);
    const auto& domains = m.domains();
    std::map<std::string, std::vector<std::size_t>> members;
    for (const auto& [domain, article] : inst.membership) members[domain].push_back(*inst.s.index_of(article));
    for (std::size_t x = 0; x < domains.size(); ++x) {
      for (std::size_t y = 0; y < domains.size(); ++y) {
        double sum = 0.0;
        for (auto i : members[domains[x]]) {
          for (auto j : members[domains[y]]) sum += inst.s.weight(i, j);
        }
        const double expected = sum / std::sqrt(static_cast<double>(members[domains[x]].size()) *
                                                static_cast<double>(members[domains[y]].size()));
        if (x == y) {
          CHECK(d.network.weight(x, y) == 0.0);
          CHECK(std::fabs(d.self_similarity[x] - expected) <= 1e-9);
        } else {
          CHECK(std::fabs(d.network.weight(x, y) - expected) <= 1e-9);
          CHECK(d.network.weight(x, y) == d.network.weight(y, x));
          CHECK(d.network.weight(x, y) >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("domain labels") {
  std::vector<Article> arts{{"1", "X", "e", "t", "b", "left", {}},
                            {"2", "X", "e", "t", "b", "left", {}},
                            {"3", "Y", "e", "t", "b", {}, {}}};
  const auto labels = domain_labels(arts);
  CHECK(labels.at("X") == "left");
  CHECK_FALSE(labels.count("Y"));
  arts[1].bias_label = "right";
  CHECK_THROWS_AS(domain_labels(arts), DataError);
}

TEST_CASE("exports") {
  WeightedNetwork n({{"b", {{"domain", "d, inc"}, {"bias_label", "left"}}}, {"a", {{"domain", "e"}}}});
  n.set_weight(0, 1, 2.0 / 3.0);
  CHECK(to_edge_csv(n) == "source,target,weight\na,b,0.666667\n");
  CHECK(to_node_csv(n) == "id,bias_label,domain\na,,e\nb,left,\"d, inc\"\n");

  const auto dir = test_support::scratch_dir("networks_export");
  const auto written = export_network(n, NetworkFormat::kEdgeCsv, dir / "net.csv");
  CHECK(written.size() == 2);
  CHECK(std::filesystem::exists(dir / "net_nodes.csv"));
  export_network(n, NetworkFormat::kGraphml, dir / "net.graphml");
  const auto first = io::read_file(dir / "net.graphml");
  export_network(n, NetworkFormat::kGraphml, dir / "net.graphml");
  CHECK(io::read_file(dir / "net.graphml") == first);
  CHECK_THROWS_AS(export_network(n, NetworkFormat::kGraphml, "/proc/no/such/dir/x.graphml"), DataError);
}

TEST_CASE("graphml round trip") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = random_instance(rng);
    std::vector<NodeInfo> nodes = inst.s.nodes();
    for (auto& node : nodes) {
      if (rng() % 2) node.attributes["bias_label"] = rng() % 2 ? "left" : "r&d <\"x\">";
    }
    WeightedNetwork n(nodes);
    for (std::size_t i = 0; i < n.size(); ++i) {
      for (std::size_t j = i + 1; j < n.size(); ++j) {
        if (inst.s.weight(i, j) > 0) n.set_weight(i, j, inst.s.weight(i, j) / 3.0);
      }
    }
    const auto back = parse_graphml(to_graphml(n));
    CHECK(same_structure(back, n));
  }
  const auto g = parse_graphml(
      R"(<?xml version="1.0"?><graphml><graph edgedefault="undirected"><node id="p"/><node id="q"/><edge source="p" target="q"/></graph></graphml>)");
  CHECK(g.weight(0, 1) == 1.0);
  CHECK_THROWS_AS(parse_graphml("<graphml><graph><node id=\"p\"/><edge source=\"p\" target=\"zz\"/></graph></graphml>"),
                  DataError);
  CHECK_THROWS_AS(parse_graphml("not xml"), DataError);
}

TEST_CASE("display normalisation") {
  WeightedNetwork n(plain_nodes({"a", "b", "c"}));
  n.set_weight(0, 1, 2.0);
  n.set_weight(1, 2, 0.5);
  const auto s = n.normalized_for_display();
  CHECK(s.weight(0, 1) == 1.0);
  CHECK(s.weight(1, 2) == 0.25);
  WeightedNetwork e(plain_nodes({"a", "b"}));
  CHECK(e.normalized_for_display() == e);
}
