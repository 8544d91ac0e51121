#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textnet/article_sim.hpp"
#include "textnet/corpus.hpp"

namespace textnet {

struct NodeInfo {
  std::string id;
  std::map<std::string, std::string> attributes;  // e.g. domain, bias_label

  const std::string* attribute(const std::string& key) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? nullptr : &it->second;
  }
};

/// Undirected, nonnegative, dense weighted graph without self-loops.
class WeightedNetwork {
 public:
  WeightedNetwork() = default;
  /// Edgeless network. Throws DataError on duplicate node ids.
  explicit WeightedNetwork(std::vector<NodeInfo> nodes);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const NodeInfo& node(std::size_t i) const { return nodes_[i]; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  double weight(std::size_t i, std::size_t j) const { return adjacency_[i * nodes_.size() + j]; }
  /// Symmetric assignment. Throws DataError for i == j or a negative weight.
  void set_weight(std::size_t i, std::size_t j, double w);
  /// Row-major N×N adjacency.
  const std::vector<double>& adjacency() const { return adjacency_; }

  std::size_t edge_count() const;
  /// Sum over unordered pairs.
  double total_weight() const;

  /// Induced subgraph on `keep` (indices into nodes()), preserving their order.
  WeightedNetwork subgraph(std::span<const std::size_t> keep) const;

  /// Scaled so that the largest weight is 1 (unchanged when edgeless).
  WeightedNetwork normalized_for_display() const;

  /// Sorted union of node attribute keys.
  std::vector<std::string> attribute_keys() const;

  friend bool operator==(const WeightedNetwork& a, const WeightedNetwork& b);

 private:
  std::vector<NodeInfo> nodes_;
  std::vector<double> adjacency_;
};

/// Article nodes in matrix order carrying domain and bias_label; edges with
/// weight > min_weight. Throws DataError when a matrix id is not an article.
WeightedNetwork build_article_network(const SimilarityMatrix& m, std::span<const Article> articles,
                                      double min_weight = 0.0);

/// Domain × article membership with entries 1/n_d.
class MembershipMatrix {
 public:
  /// One (domain, article_id) pair per article. Throws DataError when an
  /// article appears under two domains.
  explicit MembershipMatrix(std::span<const std::pair<std::string, std::string>> domain_article);

  /// Membership from the "domain" attribute of each node.
  static MembershipMatrix from_network(const WeightedNetwork& articles);

  const std::vector<std::string>& domains() const { return domains_; }  // sorted
  const std::vector<std::string>& articles() const { return articles_; }
  /// Weight of `article` in `domain` (0 when not a member).
  double value(std::size_t domain, std::size_t article) const { return values_[domain * articles_.size() + article]; }
  std::size_t domain_of(std::size_t article) const { return domain_of_[article]; }
  std::size_t domain_size(std::size_t domain) const { return sizes_[domain]; }

 private:
  std::vector<std::string> domains_;
  std::vector<std::string> articles_;
  std::vector<std::size_t> domain_of_;
  std::vector<std::size_t> sizes_;
  std::vector<double> values_;
};

struct DomainNetwork {
  WeightedNetwork network;
  /// Diagonal of the induced product before it is zeroed: within-domain reuse.
  std::vector<double> self_similarity;
};

/// D = A^{∘½} S (A^{∘½})ᵀ with a zeroed diagonal. `domain_labels` supplies the
/// bias_label attribute of each domain node. Throws DataError when the
/// membership does not cover exactly the nodes of `s`.
DomainNetwork induce_domain_network(const WeightedNetwork& s, const MembershipMatrix& membership,
                                    const std::map<std::string, std::string>& domain_labels = {});

/// Domain → bias label from the articles; throws DataError on conflicting labels.
std::map<std::string, std::string> domain_labels(std::span<const Article> articles);

enum class NetworkFormat { kGraphml, kEdgeCsv };

std::string to_graphml(const WeightedNetwork& n);
/// "source,target,weight" with 6-decimal weights, edges ordered by (min id, max id).
std::string to_edge_csv(const WeightedNetwork& n);
/// "id,<attr keys...>" ordered by id.
std::string to_node_csv(const WeightedNetwork& n);

/// graphml → `path`; edge_csv → `path` plus a sidecar "<stem>_nodes.csv".
/// Returns the files written. Throws DataError when a path is unwritable.
std::vector<std::filesystem::path> export_network(const WeightedNetwork& n, NetworkFormat format,
                                                  const std::filesystem::path& path);

/// Reads undirected GraphML; a node attribute with an empty value is treated
/// as absent, an edge without a weight gets 1. Throws DataError.
WeightedNetwork parse_graphml(std::string_view xml);
WeightedNetwork load_graphml(const std::filesystem::path& path);

}  // namespace textnet
