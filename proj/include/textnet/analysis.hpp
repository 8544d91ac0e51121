#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textnet/corpus.hpp"
#include "textnet/networks.hpp"

namespace textnet {

/// Node → cluster assignment. Clusters produced by louvain and the ensemble
/// are numbered contiguously from 0 in order of first appearance; a bias
/// partition uses scale indices.
class Partition {
 public:
  Partition() = default;
  /// Throws DataError on size mismatch or duplicate ids.
  Partition(std::vector<std::string> node_ids, std::vector<std::size_t> labels);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& node_ids() const { return ids_; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  std::optional<std::size_t> label_of(std::string_view id) const;
  std::size_t cluster_count() const;

  /// Same grouping, labels renumbered 0.. by first appearance.
  Partition canonical() const;
  /// Only the listed ids, in that order. Throws DataError for an unknown id.
  Partition restricted_to(std::span<const std::string> ids) const;

  /// "node_id,cluster" with a header line.
  std::string to_csv() const;
  static Partition from_csv(std::string_view csv);

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<std::size_t> labels_;
};

/// Q = (1/2m) Σ_ij [W_ij − γ k_i k_j / 2m] δ(c_i, c_j), direct double sum.
/// Throws DataError when the network has no edge weight or `p` does not
/// cover exactly the network's nodes.
double modularity(const WeightedNetwork& n, const Partition& p, double resolution = 1.0);

/// Same quantity via per-cluster Σ_in / Σ_tot totals, the form louvain tracks.
double modularity_from_totals(const WeightedNetwork& n, const Partition& p, double resolution = 1.0);

/// Multi-level Louvain with a node-level refinement pass after each
/// aggregation round, best of eight runs. The first run visits nodes in index
/// order when seed == 0 and in a seed-determined permutation otherwise; the
/// others use permutations derived from the seed. Equal-gain candidates
/// resolve to the lowest cluster id and equal-Q runs to the earliest.
/// Edgeless networks give all singletons.
Partition louvain(const WeightedNetwork& n, double resolution = 1.0, std::uint64_t seed = 0);

/// Hubert–Arabie ARI. Both partitions trivial in the same way gives 1.
/// Throws DataError when node sets differ.
double adjusted_rand_index(const Partition& a, const Partition& b);

struct LabelPartition {
  Partition partition;                // labelled nodes only, cluster = scale index
  std::vector<std::string> excluded;  // nodes without a usable bias_label
};

/// Groups nodes by their bias_label attribute. Unlabelled nodes are excluded
/// and listed; a label outside the scale throws DataError.
LabelPartition bias_partition(const WeightedNetwork& n, const BiasScale& scale);

enum class Level { kArticle, kDomain };
std::string_view level_name(Level level);

struct EvaluationReport {
  std::string event_id;
  Level level = Level::kArticle;
  std::optional<double> ari;               // absent when no node is labelled
  std::optional<double> label_modularity;  // absent when the labelled subgraph has no weight
  std::size_t cluster_count = 0;
  std::size_t node_count = 0;
  std::size_t excluded_count = 0;

  /// One JSON object, no trailing newline.
  std::string to_json() const;
};

struct Evaluation {
  Partition clusters;  // louvain over the whole network
  EvaluationReport report;
};

/// Clusters `n` and compares the clusters with the bias labels on the
/// labelled nodes.
Evaluation evaluate(const WeightedNetwork& n, std::string event_id, Level level, const BiasScale& scale,
                    double resolution = 1.0, std::uint64_t seed = 0);

struct EventPartition {
  std::string event_id;
  Partition partition;  // over that event's domains
};

/// M_ij = fraction of events in which i and j share a cluster; domains absent
/// from an event count as singletons there. Rows follow `all_domains`.
WeightedNetwork coassociation_network(std::span<const EventPartition> per_event,
                                      std::span<const std::string> all_domains);

/// Louvain on the co-association network. Throws DataError for fewer than two
/// events or an empty domain set.
Partition ensemble_clusters(std::span<const EventPartition> per_event, std::span<const std::string> all_domains,
                            double resolution = 1.0, std::uint64_t seed = 0);

}  // namespace textnet
