#include "textnet/analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "textnet/error.hpp"
#include "textnet/io.hpp"

namespace textnet {

Partition::Partition(std::vector<std::string> node_ids, std::vector<std::size_t> labels)
    : ids_(std::move(node_ids)), labels_(std::move(labels)) {
  if (ids_.size() != labels_.size()) throw DataError("partition ids and labels differ in length");
  std::set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw DataError("partition lists node '" + id + "' twice");
  }
}

std::optional<std::size_t> Partition::label_of(std::string_view id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return labels_[static_cast<std::size_t>(it - ids_.begin())];
}

std::size_t Partition::cluster_count() const { return std::set<std::size_t>(labels_.begin(), labels_.end()).size(); }

Partition Partition::canonical() const {
  std::map<std::size_t, std::size_t> remap;
  std::vector<std::size_t> out;
  out.reserve(labels_.size());
  for (auto l : labels_) {
    auto [it, _] = remap.emplace(l, remap.size());
    out.push_back(it->second);
  }
  return Partition(ids_, std::move(out));
}

Partition Partition::restricted_to(std::span<const std::string> ids) const {
  std::vector<std::size_t> labels;
  labels.reserve(ids.size());
  for (const auto& id : ids) {
    auto l = label_of(id);
    if (!l) throw DataError("partition has no node '" + id + "'");
    labels.push_back(*l);
  }
  return Partition({ids.begin(), ids.end()}, std::move(labels));
}

std::string Partition::to_csv() const {
  std::string out = "node_id,cluster\n";
  for (std::size_t i = 0; i < ids_.size(); ++i) out += io::csv_field(ids_[i]) + "," + std::to_string(labels_[i]) + "\n";
  return out;
}

Partition Partition::from_csv(std::string_view csv) {
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    auto nl = csv.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv.size();
    auto line = csv.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (io::trim(line).empty()) continue;
    auto fields = io::split_csv_line(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "node_id") continue;
    if (fields.size() != 2) throw DataError("partition csv line " + std::to_string(line_no) + ": expected 2 fields");
    try {
      labels.push_back(std::stoul(fields[1]));
    } catch (const std::logic_error&) {
      throw DataError("partition csv line " + std::to_string(line_no) + ": bad cluster id");
    }
    ids.push_back(fields[0]);
  }
  return Partition(std::move(ids), std::move(labels));
}

namespace {

// Labels of `p` in network node order.
std::vector<std::size_t> aligned_labels(const WeightedNetwork& n, const Partition& p) {
  if (p.size() != n.size()) throw DataError("partition does not cover the network's nodes");
  std::vector<std::size_t> labels(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    auto l = p.label_of(n.node(i).id);
    if (!l) throw DataError("partition has no node '" + n.node(i).id + "'");
    labels[i] = *l;
  }
  return labels;
}

// Dense symmetric weights with an explicit diagonal, as used at every Louvain level.
struct LevelGraph {
  std::size_t n = 0;
  std::vector<double> w;

  double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }
  std::vector<double> strengths() const {
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) k[i] += at(i, j);
    }
    return k;
  }
};

double totals_modularity(const LevelGraph& g, std::span<const std::size_t> comm, double resolution) {
  const auto k = g.strengths();
  const double two_m = std::accumulate(k.begin(), k.end(), 0.0);
  const std::size_t clusters = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> in(clusters, 0.0);
  std::vector<double> tot(clusters, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    tot[comm[i]] += k[i];
    for (std::size_t j = 0; j < g.n; ++j) {
      if (comm[i] == comm[j]) in[comm[i]] += g.at(i, j);
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < clusters; ++c) q += in[c] / two_m - resolution * (tot[c] / two_m) * (tot[c] / two_m);
  return q;
}

LevelGraph to_level_graph(const WeightedNetwork& n) { return LevelGraph{n.size(), n.adjacency()}; }

std::vector<std::size_t> dense_labels(std::span<const std::size_t> labels) {
  std::map<std::size_t, std::size_t> remap;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(remap.emplace(l, remap.size()).first->second);
  return out;
}

constexpr double kMoveEpsilon = 1e-12;
constexpr double kLevelGain = 1e-9;

// Local moving until no single node improves Q. Starts from `comm` when it
// already labels every node, from singletons otherwise. A node may also leave
// for an empty community. Returns whether anything moved; `comm` ends dense.
bool local_moving(const LevelGraph& g, double resolution, std::mt19937_64* rng, std::vector<std::size_t>& comm) {
  const auto k = g.strengths();
  const double two_m = std::accumulate(k.begin(), k.end(), 0.0);
  if (comm.size() != g.n) {
    comm.resize(g.n);
    std::iota(comm.begin(), comm.end(), 0);
  }
  std::vector<double> tot(g.n, 0.0);
  std::vector<std::size_t> members(g.n, 0);
  for (std::size_t i = 0; i < g.n; ++i) {
    tot[comm[i]] += k[i];
    ++members[comm[i]];
  }
  std::vector<std::size_t> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  if (rng != nullptr) std::shuffle(order.begin(), order.end(), *rng);

  std::vector<double> link(g.n, 0.0);
  std::vector<std::size_t> touched;
  bool any_move = false;
  for (int pass = 0; pass < 10000; ++pass) {
    bool moved = false;
    for (auto i : order) {
      if (k[i] == 0.0) continue;
      touched.clear();
      for (std::size_t j = 0; j < g.n; ++j) {
        if (j == i || g.at(i, j) == 0.0) continue;
        if (link[comm[j]] == 0.0) touched.push_back(comm[j]);
        link[comm[j]] += g.at(i, j);
      }
      const std::size_t old = comm[i];
      tot[old] -= k[i];
      --members[old];
      const double scale = resolution * k[i] / two_m;
      const double stay = link[old] - tot[old] * scale;
      std::sort(touched.begin(), touched.end());
      std::size_t best = old;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (auto c : touched) {
        if (c == old) continue;
        const double gain = link[c] - tot[c] * scale;
        if (gain > best_gain + kMoveEpsilon) {
          best_gain = gain;
          best = c;
        }
      }
      if (best == old || !(best_gain > stay + kMoveEpsilon)) {
        best = old;
        best_gain = stay;
      }
      if (members[old] > 0 && 0.0 > best_gain + kMoveEpsilon) {
        best = static_cast<std::size_t>(std::find(members.begin(), members.end(), 0U) - members.begin());
      }
      tot[best] += k[i];
      ++members[best];
      if (best != old) {
        comm[i] = best;
        moved = true;
        any_move = true;
      }
      for (auto c : touched) link[c] = 0.0;
      link[old] = 0.0;
    }
    if (!moved) break;
  }
  comm = dense_labels(comm);
  return any_move;
}

// Kernighan-Lin sweeps: every node is moved once per sweep to its best
// community (an empty one included) even when the gain is negative, and the
// best state seen is kept. Escapes optima that single positive moves cannot
// leave. Returns whether Q improved; `comm` ends dense.
bool kl_refine(const LevelGraph& g, double resolution, std::span<const std::size_t> order,
               std::vector<std::size_t>& comm) {
  const std::size_t n = g.n;
  const auto k = g.strengths();
  const double two_m = std::accumulate(k.begin(), k.end(), 0.0);
  bool improved = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    // link[i * n + c]: weight from i to community c, self-loop excluded.
    std::vector<double> link(n * n, 0.0);
    std::vector<double> tot(n, 0.0);
    std::vector<std::size_t> members(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      tot[comm[i]] += k[i];
      ++members[comm[i]];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) link[i * n + comm[j]] += g.at(i, j);
      }
    }
    std::vector<bool> locked(n, false);
    auto current = comm;
    double q = 0.0, best_q = 0.0;
    std::vector<std::size_t> best_state = comm;
    for (std::size_t step = 0; step < n; ++step) {
      double best_gain = -std::numeric_limits<double>::infinity();
      std::size_t best_node = n, best_target = n;
      const std::size_t empty = static_cast<std::size_t>(std::find(members.begin(), members.end(), 0U) - members.begin());
      std::vector<std::size_t> targets;
      for (std::size_t c = 0; c < n; ++c) {
        if (members[c] > 0 || c == empty) targets.push_back(c);
      }
      for (auto i : order) {
        if (locked[i] || k[i] == 0.0) continue;
        const std::size_t a = current[i];
        for (auto c : targets) {
          if (c == a || (c == empty && members[a] == 1)) continue;
          const double gain = 2.0 * (link[i * n + c] - link[i * n + a]) / two_m -
                              resolution * 2.0 * k[i] * (tot[c] - tot[a] + k[i]) / (two_m * two_m);
          if (gain > best_gain + kMoveEpsilon) {
            best_gain = gain;
            best_node = i;
            best_target = c;
          }
        }
      }
      if (best_node == n) break;
      const std::size_t a = current[best_node];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == best_node) continue;
        link[j * n + a] -= g.at(j, best_node);
        link[j * n + best_target] += g.at(j, best_node);
      }
      tot[a] -= k[best_node];
      tot[best_target] += k[best_node];
      --members[a];
      ++members[best_target];
      current[best_node] = best_target;
      locked[best_node] = true;
      q += best_gain;
      if (q > best_q + kLevelGain) {
        best_q = q;
        best_state = current;
      }
    }
    if (!(best_q > kLevelGain)) break;
    comm = dense_labels(best_state);
    improved = true;
  }
  return improved;
}

LevelGraph aggregate(const LevelGraph& g, std::span<const std::size_t> comm) {
  const std::size_t c = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
  LevelGraph out{c, std::vector<double>(c * c, 0.0)};
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) out.w[comm[i] * c + comm[j]] += g.at(i, j);
  }
  return out;
}

std::vector<std::string> ids_of(const WeightedNetwork& n) {
  std::vector<std::string> ids;
  ids.reserve(n.size());
  for (const auto& node : n.nodes()) ids.push_back(node.id);
  return ids;
}

}  // namespace

double modularity(const WeightedNetwork& n, const Partition& p, double resolution) {
  const auto labels = aligned_labels(n, p);
  std::vector<double> k(n.size(), 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t j = 0; j < n.size(); ++j) k[i] += n.weight(i, j);
    two_m += k[i];
  }
  if (!(two_m > 0.0)) throw DataError("modularity undefined: network has zero total weight");
  double q = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t j = 0; j < n.size(); ++j) {
      if (labels[i] == labels[j]) q += n.weight(i, j) - resolution * k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

double modularity_from_totals(const WeightedNetwork& n, const Partition& p, double resolution) {
  const auto labels = dense_labels(aligned_labels(n, p));
  if (!(n.total_weight() > 0.0)) throw DataError("modularity undefined: network has zero total weight");
  return totals_modularity(to_level_graph(n), labels, resolution);
}

namespace {

constexpr int kLouvainRestarts = 8;

// One multi-level run with refinement. `rng` null visits nodes in index order.
std::vector<std::size_t> louvain_run(const LevelGraph& base, double resolution, std::mt19937_64* rng,
                                     std::vector<std::size_t> membership = {}) {
  if (membership.size() != base.n) {
    membership.resize(base.n);
    std::iota(membership.begin(), membership.end(), 0);
  }
  std::vector<std::size_t> visit(base.n);
  std::iota(visit.begin(), visit.end(), 0);
  if (rng != nullptr) std::shuffle(visit.begin(), visit.end(), *rng);
  double q = totals_modularity(base, membership, resolution);
  for (int round = 0; round < 1000; ++round) {
    LevelGraph g = aggregate(base, membership);
    for (;;) {
      std::vector<std::size_t> comm;
      if (!local_moving(g, resolution, rng, comm)) break;
      for (auto& m : membership) m = comm[m];
      g = aggregate(g, comm);
    }
    q = std::max(q, totals_modularity(base, membership, resolution));
    // Refinement on the input graph: positive single moves, then
    // Kernighan-Lin sweeps.
    auto refined = membership;
    const bool moved = local_moving(base, resolution, rng, refined);
    if (!kl_refine(base, resolution, visit, refined) && !moved) break;
    const double refined_q = totals_modularity(base, refined, resolution);
    if (refined_q - q <= kLevelGain) break;
    membership = std::move(refined);
    q = refined_q;
  }
  return membership;
}

// `comm` with node v moved to the community that costs the least Q, an
// empty one included. Returns nullopt when v has nowhere to go.
std::optional<std::vector<std::size_t>> nudge(const LevelGraph& g, double resolution, std::vector<std::size_t> comm,
                                              std::size_t v) {
  const auto k = g.strengths();
  const double two_m = std::accumulate(k.begin(), k.end(), 0.0);
  if (k[v] == 0.0) return std::nullopt;
  const std::size_t clusters = *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> link(clusters + 1, 0.0), tot(clusters + 1, 0.0);
  std::vector<std::size_t> members(clusters + 1, 0);
  for (std::size_t j = 0; j < g.n; ++j) {
    tot[comm[j]] += k[j];
    ++members[comm[j]];
    if (j != v) link[comm[j]] += g.at(v, j);
  }
  const std::size_t a = comm[v];
  std::size_t best = a;
  double best_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c <= clusters; ++c) {
    if (c == a || (c == clusters && members[a] == 1)) continue;
    const double gain = (link[c] - link[a]) - resolution * k[v] * (tot[c] - tot[a] + k[v]) / two_m;
    if (gain > best_gain + kMoveEpsilon) {
      best_gain = gain;
      best = c;
    }
  }
  if (best == a) return std::nullopt;
  comm[v] = best;
  return dense_labels(comm);
}

constexpr std::size_t kNudgeBudget = 64;

}  // namespace

Partition louvain(const WeightedNetwork& n, double resolution, std::uint64_t seed) {
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  std::vector<std::size_t> membership(n.size());
  std::iota(membership.begin(), membership.end(), 0);
  if (n.total_weight() > 0.0) {
    const LevelGraph base = to_level_graph(n);
    double best_q = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < kLouvainRestarts; ++r) {
      std::seed_seq seq{seed, static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      if (r == 0 && seed != 0) rng.seed(seed);
      auto found = louvain_run(base, resolution, r == 0 && seed == 0 ? nullptr : &rng);
      const double q = totals_modularity(base, found, resolution);
      if (q > best_q + kLevelGain) {
        best_q = q;
        membership = std::move(found);
      }
    }
    // Perturbation: push one node out of its cluster, then let the
    // multi-level phase regroup from there. Kept only when Q rises.
    std::mt19937_64 rng(seed);
    for (int pass = 0; pass < 10; ++pass) {
      bool improved = false;
      for (std::size_t v = 0; v < std::min(base.n, kNudgeBudget); ++v) {
        auto nudged = nudge(base, resolution, membership, v);
        if (!nudged) continue;
        auto found = louvain_run(base, resolution, seed == 0 ? nullptr : &rng, std::move(*nudged));
        const double q = totals_modularity(base, found, resolution);
        if (q > best_q + kLevelGain) {
          best_q = q;
          membership = std::move(found);
          improved = true;
        }
      }
      if (!improved) break;
    }
  }
  return Partition(ids_of(n), std::move(membership)).canonical();
}

namespace {

using Wide = __int128;

Wide choose2(std::uint64_t x) { return static_cast<Wide>(x) * (x - (x > 0 ? 1 : 0)) / 2; }

}  // namespace

// Pair counts are kept as integers so the single final division is the only
// rounding step.
double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw DataError("ARI needs partitions over the same nodes");
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> table;
  std::map<std::size_t, std::uint64_t> rows;
  std::map<std::size_t, std::uint64_t> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto lb = b.label_of(a.node_ids()[i]);
    if (!lb) throw DataError("ARI needs partitions over the same nodes; '" + a.node_ids()[i] + "' is missing");
    const std::size_t la = a.labels()[i];
    ++table[{la, *lb}];
    ++rows[la];
    ++cols[*lb];
  }
  Wide index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [_, v] : table) index += choose2(v);
  for (const auto& [_, v] : rows) sum_a += choose2(v);
  for (const auto& [_, v] : cols) sum_b += choose2(v);
  const Wide pairs = choose2(a.size());
  if (pairs == 0) return 1.0;
  // (index - a*b/N) / ((a+b)/2 - a*b/N), scaled by 2N.
  const Wide num = 2 * (pairs * index - sum_a * sum_b);
  const Wide den = pairs * (sum_a + sum_b) - 2 * sum_a * sum_b;
  if (den == 0) return 1.0;
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

LabelPartition bias_partition(const WeightedNetwork& n, const BiasScale& scale) {
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  LabelPartition out;
  for (const auto& node : n.nodes()) {
    const std::string* label = node.attribute("bias_label");
    if (label == nullptr || label->empty()) {
      out.excluded.push_back(node.id);
      continue;
    }
    auto idx = scale.index_of(*label);
    if (!idx) throw DataError("node '" + node.id + "' has unknown bias label '" + *label + "'");
    ids.push_back(node.id);
    labels.push_back(*idx);
  }
  out.partition = Partition(std::move(ids), std::move(labels));
  return out;
}

std::string_view level_name(Level level) { return level == Level::kArticle ? "article" : "domain"; }

std::string EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["event_id"] = event_id;
  j["level"] = level_name(level);
  j["ari"] = ari ? nlohmann::ordered_json(*ari) : nlohmann::ordered_json(nullptr);
  j["label_modularity"] = label_modularity ? nlohmann::ordered_json(*label_modularity) : nlohmann::ordered_json(nullptr);
  j["cluster_count"] = cluster_count;
  j["node_count"] = node_count;
  j["excluded_count"] = excluded_count;
  return j.dump();
}

Evaluation evaluate(const WeightedNetwork& n, std::string event_id, Level level, const BiasScale& scale,
                    double resolution, std::uint64_t seed) {
  Evaluation out{louvain(n, resolution, seed), {}};
  auto& r = out.report;
  r.event_id = std::move(event_id);
  r.level = level;
  r.node_count = n.size();
  r.cluster_count = out.clusters.cluster_count();

  const auto labelled = bias_partition(n, scale);
  r.excluded_count = labelled.excluded.size();
  if (labelled.partition.size() == 0) return out;

  r.ari = adjusted_rand_index(out.clusters.restricted_to(labelled.partition.node_ids()), labelled.partition);
  std::vector<std::size_t> keep;
  for (const auto& id : labelled.partition.node_ids()) keep.push_back(*n.index_of(id));
  const auto sub = n.subgraph(keep);
  if (sub.total_weight() > 0.0) r.label_modularity = modularity(sub, labelled.partition, resolution);
  return out;
}

WeightedNetwork coassociation_network(std::span<const EventPartition> per_event,
                                      std::span<const std::string> all_domains) {
  std::vector<NodeInfo> nodes;
  for (const auto& d : all_domains) nodes.push_back(NodeInfo{d, {}});
  WeightedNetwork net(std::move(nodes));
  const std::size_t n = all_domains.size();
  std::vector<double> together(n * n, 0.0);
  for (const auto& ev : per_event) {
    std::vector<std::optional<std::size_t>> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = ev.partition.label_of(all_domains[i]);
    for (const auto& id : ev.partition.node_ids()) {
      if (std::find(all_domains.begin(), all_domains.end(), id) == all_domains.end()) {
        throw DataError("event '" + ev.event_id + "' has domain '" + id + "' outside the domain set");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Absent domains get a fresh singleton, so they never share a cluster.
        if (label[i] && label[j] && *label[i] == *label[j]) together[i * n + j] += 1.0;
      }
    }
  }
  const double events = static_cast<double>(per_event.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (together[i * n + j] > 0.0) net.set_weight(i, j, together[i * n + j] / events);
    }
  }
  return net;
}

Partition ensemble_clusters(std::span<const EventPartition> per_event, std::span<const std::string> all_domains,
                            double resolution, std::uint64_t seed) {
  if (all_domains.empty()) throw DataError("ensemble needs a non-empty domain set");
  if (per_event.size() < 2) throw DataError("ensemble needs at least two events");
  return louvain(coassociation_network(per_event, all_domains), resolution, seed);
}

}  // namespace textnet
