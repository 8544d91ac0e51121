#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "textnet/article_sim.hpp"
#include "textnet/event.hpp"
#include "textnet/networks.hpp"

namespace textnet {

struct SweepGrid {
  std::vector<double> tau1_values;
  std::vector<double> tau2_values;

  /// 0.1, 0.2, ..., 0.9, 0.99 on both axes.
  static SweepGrid defaults();
  /// Non-empty, strictly ascending, tau1 in (0,1), tau2 in (0,1].
  void validate() const;
};

/// Mean pairwise network distance indexed by one threshold axis.
struct DistanceSurface {
  std::vector<double> axis;
  std::vector<double> values;  // axis.size()², row-major

  double at(std::size_t i, std::size_t j) const { return values[i * axis.size() + j]; }
  /// Header and first column carry the axis values; entries use 6 decimals.
  std::string to_csv() const;
};

/// Σ|A − B| over ordered off-diagonal entries divided by N(N−1); 0 for N ≤ 1.
/// Throws DataError unless both networks list the same node ids in order.
double network_distance(const WeightedNetwork& a, const WeightedNetwork& b);

struct SweepResult {
  DistanceSurface tau1;
  DistanceSurface tau2;
  /// edge_counts[event][i1 * |tau2| + i2], events sorted by id.
  std::vector<std::vector<std::size_t>> edge_counts;
  std::vector<std::string> event_ids;
};

/// Builds the article network of every event at every (tau1, tau2) pair and
/// averages distances with equal event weight. Results do not depend on the
/// order of `events`. Parallel over grid cells when threads > 1.
SweepResult run_sweep(std::span<const ScoredEvent> events, const SweepGrid& grid, Metric metric = Metric::kEdit,
                      unsigned threads = 1);

}  // namespace textnet
