#include "textnet/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "textnet/error.hpp"
#include "textnet/io.hpp"
#include "textnet/kernels.hpp"

namespace textnet {

SweepGrid SweepGrid::defaults() {
  std::vector<double> v;
  for (int i = 1; i <= 9; ++i) v.push_back(i / 10.0);
  v.push_back(0.99);
  return SweepGrid{v, v};
}

namespace {

void check_axis(const std::vector<double>& values, const char* name, bool closed_top) {
  if (values.empty()) throw ConfigError(std::string(name) + " grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const bool in_range = v > 0.0 && (closed_top ? v <= 1.0 : v < 1.0);
    if (!in_range) throw ConfigError(fmt::format("{} grid value {} out of range", name, v));
    if (i > 0 && !(values[i - 1] < v)) throw ConfigError(std::string(name) + " grid must be strictly ascending");
  }
}

}  // namespace

void SweepGrid::validate() const {
  check_axis(tau1_values, "tau1", false);
  check_axis(tau2_values, "tau2", true);
}

std::string DistanceSurface::to_csv() const {
  std::string out = "tau";
  for (double a : axis) out += fmt::format(",{}", a);
  out += "\n";
  for (std::size_t i = 0; i < axis.size(); ++i) {
    out += fmt::format("{}", axis[i]);
    for (std::size_t j = 0; j < axis.size(); ++j) out += "," + io::fixed6(at(i, j));
    out += "\n";
  }
  return out;
}

double network_distance(const WeightedNetwork& a, const WeightedNetwork& b) {
  if (a.size() != b.size()) throw DataError("network_distance: node counts differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.node(i).id != b.node(i).id) throw DataError("network_distance: node sets or orders differ");
  }
  const std::size_t n = a.size();
  if (n <= 1) return 0.0;
  // Diagonals are zero in both, so the full-matrix sum equals the off-diagonal sum.
  const double total = kernels::sum_abs_diff(a.adjacency(), b.adjacency());
  return total / static_cast<double>(n * (n - 1));
}

SweepResult run_sweep(std::span<const ScoredEvent> events, const SweepGrid& grid, Metric metric, unsigned threads) {
  grid.validate();
  if (events.empty()) throw DataError("sweep needs at least one event");

  std::vector<const ScoredEvent*> sorted;
  for (const auto& e : events) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->event_id < b->event_id; });

  const std::size_t n1 = grid.tau1_values.size();
  const std::size_t n2 = grid.tau2_values.size();
  const std::size_t ne = sorted.size();
  const std::size_t cells = ne * n1 * n2;
  std::vector<WeightedNetwork> nets(cells);
  auto cell = [&](std::size_t e, std::size_t i1, std::size_t i2) { return (e * n1 + i1) * n2 + i2; };

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const std::size_t e = c / (n1 * n2);
      const std::size_t i1 = (c / n2) % n1;
      const std::size_t i2 = c % n2;
      MatchParams p{grid.tau1_values[i1], grid.tau2_values[i2]};
      nets[c] = build_event_network(*sorted[e], p, metric).network;
    }
  };
  threads = std::max(1U, threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  SweepResult result;
  result.tau1 = {grid.tau1_values, std::vector<double>(n1 * n1, 0.0)};
  result.tau2 = {grid.tau2_values, std::vector<double>(n2 * n2, 0.0)};
  for (std::size_t v = 0; v < n1; ++v) {
    for (std::size_t w = v + 1; w < n1; ++w) {
      double sum = 0.0;
      for (std::size_t e = 0; e < ne; ++e) {
        for (std::size_t b = 0; b < n2; ++b) sum += network_distance(nets[cell(e, v, b)], nets[cell(e, w, b)]);
      }
      const double mean = sum / static_cast<double>(ne * n2);
      result.tau1.values[v * n1 + w] = mean;
      result.tau1.values[w * n1 + v] = mean;
    }
  }
  for (std::size_t v = 0; v < n2; ++v) {
    for (std::size_t w = v + 1; w < n2; ++w) {
      double sum = 0.0;
      for (std::size_t e = 0; e < ne; ++e) {
        for (std::size_t a = 0; a < n1; ++a) sum += network_distance(nets[cell(e, a, v)], nets[cell(e, a, w)]);
      }
      const double mean = sum / static_cast<double>(ne * n1);
      result.tau2.values[v * n2 + w] = mean;
      result.tau2.values[w * n2 + v] = mean;
    }
  }
  for (std::size_t e = 0; e < ne; ++e) {
    result.event_ids.push_back(sorted[e]->event_id);
    std::vector<std::size_t> counts(n1 * n2);
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      for (std::size_t i2 = 0; i2 < n2; ++i2) counts[i1 * n2 + i2] = nets[cell(e, i1, i2)].edge_count();
    }
    result.edge_counts.push_back(std::move(counts));
  }
  return result;
}

}  // namespace textnet
