#include "netshift/description_length.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace netshift {
namespace {

double model_terms(std::size_t k, double links, double nodes, std::span<const double> sizes) {
  const double kd = static_cast<double>(k);
  double total = log_multiset(kd * (kd + 1.0) / 2.0, links) + log_multiset(kd, links);
  total += std::lgamma(nodes + 1.0);
  for (double size : sizes) total -= size;
  return total;
}

}  // namespace

double log_multiset(double n, double m) {
  if (n < 0.0 || m < 0.0) throw std::invalid_argument("multiset coefficient needs n, m >= 0");
  if (m == 0.0) return 0.0;
  if (n == 0.0) throw std::invalid_argument("no multiset of positive size over zero kinds");
  return std::lgamma(n + m) - std::lgamma(m + 1.0) - std::lgamma(n);
}

double description_length(const MultiGraph& graph, const Partition& partition) {
  const auto counts = block_counts(graph, partition);
  const auto k = partition.block_count();
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r; s < k; ++s) total += log_multiset(counts.pairs(r, s), counts.links(r, s));
  }
  return total + model_terms(k, static_cast<double>(graph.total_multiplicity()),
                             static_cast<double>(graph.node_count()), counts.nodes);
}

double description_length(const Snapshot& snapshot, const Partition& partition) {
  if (!snapshot.directed()) return description_length(MultiGraph(snapshot), partition);
  if (partition.node_count() != snapshot.node_count()) {
    throw std::invalid_argument("partition and snapshot disagree on node count");
  }
  const auto k = partition.block_count();
  std::vector<double> sizes(k, 0.0);
  for (auto g : partition.labels()) sizes[g] += 1.0;
  BlockMatrix links(k);
  for (const auto& e : snapshot.edges()) links(partition[e.u], partition[e.v]) += e.count;
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = 0; s < k; ++s) total += log_multiset(sizes[r] * sizes[s], links(r, s));
  }
  return total + model_terms(k, static_cast<double>(snapshot.total_multiplicity()),
                             static_cast<double>(snapshot.node_count()), sizes);
}

}  // namespace netshift
