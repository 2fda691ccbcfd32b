#include "netshift/multigraph.hpp"

#include <algorithm>
#include <cmath>

namespace netshift {

MultiGraph::MultiGraph(const Snapshot& snapshot) : node_count_(snapshot.node_count()) {
  if (snapshot.directed()) {
    // Re-canonicalize as undirected so (u,v) and (v,u) merge.
    const Snapshot merged(snapshot.node_count(),
                          std::vector<Edge>(snapshot.edges().begin(), snapshot.edges().end()),
                          false);
    edges_.assign(merged.edges().begin(), merged.edges().end());
  } else {
    edges_.assign(snapshot.edges().begin(), snapshot.edges().end());
  }
  build();
}

MultiGraph::MultiGraph(std::size_t node_count, std::vector<Edge> edges) : node_count_(node_count) {
  const Snapshot canonical(node_count, std::move(edges), false);
  edges_.assign(canonical.edges().begin(), canonical.edges().end());
  build();
}

void MultiGraph::build() {
  const auto n = node_count_;
  offsets_.assign(n + 1, 0);
  degrees_.assign(n, 0.0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
    degrees_[e.u] += e.count;
    degrees_[e.v] += e.count;
    total_ += e.count;
    max_multiplicity_ = std::max(max_multiplicity_, e.count);
    log_factorial_sum_ += std::lgamma(static_cast<double>(e.count) + 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];

  const auto slots = offsets_[n];
  targets_.resize(slots);
  counts_.resize(slots);
  reverse_.resize(slots);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v) with u < v, so every row ends up sorted by target.
  for (const auto& e : edges_) {
    const auto su = fill[e.u]++;
    const auto sv = fill[e.v]++;
    targets_[su] = e.v;
    counts_[su] = e.count;
    targets_[sv] = e.u;
    counts_[sv] = e.count;
    reverse_[su] = sv;
    reverse_[sv] = su;
  }
}

}  // namespace netshift
