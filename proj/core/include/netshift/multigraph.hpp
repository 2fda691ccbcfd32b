#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netshift/temporal_graph.hpp"

namespace netshift {

/// Undirected multigraph in CSR form, the input type of the block-model engine.
///
/// Each linked pair {u, v} appears once in edges() (u < v) and twice in the
/// adjacency: slot e in row u points at v, and reverse(e) is the slot in row v
/// pointing back at u. Message-passing code stores the message u -> v at slot e.
class MultiGraph {
 public:
  MultiGraph() = default;
  /// Directed snapshots are symmetrized: A_uv + A_vu becomes the undirected multiplicity.
  explicit MultiGraph(const Snapshot& snapshot);
  MultiGraph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t pair_count() const noexcept { return edges_.size(); }
  std::size_t slot_count() const noexcept { return targets_.size(); }
  std::uint64_t total_multiplicity() const noexcept { return total_; }
  Multiplicity max_multiplicity() const noexcept { return max_multiplicity_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::size_t row_begin(NodeId u) const noexcept { return offsets_[u]; }
  std::size_t row_end(NodeId u) const noexcept { return offsets_[u + 1]; }
  std::size_t neighbor_count(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  NodeId target(std::size_t slot) const noexcept { return targets_[slot]; }
  Multiplicity multiplicity(std::size_t slot) const noexcept { return counts_[slot]; }
  std::size_t reverse(std::size_t slot) const noexcept { return reverse_[slot]; }

  /// Multiplicity-weighted degree d_u.
  double degree(NodeId u) const noexcept { return degrees_[u]; }
  std::span<const double> degrees() const noexcept { return degrees_; }

  /// Sum over linked pairs of ln(A_uv!), computed once at construction.
  double log_factorial_sum() const noexcept { return log_factorial_sum_; }

  /// C(N, 2), the number of node pairs.
  double pair_capacity() const noexcept {
    const auto n = static_cast<double>(node_count_);
    return n * (n - 1.0) / 2.0;
  }

 private:
  void build();

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<Multiplicity> counts_;
  std::vector<std::size_t> reverse_;
  std::vector<double> degrees_;
  std::uint64_t total_ = 0;
  Multiplicity max_multiplicity_ = 0;
  double log_factorial_sum_ = 0.0;
};

}  // namespace netshift
