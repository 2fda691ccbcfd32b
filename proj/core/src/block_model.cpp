#include "netshift/block_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace netshift {

std::string_view to_string(Family family) {
  return family == Family::bernoulli ? "bernoulli" : "poisson";
}

Family parse_family(std::string_view name) {
  if (name == "bernoulli") return Family::bernoulli;
  if (name == "poisson") return Family::poisson;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

double clamp_rate(Family family, double value) noexcept {
  if (family == Family::bernoulli) return std::clamp(value, kBernoulliFloor, 1.0 - kBernoulliFloor);
  return std::max(value, kPoissonFloor);
}

BlockMatrix::BlockMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : k_(rows.size()) {
  values_.reserve(k_ * k_);
  for (const auto& row : rows) {
    if (row.size() != k_) throw std::invalid_argument("block matrix must be square");
    values_.insert(values_.end(), row.begin(), row.end());
  }
}

bool BlockMatrix::symmetric(double tolerance) const noexcept {
  for (std::size_t r = 0; r < k_; ++r) {
    for (std::size_t s = r + 1; s < k_; ++s) {
      if (std::abs((*this)(r, s) - (*this)(s, r)) > tolerance) return false;
    }
  }
  return true;
}

double BlockModel::pair_rate(std::size_t r, std::size_t s, NodeId u, NodeId v) const noexcept {
  double rate = Q(r, s);
  if (degree_correction) rate *= degree_correction->weight[u] * degree_correction->weight[v];
  return clamp_rate(family, rate);
}

void BlockModel::validate() const {
  const auto k = n.size();
  if (k == 0) throw std::invalid_argument("block model needs at least one block");
  if (Q.size() != k) throw std::invalid_argument("Q must be K x K");
  double total = 0.0;
  for (double x : n) {
    if (!(x >= 0.0)) throw std::invalid_argument("block priors must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("block priors must sum to one");
  for (double q : Q.values()) {
    if (!(q >= 0.0)) throw std::invalid_argument("Q entries must be non-negative");
    if (family == Family::bernoulli && q > 1.0) {
      throw std::invalid_argument("Bernoulli Q entries must lie in [0, 1]");
    }
  }
  if (!Q.symmetric(1e-12)) throw std::invalid_argument("undirected models need a symmetric Q");
}

Partition::Partition(std::vector<BlockId> labels, std::size_t block_count)
    : labels_(std::move(labels)), block_count_(block_count) {
  for (auto g : labels_) {
    if (g >= block_count_) {
      throw std::invalid_argument("block label " + std::to_string(g) + " outside 0.." +
                                  std::to_string(block_count_));
    }
  }
}

Partition Partition::contiguous(std::span<const std::size_t> block_sizes) {
  std::vector<BlockId> labels;
  for (std::size_t r = 0; r < block_sizes.size(); ++r) {
    labels.insert(labels.end(), block_sizes[r], static_cast<BlockId>(r));
  }
  return Partition(std::move(labels), block_sizes.size());
}

std::vector<std::size_t> Partition::block_sizes() const {
  std::vector<std::size_t> sizes(block_count_, 0);
  for (auto g : labels_) ++sizes[g];
  return sizes;
}

BlockCounts block_counts(const MultiGraph& graph, const Partition& partition) {
  if (partition.node_count() != graph.node_count()) {
    throw std::invalid_argument("partition and graph disagree on node count");
  }
  const auto k = partition.block_count();
  BlockCounts c{std::vector<double>(k, 0.0), BlockMatrix(k), BlockMatrix(k)};
  for (auto g : partition.labels()) c.nodes[g] += 1.0;
  for (const auto& e : graph.edges()) {
    const auto r = partition[e.u];
    const auto s = partition[e.v];
    c.links(r, s) += e.count;
    if (r != s) c.links(s, r) += e.count;
  }
  for (std::size_t r = 0; r < k; ++r) {
    c.pairs(r, r) = c.nodes[r] * (c.nodes[r] - 1.0) / 2.0;
    for (std::size_t s = r + 1; s < k; ++s) {
      c.pairs(r, s) = c.pairs(s, r) = c.nodes[r] * c.nodes[s];
    }
  }
  return c;
}

DegreeCorrection apply_degree_correction(const MultiGraph& graph, const Partition& partition) {
  if (partition.node_count() != graph.node_count()) {
    throw std::invalid_argument("partition and graph disagree on node count");
  }
  const auto k = partition.block_count();
  std::vector<double> block_degree(k, 0.0);
  std::vector<double> block_size(k, 0.0);
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    block_degree[partition[u]] += graph.degree(static_cast<NodeId>(u));
    block_size[partition[u]] += 1.0;
  }
  DegreeCorrection dc;
  dc.theta.resize(graph.node_count());
  dc.weight.resize(graph.node_count());
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    const auto r = partition[u];
    if (block_degree[r] > 0.0) {
      dc.theta[u] = graph.degree(static_cast<NodeId>(u)) / block_degree[r];
    } else {
      dc.theta[u] = 1.0 / block_size[r];
      dc.degenerate = true;
    }
    dc.weight[u] = dc.theta[u] * block_size[r];
  }
  return dc;
}

}  // namespace netshift
