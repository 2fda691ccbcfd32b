#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netshift/multigraph.hpp"

namespace netshift {

enum class Family { bernoulli, poisson };

std::string_view to_string(Family family);
/// Accepts "bernoulli" or "poisson"; throws std::invalid_argument otherwise.
Family parse_family(std::string_view name);

using BlockId = std::uint32_t;

// Clamping bounds applied to link probabilities and rates inside likelihood
// and message kernels.
inline constexpr double kBernoulliFloor = 1e-9;
inline constexpr double kPoissonFloor = 1e-12;

double clamp_rate(Family family, double value) noexcept;

/// Dense K x K matrix of block-pair parameters, row-major.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(std::size_t k, double fill = 0.0) : k_(k), values_(k * k, fill) {}
  BlockMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t size() const noexcept { return k_; }
  double& operator()(std::size_t r, std::size_t s) noexcept { return values_[r * k_ + s]; }
  double operator()(std::size_t r, std::size_t s) const noexcept { return values_[r * k_ + s]; }
  std::span<const double> values() const noexcept { return values_; }

  bool symmetric(double tolerance = 0.0) const noexcept;
  friend bool operator==(const BlockMatrix&, const BlockMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<double> values_;
};

/// Per-node degree-correction factors.
///
/// theta sums to one over the nodes of each block; weight_u = theta_u * N_{g_u}
/// is the same factor rescaled to mean one inside the block, which is what the
/// pair rate Q_rs * weight_u * weight_v uses so Q keeps its per-pair meaning.
struct DegreeCorrection {
  std::vector<double> theta;
  std::vector<double> weight;
  bool degenerate = false;  // some block had zero total degree
};

struct BlockModel {
  Family family = Family::poisson;
  std::vector<double> n;  // block priors n_r
  BlockMatrix Q;          // link probabilities (Bernoulli) or expected multiplicities (Poisson)
  std::optional<DegreeCorrection> degree_correction;

  std::size_t block_count() const noexcept { return n.size(); }
  bool degree_corrected() const noexcept { return degree_correction.has_value(); }

  /// Q_rs, scaled by the degree weights of u and v when degree corrected, clamped.
  double pair_rate(std::size_t r, std::size_t s, NodeId u, NodeId v) const noexcept;

  /// Throws std::invalid_argument when a BlockModel invariant is violated.
  void validate() const;
};

/// Hard assignment g_u of every node to one of K blocks.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<BlockId> labels, std::size_t block_count);

  /// First sizes[0] nodes in block 0, the next sizes[1] in block 1, and so on.
  static Partition contiguous(std::span<const std::size_t> block_sizes);

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t block_count() const noexcept { return block_count_; }
  BlockId operator[](std::size_t u) const noexcept { return labels_[u]; }
  std::span<const BlockId> labels() const noexcept { return labels_; }
  std::vector<std::size_t> block_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<BlockId> labels_;
  std::size_t block_count_ = 0;
};

/// Sufficient statistics of a graph under a partition (undirected counting).
struct BlockCounts {
  std::vector<double> nodes;  // N_r
  BlockMatrix links;          // m_rs, total multiplicity, symmetric
  BlockMatrix pairs;          // N_rs: C(N_r, 2) on the diagonal, N_r * N_s off it
};

BlockCounts block_counts(const MultiGraph& graph, const Partition& partition);

/// theta_u = d_u / sum of d_v over u's block. Blocks with zero total degree get
/// uniform theta and set the degenerate flag.
DegreeCorrection apply_degree_correction(const MultiGraph& graph, const Partition& partition);

}  // namespace netshift
