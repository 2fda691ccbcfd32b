#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netshift/belief_propagation.hpp"
#include "netshift/block_model.hpp"
#include "netshift/multigraph.hpp"

namespace netshift {

struct FitOptions {
  std::size_t restarts = 10;
  std::size_t max_sweeps = 500;       // BP sweeps per EM step
  std::size_t max_iterations = 100;   // EM steps per restart
  double tolerance = 1e-6;            // on message change and on parameter change
  double damping = 0.7;
  std::uint64_t seed = 0;
  bool non_edge_field = true;
  /// When set, restart 0 starts from this partition instead of random messages.
  std::optional<Partition> warm_start;
  double warm_smoothing = 0.05;
};

struct FitResult {
  BlockModel model;
  MessageState messages;
  Partition partition;  // MAP assignment, ties to the lowest block index
  double log_likelihood = 0.0;
  double description_length = 0.0;
  bool converged = false;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
  std::size_t best_restart = 0;
  std::vector<double> restart_log_likelihoods;
  std::vector<bool> restart_converged;
  std::size_t sweeps = 0;  // total over all restarts

  std::size_t block_count() const noexcept { return model.block_count(); }
};

/// EM fit with K blocks: alternate BP to convergence with parameter
/// re-estimation, over `restarts` random starts. The result is the MAP
/// partition and parameters with the highest complete-data log-likelihood seen
/// after any EM step of any start; a warm start also offers its own partition
/// with closed-form parameters. Restart i draws from the stream (seed, i), so
/// fits with more restarts extend those with fewer.
FitResult fit(const MultiGraph& graph, std::size_t block_count, Family family,
              bool degree_corrected, const FitOptions& options = {});

/// Fits every K in k_range and returns the one with the smallest description
/// length (ties to the smaller K).
FitResult fit_best_k(const MultiGraph& graph, std::span<const std::size_t> k_range, Family family,
                     bool degree_corrected, const FitOptions& options = {});

/// 1, 2, ..., k_max.
std::vector<std::size_t> k_range_up_to(std::size_t k_max);

}  // namespace netshift
