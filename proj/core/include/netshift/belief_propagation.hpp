#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netshift/block_model.hpp"
#include "netshift/multigraph.hpp"
#include "netshift/random.hpp"

namespace netshift {

/// Belief-propagation state over a MultiGraph with K blocks.
///
/// Only linked pairs carry explicit messages; the message between two unlinked
/// nodes is taken to be the sender's marginal. Storage is therefore
/// (slot_count + node_count) * K values, i.e. linear in the number of links.
struct MessageState {
  std::size_t block_count = 0;
  std::vector<double> messages;   // messages[slot * K + r] = psi^{u->v}_r, slot in row u
  std::vector<double> marginals;  // marginals[u * K + r] = psi^u_r

  std::span<const double> message(std::size_t slot) const noexcept {
    return {messages.data() + slot * block_count, block_count};
  }
  std::span<double> message(std::size_t slot) noexcept {
    return {messages.data() + slot * block_count, block_count};
  }
  std::span<const double> marginal(std::size_t u) const noexcept {
    return {marginals.data() + u * block_count, block_count};
  }
  std::span<double> marginal(std::size_t u) noexcept {
    return {marginals.data() + u * block_count, block_count};
  }

  /// Number of stored probabilities.
  std::size_t stored_values() const noexcept { return messages.size() + marginals.size(); }
};

MessageState uniform_messages(const MultiGraph& graph, std::size_t block_count);

/// Each node's marginal drawn from a symmetric Dirichlet(1); outgoing messages copy it.
MessageState random_messages(const MultiGraph& graph, std::size_t block_count, Rng& rng);

/// One-hot on the partition label, mixed with `smoothing` of the uniform distribution.
MessageState messages_from_partition(const MultiGraph& graph, const Partition& partition,
                                     double smoothing);

/// g_u = argmax_r psi^u_r, ties to the lowest block index.
Partition map_partition(const MessageState& state);

struct SweepOptions {
  double damping = 0.7;  // new = (1 - damping) * old + damping * updated
  // Include the mean field of unlinked pairs. Disabling it conditions only on
  // observed links, which makes BP exact on trees.
  bool non_edge_field = true;
};

/// One sweep over nodes 0..N-1, updating every marginal and outgoing message in
/// place. Cost is O((N + M) K^2). Returns the largest residual |updated - old|
/// across messages and marginals. Throws NumericalError when a normalizer
/// vanishes for every block.
double bp_sweep(const MultiGraph& graph, const BlockModel& model, MessageState& state,
                const SweepOptions& options = {});

/// Re-estimates n and Q from the messages (expected block sizes and expected
/// link counts per expected pair count). Unlinked pairs only enter through the
/// closed-form denominators. The returned model keeps `current`'s family and
/// degree correction.
BlockModel estimate_parameters(const MultiGraph& graph, const BlockModel& current,
                               const MessageState& state);

}  // namespace netshift
