#pragma once

#include "netshift/block_model.hpp"
#include "netshift/random.hpp"
#include "netshift/temporal_graph.hpp"

namespace netshift {

/// Draws an undirected snapshot: every pair u < v gets an independent
/// Bernoulli(Q_{g_u g_v}) link or Poisson(Q_{g_u g_v}) multiplicity. Degree-
/// corrected models use the rate Q_rs * w_u * w_v (probabilities capped at 1).
/// Cost is proportional to the number of links drawn for uncorrected models
/// and for Poisson degree correction, and O(N^2) for Bernoulli degree correction.
Snapshot sample_graph(const BlockModel& model, const Partition& partition, Rng& rng);

}  // namespace netshift
