#pragma once

#include "netshift/block_model.hpp"
#include "netshift/multigraph.hpp"

namespace netshift {

// Complete-data log-likelihoods ln P(A, g | n, Q). Terms with a zero
// coefficient vanish (0 ln 0 = 0); logarithms of probabilities or rates below
// the family floor are evaluated at the floor. Degree-corrected models use the
// pair rate Q_rs * w_u * w_v.

/// Requires a simple graph (all multiplicities 0 or 1).
double bernoulli_log_likelihood(const MultiGraph& graph, const Partition& partition,
                                const BlockModel& model);

double poisson_log_likelihood(const MultiGraph& graph, const Partition& partition,
                              const BlockModel& model);

/// Dispatches on model.family.
double log_likelihood(const MultiGraph& graph, const Partition& partition, const BlockModel& model);

}  // namespace netshift
