#pragma once

#include "netshift/block_model.hpp"
#include "netshift/multigraph.hpp"
#include "netshift/temporal_graph.hpp"

namespace netshift {

/// ln ((n; m)) = ln C(n + m - 1, m), the number of multisets of size m drawn
/// from n kinds, via log-gamma. ((0; 0)) = 1. Throws std::invalid_argument for
/// n = 0 with m > 0, where no multiset exists.
double log_multiset(double n, double m);

/// Description length of a partition:
///   sum_r ln ((C(N_r,2); m_rr)) + sum_{r<s} ln ((N_r N_s; m_rs))
///   + ln ((K(K+1)/2; M)) + ln ((K; M)) + ln N! - sum_r N_r.
/// Link counts use total multiplicity, so aggregated multigraphs are accepted.
double description_length(const MultiGraph& graph, const Partition& partition);

/// Same quantity for a snapshot. Directed snapshots replace the first line by
/// sum over ordered block pairs of ln ((N_r N_s; m_rs)), with m_rs counting
/// links from block r to block s.
double description_length(const Snapshot& snapshot, const Partition& partition);

}  // namespace netshift
