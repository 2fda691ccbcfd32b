#include "netshift/sampling.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace netshift {
namespace {

std::vector<std::vector<NodeId>> members_by_block(const Partition& partition) {
  std::vector<std::vector<NodeId>> members(partition.block_count());
  for (std::size_t u = 0; u < partition.node_count(); ++u) {
    members[partition[u]].push_back(static_cast<NodeId>(u));
  }
  return members;
}

// Visits the positions of successes in a run of `length` Bernoulli(p) trials
// by jumping geometric gaps.
template <class Visit>
void bernoulli_positions(std::uint64_t length, double p, Rng& rng, Visit&& visit) {
  if (length == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < length; ++i) visit(i);
    return;
  }
  std::geometric_distribution<std::uint64_t> gap(p);
  std::uint64_t pos = gap(rng);
  while (pos < length) {
    visit(pos);
    const auto step = gap(rng);
    if (step >= length - pos) break;
    pos += step + 1;
  }
}

void add_edge(std::vector<Edge>& edges, NodeId a, NodeId b, Multiplicity count) {
  edges.push_back(Edge{std::min(a, b), std::max(a, b), count});
}

void sample_plain(const BlockModel& model, const std::vector<std::vector<NodeId>>& members, Rng& rng,
                  std::vector<Edge>& edges) {
  const auto k = model.block_count();
  for (std::size_t r = 0; r < k; ++r) {
    const auto& a = members[r];
    for (std::size_t s = r; s < k; ++s) {
      const auto& b = members[s];
      const double q = model.Q(r, s);
      if (model.family == Family::bernoulli) {
        if (r == s) {
          // Pairs (i, j), i < j, enumerated row by row.
          const std::uint64_t n = a.size();
          std::uint64_t row = 0, row_start = 0;
          bernoulli_positions(n * (n - 1) / 2, q, rng, [&](std::uint64_t pos) {
            while (pos >= row_start + (n - 1 - row)) {
              row_start += n - 1 - row;
              ++row;
            }
            const auto col = row + 1 + (pos - row_start);
            add_edge(edges, a[row], a[col], 1);
          });
        } else {
          const std::uint64_t width = b.size();
          bernoulli_positions(a.size() * width, q, rng, [&](std::uint64_t pos) {
            add_edge(edges, a[pos / width], b[pos % width], 1);
          });
        }
        continue;
      }
      // Poisson: the block-pair total is Poisson(N_rs q), spread uniformly over its pairs.
      const double pairs = r == s ? 0.5 * a.size() * (a.size() - 1.0) : 1.0 * a.size() * b.size();
      if (pairs <= 0.0 || q <= 0.0) continue;
      std::poisson_distribution<std::uint64_t> total(pairs * q);
      const auto draws = total(rng);
      std::uniform_int_distribution<std::size_t> pick_a(0, a.size() - 1), pick_b(0, b.size() - 1);
      for (std::uint64_t i = 0; i < draws; ++i) {
        const auto x = a[pick_a(rng)];
        auto y = b[pick_b(rng)];
        while (r == s && y == x) y = b[pick_b(rng)];
        add_edge(edges, x, y, 1);
      }
    }
  }
}

void sample_corrected(const BlockModel& model, const Partition& partition,
                      const std::vector<std::vector<NodeId>>& members, Rng& rng,
                      std::vector<Edge>& edges) {
  const auto& w = model.degree_correction->weight;
  const auto n = partition.node_count();
  if (model.family == Family::bernoulli) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        const double p = std::min(model.Q(partition[u], partition[v]) * w[u] * w[v], 1.0);
        if (p > 0.0 && unit(rng) < p) edges.push_back(Edge{u, v, 1});
      }
    }
    return;
  }
  // Poisson: block-pair totals, endpoints drawn proportionally to their weights.
  const auto k = model.block_count();
  std::vector<std::discrete_distribution<std::size_t>> pick(k);
  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<double> weights;
    for (auto u : members[r]) {
      weights.push_back(w[u]);
      sum[r] += w[u];
      sum_sq[r] += w[u] * w[u];
    }
    if (!weights.empty()) pick[r] = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  }
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r; s < k; ++s) {
      const double mass = r == s ? 0.5 * (sum[r] * sum[r] - sum_sq[r]) : sum[r] * sum[s];
      const double rate = model.Q(r, s) * mass;
      if (!(rate > 0.0)) continue;
      std::poisson_distribution<std::uint64_t> total(rate);
      const auto draws = total(rng);
      for (std::uint64_t i = 0; i < draws; ++i) {
        const auto x = members[r][pick[r](rng)];
        auto y = members[s][pick[s](rng)];
        while (r == s && y == x) y = members[s][pick[s](rng)];
        add_edge(edges, x, y, 1);
      }
    }
  }
}

}  // namespace

Snapshot sample_graph(const BlockModel& model, const Partition& partition, Rng& rng) {
  if (partition.block_count() != model.block_count() || model.Q.size() != model.block_count()) {
    throw std::invalid_argument("partition and model disagree on block count");
  }
  const auto members = members_by_block(partition);
  std::vector<Edge> edges;
  if (model.degree_correction) {
    if (model.degree_correction->weight.size() != partition.node_count()) {
      throw std::invalid_argument("degree-correction factors do not match the partition");
    }
    sample_corrected(model, partition, members, rng, edges);
  } else {
    sample_plain(model, members, rng, edges);
  }
  return Snapshot(partition.node_count(), std::move(edges), false);
}

}  // namespace netshift
