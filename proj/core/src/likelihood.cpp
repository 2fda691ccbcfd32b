#include "netshift/likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "netshift/errors.hpp"

namespace netshift {
namespace {

double safe_log(double x, double floor) { return std::log(std::max(x, floor)); }

void check_shapes(const MultiGraph& graph, const Partition& partition, const BlockModel& model) {
  if (partition.node_count() != graph.node_count()) {
    throw std::invalid_argument("partition and graph disagree on node count");
  }
  if (partition.block_count() != model.block_count() || model.Q.size() != model.block_count()) {
    throw std::invalid_argument("partition and model disagree on block count");
  }
  if (model.degree_correction && model.degree_correction->weight.size() != graph.node_count()) {
    throw std::invalid_argument("degree-correction factors do not match the graph");
  }
}

double prior_term(const BlockCounts& counts, const BlockModel& model) {
  double total = 0.0;
  for (std::size_t r = 0; r < counts.nodes.size(); ++r) {
    if (counts.nodes[r] > 0.0) total += counts.nodes[r] * std::log(model.n[r]);
  }
  return total;
}

}  // namespace

double bernoulli_log_likelihood(const MultiGraph& graph, const Partition& partition,
                                const BlockModel& model) {
  check_shapes(graph, partition, model);
  if (graph.max_multiplicity() > 1) {
    throw std::invalid_argument("Bernoulli likelihood needs a simple graph (multiplicity <= 1)");
  }
  for (double q : model.Q.values()) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("Bernoulli Q outside [0, 1]");
  }
  const auto counts = block_counts(graph, partition);
  double total = prior_term(counts, model);
  const auto k = model.block_count();

  if (!model.degree_correction) {
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t s = r; s < k; ++s) {
        const double m = counts.links(r, s);
        const double absent = counts.pairs(r, s) - m;
        const double q = model.Q(r, s);
        if (m > 0.0) total += m * safe_log(q, kBernoulliFloor);
        if (absent > 0.0) total += absent * safe_log(1.0 - q, kBernoulliFloor);
      }
    }
    return total;
  }

  // Degree-corrected pair probabilities do not factor by block; sum pairs directly.
  const auto n = graph.node_count();
  const auto& w = model.degree_correction->weight;
  for (NodeId u = 0; u < n; ++u) {
    std::size_t slot = graph.row_begin(u);
    const auto end = graph.row_end(u);
    for (NodeId v = u + 1; v < n; ++v) {
      while (slot < end && graph.target(slot) < v) ++slot;
      const bool linked = slot < end && graph.target(slot) == v;
      const double p = std::min(model.Q(partition[u], partition[v]) * w[u] * w[v], 1.0);
      total += linked ? safe_log(p, kBernoulliFloor) : safe_log(1.0 - p, kBernoulliFloor);
    }
  }
  return total;
}

double poisson_log_likelihood(const MultiGraph& graph, const Partition& partition,
                              const BlockModel& model) {
  check_shapes(graph, partition, model);
  const auto counts = block_counts(graph, partition);
  double total = prior_term(counts, model) - graph.log_factorial_sum();
  const auto k = model.block_count();

  if (!model.degree_correction) {
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t s = r; s < k; ++s) {
        const double m = counts.links(r, s);
        const double q = model.Q(r, s);
        if (m > 0.0) {
          if (!(q >= 0.0)) throw NumericalError("Poisson rate is not a number");
          total += m * safe_log(q, kPoissonFloor);
        }
        total -= counts.pairs(r, s) * q;
      }
    }
    return total;
  }

  const auto& w = model.degree_correction->weight;
  for (const auto& e : graph.edges()) {
    const double rate = model.Q(partition[e.u], partition[e.v]) * w[e.u] * w[e.v];
    total += e.count * safe_log(rate, kPoissonFloor);
  }
  // Expected multiplicity summed over all pairs, grouped by block pair.
  std::vector<double> weight_sum(k, 0.0), weight_sq(k, 0.0);
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    weight_sum[partition[u]] += w[u];
    weight_sq[partition[u]] += w[u] * w[u];
  }
  for (std::size_t r = 0; r < k; ++r) {
    total -= model.Q(r, r) * 0.5 * (weight_sum[r] * weight_sum[r] - weight_sq[r]);
    for (std::size_t s = r + 1; s < k; ++s) total -= model.Q(r, s) * weight_sum[r] * weight_sum[s];
  }
  return total;
}

double log_likelihood(const MultiGraph& graph, const Partition& partition, const BlockModel& model) {
  return model.family == Family::bernoulli ? bernoulli_log_likelihood(graph, partition, model)
                                           : poisson_log_likelihood(graph, partition, model);
}

}  // namespace netshift
