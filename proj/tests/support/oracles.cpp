#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace netshift::testing {
namespace {

using boost::multiprecision::cpp_dec_float_50;
using boost::multiprecision::cpp_int;

std::vector<std::vector<Multiplicity>> adjacency(const MultiGraph& graph) {
  const auto n = graph.node_count();
  std::vector<std::vector<Multiplicity>> a(n, std::vector<Multiplicity>(n, 0));
  for (const auto& e : graph.edges()) a[e.u][e.v] = a[e.v][e.u] = e.count;
  return a;
}

long double factorial(unsigned a) {
  long double f = 1.0L;
  for (unsigned i = 2; i <= a; ++i) f *= i;
  return f;
}

long double pair_probability(Family family, Multiplicity a, long double rate) {
  if (family == Family::bernoulli) return a == 1 ? rate : 1.0L - rate;
  return std::pow(rate, static_cast<long double>(a)) * std::exp(-rate) / factorial(a);
}

cpp_int binomial(const cpp_int& n, unsigned long long m) {
  cpp_int result = 1;
  for (unsigned long long i = 1; i <= m; ++i) {
    result *= n - m + i;
    result /= i;
  }
  return result;
}

double log_big(const cpp_int& x) {
  return static_cast<double>(boost::multiprecision::log(cpp_dec_float_50(x)));
}

// ln ((n; m)) = ln C(n + m - 1, m).
double exact_log_multiset(unsigned long long n, unsigned long long m) {
  if (m == 0) return 0.0;
  return log_big(binomial(cpp_int(n) + m - 1, m));
}

double exact_model_terms(std::size_t k, unsigned long long links, std::size_t nodes,
                         const std::vector<unsigned long long>& sizes) {
  double total = exact_log_multiset(k * (k + 1) / 2, links) + exact_log_multiset(k, links);
  cpp_int f = 1;
  for (std::size_t i = 2; i <= nodes; ++i) f *= i;
  total += log_big(f);
  for (const auto s : sizes) total -= static_cast<double>(s);
  return total;
}

double pmf(Family family, Multiplicity a, double rate) {
  return static_cast<double>(pair_probability(family, a, rate));
}

}  // namespace

std::vector<double> direct_degree_weights(const MultiGraph& graph, const Partition& partition) {
  const auto n = graph.node_count();
  const auto a = adjacency(graph);
  std::vector<double> degree(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) degree[u] += a[u][v];
  }
  std::vector<double> weight(n, 1.0);
  for (std::size_t u = 0; u < n; ++u) {
    double block_degree = 0.0, block_size = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (partition[v] == partition[u]) {
        block_degree += degree[v];
        block_size += 1.0;
      }
    }
    weight[u] = block_degree > 0.0 ? degree[u] * block_size / block_degree : 1.0;
  }
  return weight;
}

long double product_log_likelihood(const MultiGraph& graph, const Partition& partition,
                                   const BlockModel& model) {
  const auto n = graph.node_count();
  const auto a = adjacency(graph);
  std::vector<double> weight(n, 1.0);
  if (model.degree_corrected()) weight = direct_degree_weights(graph, partition);
  long double product = 1.0L;
  for (std::size_t u = 0; u < n; ++u) product *= model.n[partition[u]];
  long double log_total = std::log(product);
  for (std::size_t u = 0; u < n; ++u) {
    long double row = 1.0L;
    for (std::size_t v = u + 1; v < n; ++v) {
      const long double rate = static_cast<long double>(model.Q(partition[u], partition[v])) * weight[u] * weight[v];
      row *= pair_probability(model.family, a[u][v], rate);
    }
    log_total += std::log(row);
  }
  return log_total;
}

double exact_description_length(const MultiGraph& graph, const Partition& partition) {
  const auto k = partition.block_count();
  std::vector<unsigned long long> sizes(k, 0);
  for (auto g : partition.labels()) ++sizes[g];
  std::vector<std::vector<unsigned long long>> links(k, std::vector<unsigned long long>(k, 0));
  unsigned long long total_links = 0;
  for (const auto& e : graph.edges()) {
    const auto r = std::min(partition[e.u], partition[e.v]);
    const auto s = std::max(partition[e.u], partition[e.v]);
    links[r][s] += e.count;
    total_links += e.count;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    total += exact_log_multiset(sizes[r] * (sizes[r] - (sizes[r] > 0 ? 1 : 0)) / 2, links[r][r]);
    for (std::size_t s = r + 1; s < k; ++s) total += exact_log_multiset(sizes[r] * sizes[s], links[r][s]);
  }
  return total + exact_model_terms(k, total_links, graph.node_count(), sizes);
}

double exact_description_length_directed(const Snapshot& snapshot, const Partition& partition) {
  const auto k = partition.block_count();
  std::vector<unsigned long long> sizes(k, 0);
  for (auto g : partition.labels()) ++sizes[g];
  std::vector<std::vector<unsigned long long>> links(k, std::vector<unsigned long long>(k, 0));
  unsigned long long total_links = 0;
  for (const auto& e : snapshot.edges()) {
    links[partition[e.u]][partition[e.v]] += e.count;
    total_links += e.count;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = 0; s < k; ++s) total += exact_log_multiset(sizes[r] * sizes[s], links[r][s]);
  }
  return total + exact_model_terms(k, total_links, snapshot.node_count(), sizes);
}

std::vector<double> enumerated_marginals(const MultiGraph& graph, const BlockModel& model) {
  const auto n = graph.node_count();
  const auto k = model.block_count();
  std::vector<double> marginals(n * k, 0.0);
  std::vector<std::size_t> g(n, 0);
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) states *= k;
  std::vector<double> weights(states);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < states; ++code) {
    std::size_t c = code;
    for (std::size_t u = 0; u < n; ++u) {
      g[u] = c % k;
      c /= k;
    }
    double lw = 0.0;
    for (std::size_t u = 0; u < n; ++u) lw += std::log(model.n[g[u]]);
    for (const auto& e : graph.edges()) lw += std::log(pmf(model.family, e.count, model.Q(g[e.u], g[e.v])));
    weights[code] = lw;
    top = std::max(top, lw);
  }
  double z = 0.0;
  for (std::size_t code = 0; code < states; ++code) {
    const double w = std::exp(weights[code] - top);
    z += w;
    std::size_t c = code;
    for (std::size_t u = 0; u < n; ++u) {
      marginals[u * k + c % k] += w;
      c /= k;
    }
  }
  for (auto& m : marginals) m /= z;
  return marginals;
}

DenseBeliefs dense_belief_propagation(const MultiGraph& graph, const BlockModel& model,
                                      std::span<const double> initial_marginals, double damping,
                                      double tolerance, std::size_t max_sweeps) {
  const auto n = graph.node_count();
  const auto k = model.block_count();
  const auto a = adjacency(graph);
  DenseBeliefs beliefs;
  beliefs.node_count = n;
  beliefs.block_count = k;
  beliefs.marginals.assign(initial_marginals.begin(), initial_marginals.end());
  beliefs.messages.assign(n * n * k, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t r = 0; r < k; ++r) beliefs.messages[(u * n + v) * k + r] = initial_marginals[u * k + r];
    }
  }
  std::vector<double> log_factor(n * k), total(k), fresh(k);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      std::fill(total.begin(), total.end(), 0.0);
      for (std::size_t r = 0; r < k; ++r) total[r] = std::log(model.n[r]);
      for (std::size_t w = 0; w < n; ++w) {
        if (w == u) continue;
        for (std::size_t r = 0; r < k; ++r) {
          double acc = 0.0;
          for (std::size_t s = 0; s < k; ++s) {
            acc += pmf(model.family, a[u][w], model.Q(r, s)) * beliefs.messages[(w * n + u) * k + s];
          }
          log_factor[w * k + r] = std::log(acc);
          total[r] += log_factor[w * k + r];
        }
      }
      const auto normalized = [&](std::span<const double> logits) {
        const double top = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (std::size_t r = 0; r < k; ++r) z += (fresh[r] = std::exp(logits[r] - top));
        for (auto& f : fresh) f /= z;
      };
      normalized(total);
      for (std::size_t r = 0; r < k; ++r) {
        change = std::max(change, std::abs(fresh[r] - beliefs.marginals[u * k + r]));
        beliefs.marginals[u * k + r] = fresh[r];
      }
      std::vector<double> cavity(k);
      for (std::size_t v = 0; v < n; ++v) {
        if (v == u) continue;
        for (std::size_t r = 0; r < k; ++r) cavity[r] = total[r] - log_factor[v * k + r];
        normalized(cavity);
        for (std::size_t r = 0; r < k; ++r) {
          double& m = beliefs.messages[(u * n + v) * k + r];
          change = std::max(change, std::abs(fresh[r] - m));
          m = (1.0 - damping) * m + damping * fresh[r];
        }
      }
    }
    if (change < tolerance) {
      beliefs.converged = true;
      break;
    }
  }
  return beliefs;
}

DenseBeliefs dense_from_sparse(const MultiGraph& graph, const MessageState& state) {
  const auto n = graph.node_count();
  const auto k = state.block_count;
  DenseBeliefs beliefs;
  beliefs.node_count = n;
  beliefs.block_count = k;
  beliefs.marginals = state.marginals;
  beliefs.messages.assign(n * n * k, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t r = 0; r < k; ++r) beliefs.messages[(u * n + v) * k + r] = state.marginals[u * k + r];
    }
    for (auto e = graph.row_begin(static_cast<NodeId>(u)); e < graph.row_end(static_cast<NodeId>(u)); ++e) {
      const auto v = graph.target(e);
      for (std::size_t r = 0; r < k; ++r) beliefs.messages[(u * n + v) * k + r] = state.messages[e * k + r];
    }
  }
  return beliefs;
}

BlockModel dense_estimate(const MultiGraph& graph, const BlockModel& model, const DenseBeliefs& beliefs) {
  const auto n = beliefs.node_count;
  const auto k = beliefs.block_count;
  const auto a = adjacency(graph);
  std::vector<double> weight(n, 1.0);
  if (model.degree_correction) weight = model.degree_correction->weight;
  BlockModel next = model;
  for (std::size_t r = 0; r < k; ++r) {
    double mass = 0.0;
    for (std::size_t u = 0; u < n; ++u) mass += beliefs.marginals[u * k + r];
    next.n[r] = mass / static_cast<double>(n);
  }
  BlockMatrix links(k, 0.0), pairs(k, 0.0);
  std::vector<double> joint(k * k);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t s = 0; s < k; ++s) {
          pairs(r, s) += beliefs.marginals[u * k + r] * weight[u] * beliefs.marginals[v * k + s] * weight[v];
        }
      }
      if (a[u][v] == 0) continue;
      double z = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t s = 0; s < k; ++s) {
          const double rate = model.Q(r, s) * weight[u] * weight[v];
          joint[r * k + s] = pmf(model.family, a[u][v], model.family == Family::bernoulli ? std::min(rate, 1.0) : rate) *
                             beliefs.messages[(u * n + v) * k + r] * beliefs.messages[(v * n + u) * k + s];
          z += joint[r * k + s];
        }
      }
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t s = 0; s < k; ++s) links(r, s) += a[u][v] * joint[r * k + s] / z;
      }
    }
  }
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = 0; s < k; ++s) next.Q(r, s) = 0.5 * (links(r, s) + links(s, r)) / pairs(r, s);
  }
  return next;
}

double integrated_t_two_tailed(double t, double dof) {
  const double x = std::abs(t);
  const double c = std::exp(std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0)) /
                   std::sqrt(dof * std::numbers::pi);
  const auto density = [&](double y) { return c * std::pow(1.0 + y * y / dof, -(dof + 1.0) / 2.0); };
  const std::size_t intervals = 200000;
  const double h = x / static_cast<double>(intervals);
  double sum = density(0.0) + density(x);
  for (std::size_t i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * density(h * static_cast<double>(i));
  const double central = sum * h / 3.0;
  return std::clamp(1.0 - 2.0 * central, 0.0, 1.0);
}

double direct_segment_log_likelihood(std::span<const MultiGraph> snapshots, const Partition& partition,
                                     std::span<const double> n, const BlockMatrix& rate) {
  double total = 0.0;
  for (std::size_t u = 0; u < partition.node_count(); ++u) total += std::log(n[partition[u]]);
  for (const auto& g : snapshots) {
    const auto a = adjacency(g);
    for (std::size_t u = 0; u < g.node_count(); ++u) {
      for (std::size_t v = u + 1; v < g.node_count(); ++v) {
        const double q = rate(partition[u], partition[v]);
        const double count = a[u][v];
        if (count > 0.0) total += count * std::log(q) - std::lgamma(count + 1.0);
        total -= q;
      }
    }
  }
  return total;
}

EnumeratedSegmentFit enumerate_segment_fit(std::span<const MultiGraph> snapshots, std::size_t k) {
  if (snapshots.empty()) throw std::invalid_argument("no snapshots");
  const auto n = snapshots.front().node_count();
  const double length = static_cast<double>(snapshots.size());
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) states *= k;
  EnumeratedSegmentFit best;
  bool have = false;
  std::vector<BlockId> labels(n);
  for (std::size_t code = 0; code < states; ++code) {
    std::size_t c = code;
    for (std::size_t u = 0; u < n; ++u) {
      labels[u] = static_cast<BlockId>(c % k);
      c /= k;
    }
    Partition partition(labels, k);
    std::vector<double> sizes(k, 0.0);
    for (auto g : labels) sizes[g] += 1.0;
    std::vector<double> prior(k);
    for (std::size_t r = 0; r < k; ++r) prior[r] = sizes[r] / static_cast<double>(n);
    BlockMatrix links(k, 0.0);
    for (const auto& g : snapshots) {
      for (const auto& e : g.edges()) {
        links(labels[e.u], labels[e.v]) += e.count;
        if (labels[e.u] != labels[e.v]) links(labels[e.v], labels[e.u]) += e.count;
      }
    }
    BlockMatrix rate(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t s = 0; s < k; ++s) {
        const double pair_count = r == s ? sizes[r] * (sizes[r] - 1.0) / 2.0 : sizes[r] * sizes[s];
        rate(r, s) = pair_count > 0.0 ? links(r, s) / (pair_count * length) : 0.0;
      }
    }
    const double ll = direct_segment_log_likelihood(snapshots, partition, prior, rate);
    if (!have || ll > best.log_likelihood) {
      have = true;
      best = {partition, prior, rate, ll};
    }
  }
  return best;
}

}  // namespace netshift::testing
